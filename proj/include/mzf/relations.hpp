#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "mzf/core_model.hpp"
#include "mzf/poset.hpp"

namespace mzf {

enum class Family { Cyclic, Csf, Derivation };

std::string to_string(Family f);
Family parse_family(std::string_view text);

struct Provenance {
  Family family;
  IntArgs args;
};

// combo = LHS - RHS of an MZV identity.
struct Relation {
  SymbolCombination combo;
  Provenance provenance;
};

// Integer-point specialisation of the cyclic relation.
Relation cyclic_relation(const IntArgs& k);

// zeta-star value as a sum of MZVs (all merges of adjacent parts).
SymbolCombination zeta_star_expand(const Composition& c);

// Cyclic sum formula for zeta-star values; shape must be all-singleton.
Relation csf_relation(const IntArgs& k);

struct FamilyOptions {
  // Whether the derivation family includes the one-block configurations.
  bool include_d1_derivation = true;
};

// Configurations with sum k = weight - 1 in the W-domain, ordered by d, then
// block depths, then entries (all lexicographic).
std::vector<IntArgs> enumerate_family(int weight, Family family, const FamilyOptions& opts = {});

Relation generate_relation(const IntArgs& k, Family family);
std::vector<Relation> generate_family(int weight, Family family, const FamilyOptions& opts = {},
                                      unsigned threads = 1);

struct RelationMatrix {
  std::vector<Composition> symbols;
  std::vector<std::vector<std::pair<int, mpz_class>>> rows;
  int weight = 0;  // 0 when there are no symbols
};

RelationMatrix relation_matrix(const std::vector<Relation>& rels);

// Rank over Q by fraction-free elimination.
int rank_bareiss(const RelationMatrix& m);
// Rank over Z/p.
int rank_mod_p(const RelationMatrix& m, unsigned long long p);

inline constexpr unsigned long long kRankPrime1 = 2305843009213693951ULL;  // 2^61 - 1
inline constexpr unsigned long long kRankPrime2 = 4611686018427387847ULL;  // 2^62 - 57

// Exact rank, cross-checked modulo two large primes.
int rank_exact(const RelationMatrix& m);

// "All relations" counts for weights 3..11, carried as reference data only.
std::optional<int> reference_all_relations(int weight);

struct Table1Row {
  int weight = 0;
  std::map<Family, int> ranks;
  std::optional<int> all_relations_ref;
};

struct Table1Options {
  FamilyOptions family;
  int max_weight = 8;
  unsigned threads = 1;
};

std::vector<Table1Row> table1(int min_weight, int max_weight, const std::vector<Family>& families,
                              const Table1Options& opts = {});

// Value of the combination with every symbol replaced by its MZV partial sum
// at cutoff N.
double evaluate_combination(const SymbolCombination& combo, long cutoff);

}  // namespace mzf

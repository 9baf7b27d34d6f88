#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "mzf/core_model.hpp"

namespace mzf {

// MZV index (k_1, ..., k_t), smallest summation variable first.
class Composition {
 public:
  Composition() = default;
  explicit Composition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int depth() const { return static_cast<int>(parts_.size()); }
  int weight() const;
  // All parts positive and the last part at least 2.
  bool admissible() const;

  // "k1,k2,...,kt"
  std::string to_string() const;
  static Composition parse(std::string_view text);

  friend bool operator==(const Composition&, const Composition&) = default;
  friend auto operator<=>(const Composition&, const Composition&) = default;

 private:
  std::vector<int> parts_;
};

using ExponentMap = std::map<VarId, int>;

// Sparse integer combination of MZV symbols. Zero coefficients are never
// stored and every stored symbol is admissible.
class SymbolCombination {
 public:
  void add(const Composition& c, const mpz_class& coeff);
  SymbolCombination& operator+=(const SymbolCombination& other);
  SymbolCombination& operator-=(const SymbolCombination& other);
  SymbolCombination& operator*=(const mpz_class& factor);

  const std::map<Composition, mpz_class>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  mpz_class coefficient(const Composition& c) const;

  // "ζ(1,2) - ζ(3)"
  std::string to_string() const;

  friend bool operator==(const SymbolCombination&, const SymbolCombination&) = default;

 private:
  std::map<Composition, mpz_class> terms_;
};

// Levels of a weak order, lowest first; each level sorted by VarId.
struct OrderedSetPartition {
  std::vector<std::vector<VarId>> levels;

  std::string to_string() const;  // "(n_{1,1})(n_{1,2} n)"
  friend bool operator==(const OrderedSetPartition&, const OrderedSetPartition&) = default;
};

// Every total preorder of the variables compatible with cs, in canonical
// order (minimal levels peeled recursively, candidate subsets in increasing
// bitmask order over the canonical variable order).
std::vector<OrderedSetPartition> weak_orders(const ConstraintSystem& cs);

// Composition whose p-th part is the exponent sum over level p.
Composition level_composition(const OrderedSetPartition& wo, const ExponentMap& e);

SymbolCombination decompose_to_mzv(const ConstraintSystem& cs, const ExponentMap& e);
SymbolCombination decompose_to_mzv(const std::vector<OrderedSetPartition>& orders, const ExponentMap& e);

// Brute-force count of admissible points of cs in [1,N]^vars.
mpz_class count_lattice_points(const ConstraintSystem& cs, long N, long cap = 30);

// Strict chains of length t in [1,N]: binomial(N, t).
mpz_class chain_count(int t, long N);

}  // namespace mzf

#include "mzf/relations.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <thread>

#include "mzf/errors.hpp"
#include "mzf/series.hpp"

namespace mzf {

std::string to_string(Family f) {
  switch (f) {
    case Family::Cyclic:
      return "cyclic";
    case Family::Csf:
      return "csf";
    case Family::Derivation:
      return "derivation";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  if (text == "cyclic") return Family::Cyclic;
  if (text == "csf") return Family::Csf;
  if (text == "derivation") return Family::Derivation;
  throw ParseError("unknown family '" + std::string(text) + "' (expected cyclic, csf or derivation)");
}

// ---------------------------------------------------------------- generators

Relation cyclic_relation(const IntArgs& k) {
  if (!is_integer_point_in_W(k)) throw DomainError("integer point " + k.to_string() + " is outside W");
  const Shape& shape = k.shape();
  ExponentMap base;
  for (int b = 1; b <= shape.blocks(); ++b) {
    for (int p = 1; p <= shape.depth(b); ++p) base[VarId::at(b, p)] = k.at(b, p);
  }

  SymbolCombination combo;
  for (int i = 1; i <= shape.blocks(); ++i) {
    for (int j = 1; j <= shape.depth(i); ++j) {
      const int delta = j == shape.depth(i) ? 1 : 0;
      const int kij = k.at(i, j);
      if (delta > kij - 1) continue;
      const auto orders = weak_orders(build_constraints_S_ij(shape, i, j));
      for (int m = delta; m <= kij - 1; ++m) {
        ExponentMap e = base;
        e[VarId::at(i, j)] = kij - m;
        e[VarId::extra()] = m + 1;
        combo += decompose_to_mzv(orders, e);
      }
    }
  }
  ExponentMap e = base;
  e[VarId::extra()] = 1;
  for (int i = 1; i <= shape.blocks(); ++i) combo -= decompose_to_mzv(build_constraints_S_i(shape, i), e);
  return {std::move(combo), {Family::Cyclic, k}};
}

SymbolCombination zeta_star_expand(const Composition& c) {
  if (!c.admissible()) throw NonAdmissibleError("ζ*(" + c.to_string() + ") is not admissible", "");
  const auto& parts = c.parts();
  const std::size_t gaps = parts.size() - 1;
  SymbolCombination out;
  // Bit g set: parts g and g+1 are merged.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << gaps); ++mask) {
    std::vector<int> merged{parts[0]};
    for (std::size_t g = 0; g < gaps; ++g) {
      if (mask >> g & 1) {
        merged.back() += parts[g + 1];
      } else {
        merged.push_back(parts[g + 1]);
      }
    }
    out.add(Composition(std::move(merged)), 1);
  }
  return out;
}

Relation csf_relation(const IntArgs& k) {
  const Shape& shape = k.shape();
  if (!shape.all_singleton()) throw std::invalid_argument("cyclic sum formula needs an all-singleton shape");
  if (!is_integer_point_in_W(k)) throw DomainError("integer point " + k.to_string() + " is outside W");
  const int d = shape.blocks();
  SymbolCombination combo;
  for (int i = 1; i <= d; ++i) {
    const int ki = k.at(i, 1);
    for (int m = 1; m <= ki - 1; ++m) {
      std::vector<int> parts{ki - m};
      for (int step = 1; step < d; ++step) parts.push_back(k.at(shape.wrap(i + step), 1));
      parts.push_back(m + 1);
      combo += zeta_star_expand(Composition(std::move(parts)));
    }
  }
  combo.add(Composition({k.weight() + 1}), -mpz_class(k.weight()));
  return {std::move(combo), {Family::Csf, k}};
}

namespace {

// Compositions of `total` into `parts` positive parts, lexicographic.
void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 0) {
    if (total == 0) out.push_back(cur);
    return;
  }
  for (int first = 1; first <= total - (parts - 1); ++first) {
    cur.push_back(first);
    compositions(total - first, parts - 1, cur, out);
    cur.pop_back();
  }
}

// Block-depth vectors of length d with sum at most `budget`, lexicographic.
void depth_vectors(int d, int budget, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (d == 0) {
    out.push_back(cur);
    return;
  }
  for (int r = 1; r <= budget - (d - 1); ++r) {
    cur.push_back(r);
    depth_vectors(d - 1, budget - r, cur, out);
    cur.pop_back();
  }
}

bool family_accepts(const IntArgs& k, Family family, const FamilyOptions& opts) {
  const Shape& shape = k.shape();
  switch (family) {
    case Family::Cyclic:
      return true;
    case Family::Csf:
      return shape.all_singleton();
    case Family::Derivation:
      if (shape.blocks() == 1 && !opts.include_d1_derivation) return false;
      for (int b = 2; b <= shape.blocks(); ++b) {
        if (shape.depth(b) != 1 || k.at(b, 1) != 1) return false;
      }
      return true;
  }
  return false;
}

}  // namespace

std::vector<IntArgs> enumerate_family(int weight, Family family, const FamilyOptions& opts) {
  if (weight < 3) throw std::invalid_argument("weight must be at least 3");
  const int target = weight - 1;
  std::vector<IntArgs> out;
  for (int d = 1; d <= target; ++d) {
    std::vector<std::vector<int>> shapes;
    std::vector<int> cur;
    depth_vectors(d, target, cur, shapes);
    for (const auto& depths : shapes) {
      const Shape shape(depths);
      std::vector<std::vector<int>> ks;
      compositions(target, shape.total_depth(), cur, ks);
      for (auto& values : ks) {
        IntArgs k(shape, std::move(values));
        if (is_integer_point_in_W(k) && family_accepts(k, family, opts)) out.push_back(std::move(k));
      }
    }
  }
  return out;
}

Relation generate_relation(const IntArgs& k, Family family) {
  if (family == Family::Csf) return csf_relation(k);
  Relation r = cyclic_relation(k);
  r.provenance.family = family;
  return r;
}

std::vector<Relation> generate_family(int weight, Family family, const FamilyOptions& opts, unsigned threads) {
  const auto configs = enumerate_family(weight, family, opts);
  std::vector<std::optional<Relation>> slots(configs.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(configs.size(), 1))));
  auto work = [&](unsigned w) {
    for (std::size_t c = w; c < configs.size(); c += threads) slots[c] = generate_relation(configs[c], family);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::vector<Relation> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------- matrices

RelationMatrix relation_matrix(const std::vector<Relation>& rels) {
  RelationMatrix m;
  std::set<Composition> symbols;
  for (const auto& r : rels) {
    for (const auto& [c, v] : r.combo.terms()) {
      if (m.weight == 0) m.weight = c.weight();
      if (c.weight() != m.weight) throw std::invalid_argument("relations of mixed weight in one matrix");
      symbols.insert(c);
    }
  }
  m.symbols.assign(symbols.begin(), symbols.end());
  for (const auto& r : rels) {
    std::vector<std::pair<int, mpz_class>> row;
    for (const auto& [c, v] : r.combo.terms()) {
      auto col = std::lower_bound(m.symbols.begin(), m.symbols.end(), c) - m.symbols.begin();
      row.push_back({static_cast<int>(col), v});
    }
    m.rows.push_back(std::move(row));
  }
  return m;
}

namespace {

std::vector<std::vector<mpz_class>> dense_rows(const RelationMatrix& m) {
  std::set<std::vector<std::pair<int, std::string>>> seen;
  std::vector<std::vector<mpz_class>> out;
  for (const auto& row : m.rows) {
    if (row.empty()) continue;
    std::vector<std::pair<int, std::string>> key;
    for (const auto& [c, v] : row) key.push_back({c, v.get_str()});
    if (!seen.insert(key).second) continue;  // duplicate rows do not change the rank
    std::vector<mpz_class> dense(m.symbols.size(), 0);
    for (const auto& [c, v] : row) dense[c] = v;
    out.push_back(std::move(dense));
  }
  return out;
}

unsigned long long mulmod(unsigned long long a, unsigned long long b, unsigned long long p) {
  return static_cast<unsigned long long>(static_cast<unsigned __int128>(a) * b % p);
}

unsigned long long powmod(unsigned long long a, unsigned long long e, unsigned long long p) {
  unsigned long long r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

}  // namespace

int rank_bareiss(const RelationMatrix& m) {
  auto a = dense_rows(m);
  const std::size_t rows = a.size(), cols = m.symbols.size();
  mpz_class prev = 1;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    const mpz_class& p = a[rank][c];
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const mpz_class lead = a[i][c];
      for (std::size_t j = c + 1; j < cols; ++j) {
        mpz_class v = p * a[i][j] - lead * a[rank][j];
        mpz_divexact(a[i][j].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = p;
    ++rank;
  }
  return static_cast<int>(rank);
}

int rank_mod_p(const RelationMatrix& m, unsigned long long p) {
  std::vector<std::vector<unsigned long long>> a;
  for (const auto& row : m.rows) {
    std::vector<unsigned long long> dense(m.symbols.size(), 0);
    for (const auto& [c, v] : row) {
      static_assert(sizeof(unsigned long) == 8);
      dense[c] = mpz_fdiv_ui(v.get_mpz_t(), p);
    }
    a.push_back(std::move(dense));
  }
  const std::size_t rows = a.size(), cols = m.symbols.size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    const unsigned long long inv = powmod(a[rank][c], p - 2, p);
    for (std::size_t j = c; j < cols; ++j) a[rank][j] = mulmod(a[rank][j], inv, p);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const unsigned long long f = a[i][c];
      if (f == 0) continue;
      for (std::size_t j = c; j < cols; ++j) {
        const unsigned long long sub = mulmod(f, a[rank][j], p);
        a[i][j] = a[i][j] >= sub ? a[i][j] - sub : a[i][j] + (p - sub);
      }
    }
    ++rank;
  }
  return static_cast<int>(rank);
}

int rank_exact(const RelationMatrix& m) {
  const int exact = rank_bareiss(m);
  const int r1 = rank_mod_p(m, kRankPrime1);
  const int r2 = rank_mod_p(m, kRankPrime2);
  if (r1 != exact || r2 != exact) {
    throw InternalError("rank mismatch: exact " + std::to_string(exact) + ", mod p1 " + std::to_string(r1) +
                        ", mod p2 " + std::to_string(r2));
  }
  return exact;
}

std::optional<int> reference_all_relations(int weight) {
  static constexpr int kAll[] = {1, 3, 6, 14, 29, 60, 123, 249, 503};
  if (weight < 3 || weight > 11) return std::nullopt;
  return kAll[weight - 3];
}

std::vector<Table1Row> table1(int min_weight, int max_weight, const std::vector<Family>& families,
                              const Table1Options& opts) {
  if (min_weight < 3) throw std::invalid_argument("weights start at 3");
  if (max_weight > opts.max_weight) {
    throw BudgetError("weight " + std::to_string(max_weight) + " exceeds cap " + std::to_string(opts.max_weight));
  }
  std::vector<Table1Row> out;
  for (int w = min_weight; w <= max_weight; ++w) {
    Table1Row row;
    row.weight = w;
    row.all_relations_ref = reference_all_relations(w);
    for (Family f : families) {
      row.ranks[f] = rank_exact(relation_matrix(generate_family(w, f, opts.family, opts.threads)));
    }
    out.push_back(std::move(row));
  }
  return out;
}

double evaluate_combination(const SymbolCombination& combo, long cutoff) {
  double total = 0.0;
  for (const auto& [c, v] : combo.terms()) {
    std::vector<Complex> s(c.parts().begin(), c.parts().end());
    total += v.get_d() * mzf_partial_sum(s, cutoff).real();
  }
  return total;
}

}  // namespace mzf

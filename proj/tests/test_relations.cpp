#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include <gmpxx.h>

#include "mzf/errors.hpp"
#include "mzf/io.hpp"
#include "mzf/relations.hpp"
#include "oracles.hpp"

using namespace mzf;

namespace {

SymbolCombination combo(std::initializer_list<std::pair<const char*, long>> terms) {
  SymbolCombination out;
  for (const auto& [c, v] : terms) out.add(Composition::parse(c), v);
  return out;
}

IntArgs ints(std::vector<int> depths, std::vector<int> values) { return IntArgs(Shape(std::move(depths)), std::move(values)); }

int rank_of(int weight, Family f, const FamilyOptions& opts = {}) {
  return rank_exact(relation_matrix(generate_family(weight, f, opts)));
}

// Rank over Q by plain rational elimination on a dense copy.
int rank_rational(const RelationMatrix& m) {
  const std::size_t cols = m.symbols.size();
  std::vector<std::vector<mpq_class>> a;
  for (const auto& row : m.rows) {
    std::vector<mpq_class> dense(cols, 0);
    for (const auto& [c, v] : row) dense[static_cast<std::size_t>(c)] = v;
    a.push_back(std::move(dense));
  }
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(a.size()); ++c) {
    std::size_t piv = static_cast<std::size_t>(rank);
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[static_cast<std::size_t>(rank)]);
    auto& p = a[static_cast<std::size_t>(rank)];
    for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < a.size(); ++r) {
      if (a[r][c] == 0) continue;
      const mpq_class f = a[r][c] / p[c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * p[k];
    }
    ++rank;
  }
  return rank;
}

// Cyclic rotations of the block order.
std::vector<IntArgs> rotations(const IntArgs& k) {
  std::vector<IntArgs> out;
  const Shape& sh = k.shape();
  const int d = sh.blocks();
  for (int t = 1; t < d; ++t) {
    std::vector<int> depths, values;
    for (int q = 0; q < d; ++q) {
      const int b = (q + t) % d + 1;
      depths.push_back(sh.depth(b));
      for (int p = 1; p <= sh.depth(b); ++p) values.push_back(k.at(b, p));
    }
    out.push_back(ints(depths, values));
  }
  return out;
}

long double exact_value(const SymbolCombination& c, std::map<Composition, long double>& memo) {
  long double acc = 0;
  for (const auto& [comp, coeff] : c.terms()) {
    auto it = memo.find(comp);
    if (it == memo.end()) it = memo.emplace(comp, oracle::mzv(comp.parts())).first;
    acc += static_cast<long double>(coeff.get_d()) * it->second;
  }
  return acc;
}

}  // namespace

TEST_CASE("family names") {
  CHECK(parse_family("cyclic") == Family::Cyclic);
  CHECK(parse_family("csf") == Family::Csf);
  CHECK(parse_family("derivation") == Family::Derivation);
  CHECK(to_string(Family::Csf) == "csf");
  CHECK_THROWS_AS(parse_family("shuffle"), ParseError);
}

TEST_CASE("cyclic relation examples") {
  const auto euler = cyclic_relation(ints({1}, {2}));
  CHECK(euler.combo == combo({{"1,2", 1}, {"3", -1}}));
  CHECK(euler.provenance.family == Family::Cyclic);
  CHECK_THROWS_AS(cyclic_relation(ints({1}, {1})), DomainError);

  const auto w4 = cyclic_relation(ints({2}, {1, 2}));
  for (const auto& [c, v] : w4.combo.terms()) CHECK(c.weight() == 4);
  // The truncation error of ζ(1,1,2) decays like log(N)^2/N.
  CHECK(std::abs(evaluate_combination(w4.combo, 10'000)) < 1e-2);
  CHECK(std::abs(evaluate_combination(w4.combo, 100'000)) < 1e-3);
  std::map<Composition, long double> memo;
  CHECK(std::abs(exact_value(w4.combo, memo)) < 1e-15L);
}

TEST_CASE("zeta-star expansion") {
  CHECK(zeta_star_expand(Composition({1, 2})) == combo({{"1,2", 1}, {"3", 1}}));
  CHECK(zeta_star_expand(Composition({2})) == combo({{"2", 1}}));
  CHECK(zeta_star_expand(Composition({1, 1, 2})) == combo({{"1,1,2", 1}, {"2,2", 1}, {"1,3", 1}, {"4", 1}}));
  CHECK_THROWS_AS(zeta_star_expand(Composition({2, 1})), NonAdmissibleError);
  // Agrees with the all-non-strict chain.
  ConstraintSystem chain(Shape({4}), false);
  ExponentMap e;
  const std::vector<int> parts{1, 3, 1, 2};
  for (int p = 1; p <= 4; ++p) {
    if (p < 4) chain.add(VarId::at(1, p), Cmp::LessEq, VarId::at(1, p + 1));
    e[VarId::at(1, p)] = parts[static_cast<std::size_t>(p - 1)];
  }
  CHECK(zeta_star_expand(Composition(parts)) == decompose_to_mzv(chain, e));
}

TEST_CASE("cyclic sum formula examples") {
  CHECK(csf_relation(ints({1}, {2})).combo == combo({{"1,2", 1}, {"3", -1}}));
  const auto r = csf_relation(ints({1, 1}, {1, 2}));
  CHECK(r.combo.coefficient(Composition({4})) != 0);
  std::map<Composition, long double> memo;
  CHECK(std::abs(exact_value(r.combo, memo)) < 1e-15L);
  CHECK(std::abs(evaluate_combination(r.combo, 10'000)) < 1e-2);
  CHECK_THROWS_AS(csf_relation(ints({1}, {1})), DomainError);
  CHECK_THROWS_AS(csf_relation(ints({2}, {1, 2})), std::invalid_argument);
}

TEST_CASE("family enumeration examples") {
  CHECK(enumerate_family(3, Family::Csf) == std::vector<IntArgs>{ints({1}, {2})});
  CHECK(enumerate_family(3, Family::Cyclic) == std::vector<IntArgs>{ints({1}, {2})});
  CHECK(enumerate_family(4, Family::Csf) ==
        std::vector<IntArgs>{ints({1}, {3}), ints({1, 1}, {1, 2}), ints({1, 1}, {2, 1})});
  for (int w = 3; w <= 7; ++w) {
    for (auto f : {Family::Cyclic, Family::Csf, Family::Derivation}) {
      for (const auto& k : enumerate_family(w, f)) {
        CHECK(k.weight() == w - 1);
        CHECK(is_integer_point_in_W(k));
        if (f == Family::Csf) CHECK(k.shape().all_singleton());
        if (f == Family::Derivation) {
          for (int b = 2; b <= k.shape().blocks(); ++b) {
            CHECK(k.shape().depth(b) == 1);
            CHECK(k.at(b, 1) == 1);
          }
        }
      }
    }
  }
  FamilyOptions no_d1;
  no_d1.include_d1_derivation = false;
  for (const auto& k : enumerate_family(6, Family::Derivation, no_d1)) CHECK(k.shape().blocks() >= 2);
  CHECK_THROWS_AS(enumerate_family(2, Family::Cyclic), std::invalid_argument);
}

TEST_CASE("relation matrices and ranks") {
  const auto euler = cyclic_relation(ints({1}, {2}));
  const auto m = relation_matrix({euler});
  REQUIRE(m.symbols.size() == 2);
  CHECK(m.symbols[0] == Composition({1, 2}));
  CHECK(m.symbols[1] == Composition({3}));
  CHECK(m.rows.size() == 1);
  CHECK(m.rows[0] == std::vector<std::pair<int, mpz_class>>{{0, 1}, {1, -1}});
  CHECK(m.weight == 3);
  CHECK(rank_exact(m) == 1);

  const auto empty = relation_matrix({});
  CHECK(empty.symbols.empty());
  CHECK(rank_exact(empty) == 0);
  CHECK(rank_exact(relation_matrix({euler, euler})) == 1);

  RelationMatrix zero;
  zero.symbols = {Composition({3})};
  zero.rows = {{}, {}};
  zero.weight = 3;
  CHECK(rank_exact(zero) == 0);

  const auto w4 = cyclic_relation(ints({1}, {3}));
  CHECK_THROWS_AS(relation_matrix({euler, w4}), std::invalid_argument);

  CHECK(rank_of(5, Family::Cyclic) == 5);
}

TEST_CASE("table rows") {
  const auto rows = table1(3, 8, {Family::Csf, Family::Derivation, Family::Cyclic});
  REQUIRE(rows.size() == 6);
  const std::map<int, std::array<int, 3>> expected{{3, {1, 1, 1}}, {5, {4, 5, 5}}, {8, {18, 44, 52}}};
  for (const auto& row : rows) {
    auto it = expected.find(row.weight);
    if (it == expected.end()) continue;
    CAPTURE(row.weight);
    CHECK(row.ranks.at(Family::Csf) == it->second[0]);
    CHECK(row.ranks.at(Family::Derivation) == it->second[1]);
    CHECK(row.ranks.at(Family::Cyclic) == it->second[2]);
  }
  CHECK(rows.back().all_relations_ref == 60);
  CHECK(reference_all_relations(3) == 1);
  CHECK(reference_all_relations(11) == 503);
  CHECK_FALSE(reference_all_relations(12).has_value());
  CHECK_THROWS_AS(table1(3, 9, {Family::Cyclic}), BudgetError);
  CHECK_THROWS_AS(table1(2, 4, {Family::Cyclic}), std::invalid_argument);
}

TEST_CASE("cyclic relation specialises to the cyclic sum formula") {
  for (int w = 3; w <= 8; ++w) {
    for (const auto& k : enumerate_family(w, Family::Csf)) {
      CAPTURE(k.to_string());
      CHECK(cyclic_relation(k).combo == csf_relation(k).combo);
    }
  }
}

TEST_CASE("generated relations vanish numerically") {
  std::map<Composition, long double> memo;
  for (int w = 3; w <= 6; ++w) {
    for (auto f : {Family::Cyclic, Family::Csf, Family::Derivation}) {
      for (const auto& r : generate_family(w, f)) {
        CAPTURE(r.combo.to_string());
        const double at = std::abs(evaluate_combination(r.combo, 10'000));
        const double at2 = std::abs(evaluate_combination(r.combo, 20'000));
        if (w <= 4) CHECK(at < 1e-2);
        CHECK(at2 < at);
      }
    }
  }
  // Weights up to 8 against the exact values.
  for (int w = 3; w <= 8; ++w) {
    for (const auto& r : generate_family(w, Family::Cyclic)) {
      CAPTURE(r.combo.to_string());
      long double scale = 0;
      for (const auto& [c, v] : r.combo.terms()) scale += std::fabs(static_cast<long double>(v.get_d()));
      CHECK(std::fabs(exact_value(r.combo, memo)) < 1e-15L * scale);
    }
  }
}

TEST_CASE("family nesting and the reference bound") {
  for (int w = 3; w <= 8; ++w) {
    const int cyc = rank_of(w, Family::Cyclic);
    CHECK(rank_of(w, Family::Csf) <= cyc);
    CHECK(rank_of(w, Family::Derivation) <= cyc);
    CHECK(cyc <= *reference_all_relations(w));
  }
}

TEST_CASE("rank is unchanged by adding rotated configurations") {
  for (int w = 3; w <= 6; ++w) {
    for (auto f : {Family::Cyclic, Family::Csf, Family::Derivation}) {
      auto rels = generate_family(w, f);
      const int base = rank_exact(relation_matrix(rels));
      for (const auto& k : enumerate_family(w, f)) {
        for (const auto& rot : rotations(k)) rels.push_back(generate_relation(rot, f == Family::Csf ? f : Family::Cyclic));
      }
      CAPTURE(w);
      CAPTURE(to_string(f));
      CHECK(rank_exact(relation_matrix(rels)) == base);
    }
  }
}

TEST_CASE("exact rank agrees with modular and rational elimination") {
  for (int w = 3; w <= 7; ++w) {
    for (auto f : {Family::Cyclic, Family::Csf, Family::Derivation}) {
      const auto m = relation_matrix(generate_family(w, f));
      const int r = rank_bareiss(m);
      CHECK(r == rank_rational(m));
      CHECK(rank_mod_p(m, kRankPrime1) == r);
      CHECK(rank_mod_p(m, kRankPrime2) == r);
      CHECK(rank_mod_p(m, kRankPrime1) <= rank_rational(m));
    }
  }
  // A matrix whose rank drops modulo a small prime.
  RelationMatrix m;
  m.symbols = {Composition({3}), Composition({1, 2})};
  m.rows = {{{0, 1}, {1, 2}}, {{0, 3}, {1, 1}}};
  m.weight = 3;
  CHECK(rank_mod_p(m, 5) == 1);
  CHECK(rank_exact(m) == 2);
}

TEST_CASE("generation does not depend on the thread count") {
  for (auto f : {Family::Cyclic, Family::Derivation}) {
    const auto a = generate_family(7, f, {}, 1);
    const auto b = generate_family(7, f, {}, 6);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].combo == b[k].combo);
      CHECK(a[k].provenance.args == b[k].provenance.args);
    }
  }
}

TEST_CASE("relation sets survive serialisation") {
  const auto rels = generate_family(6, Family::Cyclic);
  const auto set = make_relation_set(6, Family::Cyclic, {}, rels);
  const auto text = to_json(set).dump();
  const auto back = relation_set_from_json(nlohmann::json::parse(text));
  CHECK(back.weight == 6);
  CHECK(back.family == "cyclic");
  CHECK(back.matrix.symbols == set.matrix.symbols);
  CHECK(back.matrix.rows == set.matrix.rows);
  CHECK(rank_exact(back.matrix) == rank_exact(relation_matrix(rels)));
  CHECK(to_json(back).dump() == text);

  const auto c = combo({{"1,2", 1}, {"3", -1}});
  CHECK(to_json(c) == nlohmann::json{{"1,2", "1"}, {"3", "-1"}});
  CHECK(combination_from_json(to_json(c)) == c);

  auto bad = nlohmann::json::parse(text);
  bad["symbols"][0] = "2,1";
  CHECK_THROWS_AS(relation_set_from_json(bad), ParseError);
  bad = nlohmann::json::parse(text);
  bad["rows"][0]["entries"][0][0] = 100000;
  CHECK_THROWS_AS(relation_set_from_json(bad), ParseError);
}

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mzf/core_model.hpp"
#include "mzf/poset.hpp"
#include "mzf/relations.hpp"
#include "mzf/series.hpp"
#include "oracles.hpp"

using namespace mzf;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? "," : "") + std::to_string(xs[k]);
  return out;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

ComplexArgs args(const char* shape, const char* s) { return ComplexArgs::parse(Shape::parse(shape), s); }

const std::vector<Family> kFamilies{Family::Csf, Family::Derivation, Family::Cyclic};

// Table rows for weights lo..hi, checked entry by entry.
void table_check(int id, int lo, int hi, const std::map<Family, std::vector<int>>& want, const FamilyOptions& fo) {
  Table1Options opts;
  opts.family = fo;
  opts.max_weight = hi;
  opts.threads = 4;
  const auto rows = table1(lo, hi, kFamilies, opts);
  std::ostringstream got, diff;
  bool ok = true;
  for (Family f : kFamilies) {
    std::vector<int> col;
    for (const auto& r : rows) col.push_back(r.ranks.at(f));
    got << to_string(f) << " " << join(col) << "; ";
    for (std::size_t k = 0; k < col.size(); ++k) {
      if (col[k] != want.at(f)[k]) {
        ok = false;
        diff << " " << to_string(f) << "@" << lo + static_cast<int>(k) << ": got " << col[k] << ", want "
             << want.at(f)[k];
      }
    }
  }
  std::string detail = got.str();
  if (!ok) detail += "mismatch:" + diff.str();
  report(id, "relation-count table, weights " + std::to_string(lo) + "-" + std::to_string(hi), ok, detail);
}

void criterion1() {
  const std::map<Family, std::vector<int>> want{{Family::Csf, {1, 2, 4, 6, 12, 18}},
                                                {Family::Derivation, {1, 2, 5, 10, 22, 44}},
                                                {Family::Cyclic, {1, 2, 5, 10, 25, 52}}};
  table_check(1, 3, 8, want, {});

  // Which reading of the derivation row matches.
  std::vector<int> with, without;
  FamilyOptions no_d1;
  no_d1.include_d1_derivation = false;
  for (int w = 3; w <= 8; ++w) {
    with.push_back(rank_exact(relation_matrix(generate_family(w, Family::Derivation, {}, 4))));
    without.push_back(rank_exact(relation_matrix(generate_family(w, Family::Derivation, no_d1, 4))));
  }
  std::printf("INFO derivation row with one-block configurations: %s (%s); without: %s (%s)\n", join(with).c_str(),
              with == want.at(Family::Derivation) ? "matches" : "differs", join(without).c_str(),
              without == want.at(Family::Derivation) ? "matches" : "differs");
}

void criterion2() {
  const auto r = cyclic_relation(IntArgs(Shape({1}), {2}));
  SymbolCombination euler;
  euler.add(Composition({1, 2}), 1);
  euler.add(Composition({3}), -1);
  const double v = std::abs(evaluate_combination(r.combo, 1'000'000));
  report(2, "Euler identity from the cyclic relation", r.combo == euler && v < 1e-4,
         "combo " + r.combo.to_string() + ", |value| at N=1e6 = " + sci(v) + " (< 1e-4)");
}

const std::vector<ComplexArgs>& theorem_points() {
  static const std::vector<ComplexArgs> pts{args("1", "3"), args("2", "1.5,2.5"), args("2", "1.5+0.5i,2.5"),
                                            args("1,1", "1.5;1.6"), args("2,1", "1.2,2.2;1.5")};
  return pts;
}

void criterion3() {
  const auto plan = TruncationPlan::with_refinements({125, 250, 500, 1000});
  EvalOptions opts;
  opts.threads = 4;
  bool ok = true;
  std::ostringstream detail;
  for (const auto& s : theorem_points()) {
    const auto rep = eval_theorem_residual(s, plan, opts);
    std::vector<double> r;
    for (const auto& x : rep.refinements) r.push_back(x.residual);
    bool dec = true;
    for (std::size_t k = 1; k < r.size(); ++k) dec = dec && r[k] < r[k - 1];
    const double factor = r.front() / r.back();
    ok = ok && dec && factor >= 2;
    detail << s.shape().to_string() << " s=" << s.to_string() << ": " << sci(r.front()) << " -> " << sci(r.back())
           << " (x" << std::lround(factor * 10) / 10.0 << (dec ? "" : ", not decreasing") << "); ";
  }
  report(3, "theorem residuals shrink under refinement", ok, detail.str());
}

void criterion4() {
  const double z4 = eval_mzf({4.0}, 1'000'000).value.real();
  auto resid = [&](long N) {
    return std::abs(eval_mordell_tornheim(2.0, 1.0, 1.0, N).value - mzf_partial_sum({1.0, 3.0}, N) - z4);
  };
  const double r4 = resid(4000), r8 = resid(8000);
  const double ratio = r8 / r4;
  report(4, "Mordell-Tornheim example", r4 < 5e-3 && ratio >= 0.375 && ratio <= 0.625,
         "residual " + sci(r4) + " at N=4000 (< 5e-3), " + sci(r8) + " at N=8000, ratio " + sci(ratio) +
             " (0.5 +- 25%)");
}

bool counts_agree(const ConstraintSystem& cs, long& checked) {
  const auto wos = weak_orders(cs);
  for (long N : {5L, 12L, 30L}) {
    mpz_class total = 0;
    for (const auto& w : wos) total += chain_count(static_cast<int>(w.levels.size()), N);
    ++checked;
    if (count_lattice_points(cs, N) != total) {
      std::printf("  count mismatch for %s at N=%ld\n", cs.to_string().c_str(), N);
      return false;
    }
  }
  return true;
}

void criterion5() {
  long checked = 0;
  bool ok = true;
  int systems = 0;
  for (const auto& sh : oracle::shapes_up_to(4)) {
    std::vector<ConstraintSystem> all{build_constraints_S(sh)};
    for (int i = 1; i <= sh.blocks(); ++i) {
      all.push_back(build_constraints_S_i(sh, i));
      all.push_back(build_constraints_T_i(sh, i));
      for (int j = 1; j <= sh.depth(i); ++j) all.push_back(build_constraints_S_ij(sh, i, j));
    }
    for (const auto& cs : all) {
      ok = counts_agree(cs, checked) && ok;
      ++systems;
    }
  }
  std::mt19937 rng(20240611);
  for (int t = 0; t < 50; ++t) {
    ok = counts_agree(oracle::random_system(rng, 1 + t % 5, static_cast<int>(rng() % 9)), checked) && ok;
  }
  report(5, "weak-order counting oracle", ok,
         std::to_string(systems) + " constructed + 50 random systems, " + std::to_string(checked) +
             " (system, N) pairs exact");
}

void criterion6() {
  int n = 0, bad = 0;
  for (int w = 3; w <= 8; ++w) {
    for (const auto& k : enumerate_family(w, Family::Csf)) {
      ++n;
      if (!(cyclic_relation(k).combo == csf_relation(k).combo)) {
        ++bad;
        std::printf("  differs at %s\n", k.to_string().c_str());
      }
    }
  }
  report(6, "cyclic relation specialises to the cyclic sum formula", bad == 0,
         std::to_string(n - bad) + "/" + std::to_string(n) + " all-singleton configurations identical");
}

void criterion7() {
  const auto plan = TruncationPlan::with_refinements({125, 250, 500, 1000});
  EvalOptions opts;
  opts.threads = 4;
  bool paths_ok = true, tele_ok = true;
  int pairs = 0, tele = 0;
  double worst_ratio = 0, worst_defect = 0;
  for (const auto& s : theorem_points()) {
    const Shape& sh = s.shape();
    if (sh.total_depth() > 3) continue;
    for (int i = 1; i <= sh.blocks(); ++i) {
      for (int j = 1; j <= sh.depth(i); ++j) {
        for (auto variant : {TildeVariant::First, TildeVariant::Second}) {
          const auto d = eval_zeta_tilde(s, i, j, variant, plan, opts);
          const auto h = eval_zeta_tilde_harmonic(s, i, j, variant, plan, opts);
          const double gap = std::abs(d.value - h.value), budget = d.residual + h.residual;
          worst_ratio = std::max(worst_ratio, gap / budget);
          paths_ok = paths_ok && gap <= budget;
          ++pairs;
        }
        if (j == sh.depth(i)) continue;
        // Telescoping defect at each refinement; non-increasing down to a
        // rounding floor of 1e-12 relative.
        double prev = INFINITY;
        for (long N : plan.refinements) {
          const auto a = eval_zeta_tilde(s, i, j, TildeVariant::First, TruncationPlan(N), opts).value;
          const auto b = eval_zeta_tilde(s, i, j + 1, TildeVariant::Second, TruncationPlan(N), opts).value;
          const double defect = std::abs(a - b), floor = 1e-12 * std::abs(a);
          worst_defect = std::max(worst_defect, defect / std::abs(a));
          tele_ok = tele_ok && (defect <= floor || defect < prev);
          prev = std::max(defect, floor);
        }
        ++tele;
      }
    }
  }
  report(7, "direct and harmonic-form series agree", paths_ok && tele_ok,
         std::to_string(pairs) + " (point, i, j, variant) cases, worst gap/residual-budget " + sci(worst_ratio) +
             "; " + std::to_string(tele) + " telescoping pairs, worst relative defect " + sci(worst_defect));
}

void criterion8() {
  const double a = harmonic_relation_check(2.0, 2.0, 10'000);
  const double b = harmonic_relation_check(2.0, Complex(3, 1), 10'000);
  report(8, "harmonic product relation", a < 1e-3 && b < 1e-3,
         "residual " + sci(a) + " at (2,2), " + sci(b) + " at (2,3+i), N=1e4 (< 1e-3)");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "--weight9-only") == 0) {
    table_check(1, 9, 9, {{Family::Csf, {34}}, {Family::Derivation, {90}}, {Family::Cyclic, {110}}}, {});
    return failures ? 1 : 0;
  }
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures ? 1 : 0;
}

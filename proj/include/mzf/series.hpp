#pragma once

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mzf/core_model.hpp"

namespace mzf {

// Factor weight * num^num_exp / (den^den_exp * (den - num)). All poles of
// one term must share the same (num, den) pair.
struct Pole {
  VarId num_var;
  VarId den_var;
  Complex num_exp{0.0, 0.0};
  Complex den_exp{0.0, 0.0};
  Complex weight{1.0, 0.0};
};

// Summand prod_v v^{-e(v)} times the (optional) pole factor.
struct TermSpec {
  std::map<VarId, Complex> exponents;
  std::vector<Pole> poles;
};

struct TruncationPlan {
  long cutoff = 1000;
  std::vector<long> refinements;  // strictly increasing; optional

  TruncationPlan() = default;
  explicit TruncationPlan(long n) : cutoff(n) {}
  static TruncationPlan with_refinements(std::vector<long> cutoffs);
  void validate() const;
};

struct EvalReport {
  Complex value;
  long cutoff = 0;
  std::vector<std::pair<long, Complex>> refinements;
  // |value(N) - value(N/2)|
  double residual = 0.0;
};

struct EvalOptions {
  bool check_domain = true;
  unsigned threads = 1;
  long max_cutoff = 10'000'000;
  // Rough cap on inner-loop operations per single evaluation.
  double max_work = 2e11;
};

// Two-variable weight folded into a constrained sum. When a == b the weight
// is evaluated on the diagonal.
struct Coupling {
  VarId a;
  VarId b;
  std::function<Complex(long, long)> weight;
  // Variables must be strictly separated by the constraint system (poles).
  bool requires_separation = false;
};

// Box-truncated sum over [1,N]^vars of cs-admissible points. The evaluation
// conditions on a few variables so that the rest of the constraint graph is
// a forest, then sums the forest by prefix sums; cost is about
// N^(#conditioned) * #vars * N.
Complex sum_constrained(const ConstraintSystem& cs, const std::map<VarId, Complex>& exponents,
                        const std::optional<Coupling>& coupling, long cutoff, const EvalOptions& opts = {});

EvalReport eval_constrained_sum(const ConstraintSystem& cs, const TermSpec& term, const TruncationPlan& plan,
                                const EvalOptions& opts = {});

// Euler-Zagier series over n_1 < ... < n_r <= N by prefix-sum recursion.
Complex mzf_partial_sum(const std::vector<Complex>& s, long cutoff);
EvalReport eval_mzf(const std::vector<Complex>& s, long cutoff, const EvalOptions& opts = {});

enum class TildeVariant { First, Second, Diff };

EvalReport eval_zeta_tilde(const ComplexArgs& s, int i, int j, TildeVariant variant, const TruncationPlan& plan,
                           const EvalOptions& opts = {});

// Harmonic-number closed forms: the auxiliary variable is summed exactly,
// only the remaining variables are truncated at N. Variant must be First or
// Second.
EvalReport eval_zeta_tilde_harmonic(const ComplexArgs& s, int i, int j, TildeVariant variant,
                                    const TruncationPlan& plan, const EvalOptions& opts = {});

// sum_{k=a}^{b} 1/k; zero for an empty range.
double harmonic_range(long a, long b);

EvalReport eval_zeta_C_i(const ComplexArgs& s, int i, const TruncationPlan& plan, const EvalOptions& opts = {});
EvalReport eval_zeta_C(const ComplexArgs& s, const TruncationPlan& plan, const EvalOptions& opts = {});

struct TheoremSample {
  long cutoff = 0;
  Complex lhs;
  Complex rhs;
  double residual = 0.0;
};

struct TheoremReport {
  Complex lhs;
  Complex rhs;
  double residual = 0.0;
  long cutoff = 0;
  std::vector<TheoremSample> refinements;
};

// Sum of all zeta-tilde against the sum of all zeta^C_i, at one truncation.
TheoremReport eval_theorem_residual(const ComplexArgs& s, const TruncationPlan& plan, const EvalOptions& opts = {});

// sum_{m,n<=N} m^-s1 n^-s2 (m+n)^-s3
Complex mordell_tornheim_partial_sum(Complex s1, Complex s2, Complex s3, long cutoff);
EvalReport eval_mordell_tornheim(Complex s1, Complex s2, Complex s3, long cutoff, const EvalOptions& opts = {});

// zeta(s1)zeta(s2) - zeta(s1,s2) - zeta(s2,s1) - zeta(s1+s2), all truncated at N.
Complex harmonic_relation_defect(Complex s1, Complex s2, long cutoff);
double harmonic_relation_check(Complex s1, Complex s2, long cutoff);

}  // namespace mzf

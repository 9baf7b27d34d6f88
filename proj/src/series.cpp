#include "mzf/series.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <memory>
#include <numeric>
#include <thread>

#include "mzf/errors.hpp"

namespace mzf {

namespace {

constexpr long kNegInf = std::numeric_limits<long>::min() / 4;
constexpr long kPosInf = std::numeric_limits<long>::max() / 4;

// x_v - x_u in [lo, hi] for an ordered pair u < v of variable indices.
struct DiffInterval {
  long lo = kNegInf;
  long hi = kPosInf;
  bool empty() const { return lo > hi; }
};

struct Edge {
  int u;
  int v;
  DiffInterval iv;
};

// Interval for x_to - x_from along an edge.
DiffInterval oriented(const Edge& e, int from) {
  if (e.u == from) return e.iv;
  return {e.iv.hi == kPosInf ? kNegInf : -e.iv.hi, e.iv.lo == kNegInf ? kPosInf : -e.iv.lo};
}

// Removes constraints implied by the others so the undirected constraint
// graph has as few cycles as possible. Constraints between `keep_a` and
// `keep_b` are never removed.
std::vector<Constraint> reduce_constraints(const std::vector<VarId>& vars, std::vector<Constraint> cs,
                                           std::optional<std::pair<VarId, VarId>> keep) {
  auto idx = [&](VarId v) {
    return static_cast<int>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
  };
  const int n = static_cast<int>(vars.size());
  // Best known relation from a to b: -1 none, 0 weak path, 1 strict path.
  auto implied = [&](const std::vector<Constraint>& set, std::size_t skip) {
    const Constraint& target = set[skip];
    std::vector<int> best(n, -1);
    std::vector<int> stack{idx(target.lhs)};
    best[idx(target.lhs)] = 0;
    // Longest "strictness" over paths; at most two passes needed per node.
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t k = 0; k < set.size(); ++k) {
        if (k == skip) continue;
        const int a = idx(set[k].lhs), b = idx(set[k].rhs);
        if (best[a] < 0) continue;
        const int cand = std::max(best[a], set[k].rel == Cmp::Less ? 1 : 0);
        if (cand > best[b]) {
          best[b] = cand;
          changed = true;
        }
      }
    }
    const int need = target.rel == Cmp::Less ? 1 : 0;
    return best[idx(target.rhs)] >= need;
  };
  for (std::size_t k = 0; k < cs.size();) {
    const bool protected_pair =
        keep && ((cs[k].lhs == keep->first && cs[k].rhs == keep->second) ||
                 (cs[k].lhs == keep->second && cs[k].rhs == keep->first));
    if (!protected_pair && implied(cs, k)) {
      cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      ++k;
    }
  }
  return cs;
}

bool remaining_has_cycle(int n, const std::vector<Edge>& edges, const std::vector<char>& conditioned,
                         std::vector<int>* core_degree) {
  std::vector<int> deg(n, 0);
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    if (conditioned[e.u] || conditioned[e.v]) continue;
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
    ++deg[e.u];
    ++deg[e.v];
  }
  std::vector<char> removed(n, 0);
  bool progress = true;
  while (progress) {
    progress = false;
    for (int x = 0; x < n; ++x) {
      if (conditioned[x] || removed[x] || deg[x] > 1) continue;
      removed[x] = 1;
      progress = true;
      for (int y : adj[x]) {
        if (!removed[y]) --deg[y];
      }
    }
  }
  bool cycle = false;
  if (core_degree) core_degree->assign(n, -1);
  for (int x = 0; x < n; ++x) {
    if (!conditioned[x] && !removed[x]) {
      cycle = true;
      if (core_degree) (*core_degree)[x] = deg[x];
    }
  }
  return cycle;
}

std::vector<int> choose_conditioning(int n, const std::vector<Edge>& edges, std::vector<int> seed) {
  std::vector<char> cond(n, 0);
  for (int s : seed) cond[s] = 1;
  std::vector<int> order = seed;
  std::vector<int> core;
  while (remaining_has_cycle(n, edges, cond, &core)) {
    int pick = -1;
    for (int x = 0; x < n; ++x) {
      if (core[x] >= 0 && (pick < 0 || core[x] > core[pick])) pick = x;
    }
    cond[pick] = 1;
    order.push_back(pick);
  }
  return order;
}

// Everything the forest sum needs, independent of the conditioned values.
struct SumPlan {
  long N = 0;
  int nvars = 0;
  std::vector<Edge> edges;
  std::vector<int> conditioned;  // enumeration order
  std::vector<char> is_conditioned;
  std::vector<std::vector<Complex>> unary;  // [var][x], x in 1..N
  int coupling_a = -1;
  int coupling_b = -1;
  const Coupling* coupling = nullptr;
  // Forest over the unconditioned variables: post-order list with parent
  // links and the edge to the parent.
  std::vector<int> postorder;
  std::vector<int> parent;
  std::vector<int> parent_edge;
  std::vector<int> roots;
};

void build_forest(SumPlan& p) {
  const int n = p.nvars;
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (int k = 0; k < static_cast<int>(p.edges.size()); ++k) {
    const auto& e = p.edges[k];
    if (p.is_conditioned[e.u] || p.is_conditioned[e.v]) continue;
    adj[e.u].push_back({e.v, k});
    adj[e.v].push_back({e.u, k});
  }
  p.parent.assign(n, -1);
  p.parent_edge.assign(n, -1);
  std::vector<char> seen(n, 0);
  for (int r = 0; r < n; ++r) {
    if (p.is_conditioned[r] || seen[r]) continue;
    p.roots.push_back(r);
    // Iterative DFS producing a post-order.
    std::vector<std::pair<int, std::size_t>> stack{{r, 0}};
    seen[r] = 1;
    while (!stack.empty()) {
      auto& [x, next] = stack.back();
      if (next < adj[x].size()) {
        auto [y, k] = adj[x][next++];
        if (seen[y]) continue;
        seen[y] = 1;
        p.parent[y] = x;
        p.parent_edge[y] = k;
        stack.push_back({y, 0});
      } else {
        p.postorder.push_back(x);
        stack.pop_back();
      }
    }
  }
}

struct Workspace {
  std::vector<std::vector<Complex>> f;
  std::vector<Complex> prefix;
  std::vector<Complex> suffix;
  std::vector<long> lo;
  std::vector<long> hi;
  std::vector<long> value;  // conditioned assignment
};

Complex coupling_value(const SumPlan& p, long xa, long xb) { return p.coupling->weight(xa, xb); }

// Sum over the unconditioned forest for a fixed conditioned assignment.
Complex forest_sum(const SumPlan& p, Workspace& ws) {
  const long N = p.N;
  Complex scalar{1.0, 0.0};
  for (int c : p.conditioned) scalar *= p.unary[c][ws.value[c]];
  if (p.coupling) {
    const bool a_in = p.is_conditioned[p.coupling_a] != 0;
    const bool b_in = p.is_conditioned[p.coupling_b] != 0;
    if (p.coupling_a == p.coupling_b) {
      if (a_in) scalar *= coupling_value(p, ws.value[p.coupling_a], ws.value[p.coupling_a]);
    } else if (a_in && b_in) {
      scalar *= coupling_value(p, ws.value[p.coupling_a], ws.value[p.coupling_b]);
    }
  }

  // Bounds from edges to conditioned variables.
  for (int x = 0; x < p.nvars; ++x) {
    ws.lo[x] = 1;
    ws.hi[x] = N;
  }
  for (const auto& e : p.edges) {
    const bool cu = p.is_conditioned[e.u] != 0, cv = p.is_conditioned[e.v] != 0;
    if (cu == cv) continue;
    const int fixed = cu ? e.u : e.v;
    const int free = cu ? e.v : e.u;
    const DiffInterval iv = oriented(e, fixed);
    const long x0 = ws.value[fixed];
    if (iv.lo != kNegInf) ws.lo[free] = std::max(ws.lo[free], x0 + iv.lo);
    if (iv.hi != kPosInf) ws.hi[free] = std::min(ws.hi[free], x0 + iv.hi);
  }

  for (int x : p.postorder) {
    if (ws.lo[x] > ws.hi[x]) return {0.0, 0.0};
    auto& f = ws.f[x];
    std::fill(f.begin(), f.end(), Complex{0.0, 0.0});
    for (long t = ws.lo[x]; t <= ws.hi[x]; ++t) f[t] = p.unary[x][t];
  }
  if (p.coupling) {
    const int a = p.coupling_a, b = p.coupling_b;
    const bool a_in = p.is_conditioned[a] != 0, b_in = p.is_conditioned[b] != 0;
    if (a == b && !a_in) {
      for (long t = ws.lo[a]; t <= ws.hi[a]; ++t) ws.f[a][t] *= coupling_value(p, t, t);
    } else if (a != b && a_in != b_in) {
      const int free = a_in ? b : a;
      const long fixed_value = a_in ? ws.value[a] : ws.value[b];
      for (long t = ws.lo[free]; t <= ws.hi[free]; ++t) {
        ws.f[free][t] *= a_in ? coupling_value(p, fixed_value, t) : coupling_value(p, t, fixed_value);
      }
    }
  }

  Complex total = scalar;
  for (int x : p.postorder) {
    auto& f = ws.f[x];
    const int par = p.parent[x];
    if (par < 0) {
      Complex s{0.0, 0.0};
      for (long t = ws.lo[x]; t <= ws.hi[x]; ++t) s += f[t];
      total *= s;
      continue;
    }
    const DiffInterval iv = oriented(p.edges[p.parent_edge[x]], par);
    auto& prefix = ws.prefix;
    auto& suffix = ws.suffix;
    prefix[0] = 0.0;
    for (long t = 1; t <= N; ++t) prefix[t] = prefix[t - 1] + f[t];
    suffix[N + 1] = 0.0;
    for (long t = N; t >= 1; --t) suffix[t] = suffix[t + 1] + f[t];
    auto& g = ws.f[par];
    for (long t = ws.lo[par]; t <= ws.hi[par]; ++t) {
      const long a = iv.lo == kNegInf ? 1 : std::max(1L, t + iv.lo);
      const long b = iv.hi == kPosInf ? N : std::min(N, t + iv.hi);
      Complex m{0.0, 0.0};
      if (a <= b) {
        if (iv.hi == kPosInf) {
          m = suffix[a];
        } else if (iv.lo == kNegInf) {
          m = prefix[b];
        } else if (a == b) {
          m = f[a];
        } else {
          m = prefix[b] - prefix[a - 1];
        }
      }
      g[t] *= m;
    }
  }
  return total;
}

// Enumerates conditioned variables after the first one, depth-first.
Complex enumerate_rest(const SumPlan& p, Workspace& ws, std::size_t depth) {
  if (depth == p.conditioned.size()) return forest_sum(p, ws);
  const int var = p.conditioned[depth];
  long lo = 1, hi = p.N;
  for (const auto& e : p.edges) {
    int other = -1;
    if (e.u == var) other = e.v;
    if (e.v == var) other = e.u;
    if (other < 0) continue;
    auto pos = std::find(p.conditioned.begin(), p.conditioned.begin() + static_cast<std::ptrdiff_t>(depth), other);
    if (pos == p.conditioned.begin() + static_cast<std::ptrdiff_t>(depth)) continue;
    const DiffInterval iv = oriented(e, other);
    if (iv.lo != kNegInf) lo = std::max(lo, ws.value[other] + iv.lo);
    if (iv.hi != kPosInf) hi = std::min(hi, ws.value[other] + iv.hi);
  }
  Complex acc{0.0, 0.0};
  for (long t = lo; t <= hi; ++t) {
    ws.value[var] = t;
    acc += enumerate_rest(p, ws, depth + 1);
  }
  return acc;
}

Workspace make_workspace(const SumPlan& p) {
  Workspace ws;
  ws.f.assign(p.nvars, std::vector<Complex>(p.N + 2));
  ws.prefix.assign(p.N + 2, 0.0);
  ws.suffix.assign(p.N + 2, 0.0);
  ws.lo.assign(p.nvars, 1);
  ws.hi.assign(p.nvars, p.N);
  ws.value.assign(p.nvars, 0);
  return ws;
}

std::vector<Complex> power_table(Complex exponent, long N) {
  std::vector<Complex> t(N + 1, Complex{1.0, 0.0});
  t[0] = 0.0;
  if (exponent == Complex{0.0, 0.0}) return t;
  for (long x = 2; x <= N; ++x) t[x] = std::exp(-exponent * std::log(static_cast<double>(x)));
  return t;
}

// value(N) together with value(N/2) and any refinement cutoffs.
template <typename Fn>
EvalReport make_report(const TruncationPlan& plan, Fn&& eval) {
  plan.validate();
  EvalReport rep;
  rep.cutoff = plan.cutoff;
  std::vector<std::pair<long, Complex>> cache;
  auto value_at = [&](long n) {
    for (const auto& [m, v] : cache) {
      if (m == n) return v;
    }
    Complex v = eval(n);
    cache.push_back({n, v});
    return v;
  };
  for (long n : plan.refinements) rep.refinements.push_back({n, value_at(n)});
  rep.value = value_at(plan.cutoff);
  const long half = plan.cutoff / 2;
  rep.residual = half >= 1 ? std::abs(rep.value - value_at(half)) : std::abs(rep.value);
  return rep;
}

void require_W(const ComplexArgs& s, const EvalOptions& opts) {
  if (!opts.check_domain) return;
  for (const auto& c : w_conditions(s)) {
    if (!c.satisfied) throw DomainError("outside W: " + c.to_string());
  }
}

std::map<VarId, Complex> block_exponents(const ComplexArgs& s) {
  std::map<VarId, Complex> e;
  const Shape& shape = s.shape();
  for (int b = 1; b <= shape.blocks(); ++b) {
    for (int p = 1; p <= shape.depth(b); ++p) e[VarId::at(b, p)] = s.at(b, p);
  }
  return e;
}

void check_ij(const Shape& shape, int i, int j) {
  if (i < 1 || i > shape.blocks()) throw std::out_of_range("block index out of range");
  if (j < 1 || j > shape.depth(i)) throw std::out_of_range("position index out of range");
}

}  // namespace

// ---------------------------------------------------------------- engine

TruncationPlan TruncationPlan::with_refinements(std::vector<long> cutoffs) {
  TruncationPlan p;
  if (cutoffs.empty()) throw std::invalid_argument("refinement list is empty");
  p.cutoff = cutoffs.back();
  p.refinements = std::move(cutoffs);
  p.validate();
  return p;
}

void TruncationPlan::validate() const {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be positive");
  for (std::size_t k = 0; k < refinements.size(); ++k) {
    if (refinements[k] < 1) throw std::invalid_argument("refinement cutoffs must be positive");
    if (k && refinements[k] <= refinements[k - 1]) {
      throw std::invalid_argument("refinement cutoffs must be strictly increasing");
    }
  }
}

Complex sum_constrained(const ConstraintSystem& cs, const std::map<VarId, Complex>& exponents,
                        const std::optional<Coupling>& coupling, long cutoff, const EvalOptions& opts) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be positive");
  if (cutoff > opts.max_cutoff) {
    throw BudgetError("cutoff " + std::to_string(cutoff) + " exceeds cap " + std::to_string(opts.max_cutoff));
  }
  const auto vars = cs.variables();
  auto idx = [&](VarId v) {
    auto it = std::lower_bound(vars.begin(), vars.end(), v);
    if (it == vars.end() || *it != v) throw std::invalid_argument(v.to_string() + " is not a variable of the system");
    return static_cast<int>(it - vars.begin());
  };
  for (const auto& [v, e] : exponents) idx(v);

  SumPlan plan;
  plan.N = cutoff;
  plan.nvars = static_cast<int>(vars.size());

  std::optional<std::pair<VarId, VarId>> keep;
  if (coupling && coupling->a != coupling->b) keep = std::pair{coupling->a, coupling->b};
  const auto reduced = reduce_constraints(vars, cs.constraints(), keep);

  // Merge constraints per unordered pair into difference intervals.
  std::map<std::pair<int, int>, DiffInterval> pairs;
  for (const auto& c : reduced) {
    int a = idx(c.lhs), b = idx(c.rhs);
    const long gap = c.rel == Cmp::Less ? 1 : 0;
    if (a < b) {
      auto& iv = pairs[{a, b}];
      iv.lo = std::max(iv.lo, gap);
    } else {
      auto& iv = pairs[{b, a}];
      iv.hi = std::min(iv.hi, -gap);
    }
  }
  for (const auto& [key, iv] : pairs) {
    if (iv.empty()) return {0.0, 0.0};
    plan.edges.push_back({key.first, key.second, iv});
  }

  std::vector<int> seed;
  if (coupling) {
    plan.coupling = &*coupling;
    plan.coupling_a = idx(coupling->a);
    plan.coupling_b = idx(coupling->b);
    if (coupling->requires_separation) {
      if (plan.coupling_a == plan.coupling_b) throw InternalError("pole variables coincide");
      const int lo = std::min(plan.coupling_a, plan.coupling_b), hi = std::max(plan.coupling_a, plan.coupling_b);
      auto it = pairs.find({lo, hi});
      if (it == pairs.end() || (it->second.lo < 1 && it->second.hi > -1)) {
        throw InternalError("pole " + coupling->a.to_string() + ", " + coupling->b.to_string() +
                            " is not strictly separated by the constraint system");
      }
    }
  }
  if (coupling && plan.coupling_a != plan.coupling_b) {
    auto with_a = choose_conditioning(plan.nvars, plan.edges, {plan.coupling_a});
    auto with_b = choose_conditioning(plan.nvars, plan.edges, {plan.coupling_b});
    plan.conditioned = with_b.size() < with_a.size() ? with_b : with_a;
  } else {
    plan.conditioned = choose_conditioning(plan.nvars, plan.edges, {});
  }
  plan.is_conditioned.assign(plan.nvars, 0);
  for (int c : plan.conditioned) plan.is_conditioned[c] = 1;

  const double work = std::pow(static_cast<double>(cutoff), static_cast<double>(plan.conditioned.size()) + 1.0) *
                      static_cast<double>(plan.nvars);
  if (work > opts.max_work) {
    throw BudgetError("constrained sum needs about " + std::to_string(work) + " operations, cap is " +
                      std::to_string(opts.max_work));
  }

  plan.unary.resize(plan.nvars);
  for (int x = 0; x < plan.nvars; ++x) {
    auto it = exponents.find(vars[x]);
    plan.unary[x] = power_table(it == exponents.end() ? Complex{0.0, 0.0} : it->second, cutoff);
  }
  build_forest(plan);

  if (plan.conditioned.empty()) {
    Workspace ws = make_workspace(plan);
    return forest_sum(plan, ws);
  }

  // The outermost conditioned variable is split across threads; partial
  // sums are reduced in index order so the result is independent of the
  // thread count.
  const int outer = plan.conditioned.front();
  std::vector<Complex> partial(cutoff + 1, Complex{0.0, 0.0});
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(cutoff)));
  auto run = [&](unsigned worker) {
    Workspace ws = make_workspace(plan);
    for (long t = 1 + worker; t <= cutoff; t += threads) {
      ws.value[outer] = t;
      partial[t] = enumerate_rest(plan, ws, 1);
    }
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  Complex total{0.0, 0.0};
  for (long t = 1; t <= cutoff; ++t) total += partial[t];
  return total;
}

namespace {

Coupling pole_coupling(const std::vector<Pole>& poles, long cutoff) {
  const VarId num = poles.front().num_var, den = poles.front().den_var;
  for (const auto& p : poles) {
    if (p.num_var != num || p.den_var != den) throw std::invalid_argument("poles of one term must share variables");
  }
  if (num == den) throw std::invalid_argument("pole numerator and denominator variables must differ");
  auto logs = std::make_shared<std::vector<double>>(cutoff + 1, 0.0);
  for (long x = 1; x <= cutoff; ++x) (*logs)[x] = std::log(static_cast<double>(x));
  Coupling c;
  c.a = num;
  c.b = den;
  c.requires_separation = true;
  c.weight = [poles, logs](long a, long b) {
    if (a == b) throw InternalError("pole hit at an admitted lattice point");
    const double la = (*logs)[a], lb = (*logs)[b];
    Complex acc{0.0, 0.0};
    for (const auto& p : poles) acc += p.weight * std::exp(p.num_exp * la - p.den_exp * lb);
    return acc / static_cast<double>(b - a);
  };
  return c;
}

}  // namespace

EvalReport eval_constrained_sum(const ConstraintSystem& cs, const TermSpec& term, const TruncationPlan& plan,
                                const EvalOptions& opts) {
  return make_report(plan, [&](long n) {
    std::optional<Coupling> coupling;
    if (!term.poles.empty()) coupling = pole_coupling(term.poles, n);
    return sum_constrained(cs, term.exponents, coupling, n, opts);
  });
}

// ---------------------------------------------------------------- MZF

Complex mzf_partial_sum(const std::vector<Complex>& s, long cutoff) {
  if (s.empty()) throw std::invalid_argument("empty argument list");
  if (cutoff < 1) throw std::invalid_argument("cutoff must be positive");
  // level[n] = sum over n_1 < ... < n_k = n of the first k factors.
  std::vector<Complex> level = power_table(s[0], cutoff);
  for (std::size_t k = 1; k < s.size(); ++k) {
    auto w = power_table(s[k], cutoff);
    Complex below{0.0, 0.0};
    for (long n = 1; n <= cutoff; ++n) {
      const Complex here = level[n];
      level[n] = w[n] * below;
      below += here;
    }
  }
  Complex total{0.0, 0.0};
  for (long n = 1; n <= cutoff; ++n) total += level[n];
  return total;
}

EvalReport eval_mzf(const std::vector<Complex>& s, long cutoff, const EvalOptions& opts) {
  if (s.empty()) throw std::invalid_argument("empty argument list");
  if (cutoff > opts.max_cutoff) {
    throw BudgetError("cutoff " + std::to_string(cutoff) + " exceeds cap " + std::to_string(opts.max_cutoff));
  }
  for (const auto& c : ez_conditions(s)) {
    if (c.satisfied) continue;
    if (opts.check_domain) throw DomainError("outside the absolute-convergence domain: " + c.to_string());
    std::cerr << "warning: outside the absolute-convergence domain: " << c.to_string() << '\n';
    break;
  }
  return make_report(TruncationPlan(cutoff), [&](long n) { return mzf_partial_sum(s, n); });
}

// ---------------------------------------------------------------- zeta tilde

EvalReport eval_zeta_tilde(const ComplexArgs& s, int i, int j, TildeVariant variant, const TruncationPlan& plan,
                           const EvalOptions& opts) {
  const Shape& shape = s.shape();
  check_ij(shape, i, j);
  require_W(s, opts);
  const auto cs = build_constraints_S_ij(shape, i, j);
  const double delta = j == shape.depth(i) ? 1.0 : 0.0;

  TermSpec term;
  term.exponents = block_exponents(s);
  const VarId nij = VarId::at(i, j);
  // With delta = 1 the factor n_{i,r_i} is n_{i,j} itself.
  Pole first{nij, VarId::extra(), Complex{delta, 0.0}, Complex{delta, 0.0}, Complex{1.0, 0.0}};
  Pole second{nij, VarId::extra(), s.at(i, j), s.at(i, j), Complex{1.0, 0.0}};
  switch (variant) {
    case TildeVariant::First:
      term.poles = {first};
      break;
    case TildeVariant::Second:
      term.poles = {second};
      break;
    case TildeVariant::Diff:
      second.weight = Complex{-1.0, 0.0};
      term.poles = {first, second};
      break;
  }
  EvalOptions inner = opts;
  inner.check_domain = false;
  return eval_constrained_sum(cs, term, plan, inner);
}

double harmonic_range(long a, long b) {
  double acc = 0.0;
  for (long k = b; k >= std::max(a, 1L); --k) acc += 1.0 / static_cast<double>(k);
  return acc;
}

EvalReport eval_zeta_tilde_harmonic(const ComplexArgs& s, int i, int j, TildeVariant variant,
                                    const TruncationPlan& plan, const EvalOptions& opts) {
  const Shape& shape = s.shape();
  check_ij(shape, i, j);
  if (variant == TildeVariant::Diff) throw std::invalid_argument("harmonic path evaluates variants 1 and 2 only");
  require_W(s, opts);
  const int ri = shape.depth(i);
  const int prev = shape.wrap(i - 1);
  const int next = shape.wrap(i + 1);
  const auto exps = block_exponents(s);

  return make_report(plan, [&](long N) {
    // H[k] = 1 + 1/2 + ... + 1/k
    auto H = std::make_shared<std::vector<double>>(N + 2, 0.0);
    for (long k = 1; k <= N + 1; ++k) (*H)[k] = (*H)[k - 1] + 1.0 / static_cast<double>(k);
    auto range = [H](long lo, long hi) {
      lo = std::max(lo, 1L);
      return lo > hi ? 0.0 : (*H)[hi] - (*H)[lo - 1];
    };
    Coupling c;
    std::optional<ConstraintSystem> cs;
    if (variant == TildeVariant::First && j < ri) {
      cs = build_constraints_S(shape);
      c = {VarId::at(i, j), VarId::at(i, j + 1), [range](long a, long b) { return Complex{range(1, b - a - 1)}; }};
    } else if (variant == TildeVariant::First) {
      cs = build_constraints_T_i(shape, i);
      // a = n_{i,r_i}, b = n_{i-1,1}
      c = {VarId::at(i, ri), VarId::at(prev, 1),
           [range](long a, long b) { return Complex{range(std::max(1L, b - a), std::max(a, b - 1))}; }};
    } else if (j == 1) {
      cs = build_constraints_T_i(shape, next);
      // a = n_{i,1}, b = n_{i+1,r_{i+1}}
      c = {VarId::at(i, 1), VarId::at(next, shape.depth(next)),
           [range](long a, long b) { return Complex{range(std::max(1L, a - b), a - 1)}; }};
    } else {
      cs = build_constraints_S(shape);
      c = {VarId::at(i, j - 1), VarId::at(i, j), [range](long a, long b) { return Complex{range(1, b - a - 1)}; }};
    }
    EvalOptions inner = opts;
    return sum_constrained(*cs, exps, c, N, inner);
  });
}

EvalReport eval_zeta_C_i(const ComplexArgs& s, int i, const TruncationPlan& plan, const EvalOptions& opts) {
  require_W(s, opts);
  const auto cs = build_constraints_S_i(s.shape(), i);
  TermSpec term;
  term.exponents = block_exponents(s);
  term.exponents[VarId::extra()] = Complex{1.0, 0.0};
  return eval_constrained_sum(cs, term, plan, opts);
}

EvalReport eval_zeta_C(const ComplexArgs& s, const TruncationPlan& plan, const EvalOptions& opts) {
  require_W(s, opts);
  const auto cs = build_constraints_S(s.shape());
  TermSpec term;
  term.exponents = block_exponents(s);
  return eval_constrained_sum(cs, term, plan, opts);
}

TheoremReport eval_theorem_residual(const ComplexArgs& s, const TruncationPlan& plan, const EvalOptions& opts) {
  plan.validate();
  require_W(s, opts);
  EvalOptions inner = opts;
  inner.check_domain = false;
  const Shape& shape = s.shape();
  auto sample = [&](long N) {
    TheoremSample out;
    out.cutoff = N;
    const TruncationPlan single(N);
    for (int i = 1; i <= shape.blocks(); ++i) {
      for (int j = 1; j <= shape.depth(i); ++j) {
        const auto cs = build_constraints_S_ij(shape, i, j);
        const double delta = j == shape.depth(i) ? 1.0 : 0.0;
        TermSpec term;
        term.exponents = block_exponents(s);
        term.poles = {Pole{VarId::at(i, j), VarId::extra(), Complex{delta}, Complex{delta}, Complex{1.0}},
                      Pole{VarId::at(i, j), VarId::extra(), s.at(i, j), s.at(i, j), Complex{-1.0}}};
        out.lhs += sum_constrained(cs, term.exponents, pole_coupling(term.poles, N), N, inner);
      }
      const auto cs = build_constraints_S_i(shape, i);
      auto exps = block_exponents(s);
      exps[VarId::extra()] = Complex{1.0};
      out.rhs += sum_constrained(cs, exps, std::nullopt, N, inner);
    }
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
  };
  TheoremReport rep;
  rep.cutoff = plan.cutoff;
  bool have_top = false;
  for (long N : plan.refinements) {
    rep.refinements.push_back(sample(N));
    if (N == plan.cutoff) {
      rep.lhs = rep.refinements.back().lhs;
      rep.rhs = rep.refinements.back().rhs;
      rep.residual = rep.refinements.back().residual;
      have_top = true;
    }
  }
  if (!have_top) {
    auto top = sample(plan.cutoff);
    rep.lhs = top.lhs;
    rep.rhs = top.rhs;
    rep.residual = top.residual;
  }
  return rep;
}

// ---------------------------------------------------------------- MT, harmonic

Complex mordell_tornheim_partial_sum(Complex s1, Complex s2, Complex s3, long cutoff) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be positive");
  const auto a = power_table(s1, cutoff);
  const auto b = power_table(s2, cutoff);
  const auto c = power_table(s3, 2 * cutoff);
  Complex total{0.0, 0.0};
  for (long m = 1; m <= cutoff; ++m) {
    Complex row{0.0, 0.0};
    for (long n = 1; n <= cutoff; ++n) row += b[n] * c[m + n];
    total += a[m] * row;
  }
  return total;
}

EvalReport eval_mordell_tornheim(Complex s1, Complex s2, Complex s3, long cutoff, const EvalOptions& opts) {
  if (cutoff > opts.max_cutoff) {
    throw BudgetError("cutoff " + std::to_string(cutoff) + " exceeds cap " + std::to_string(opts.max_cutoff));
  }
  // Sufficient for absolute convergence; the engine only warns.
  const double r1 = s1.real(), r2 = s2.real(), r3 = s3.real();
  if (!(r1 + r3 > 1.0 && r2 + r3 > 1.0 && r1 + r2 + r3 > 2.0)) {
    std::cerr << "warning: Mordell-Tornheim arguments may be outside the region of absolute convergence\n";
  }
  return make_report(TruncationPlan(cutoff), [&](long n) { return mordell_tornheim_partial_sum(s1, s2, s3, n); });
}

Complex harmonic_relation_defect(Complex s1, Complex s2, long cutoff) {
  return mzf_partial_sum({s1}, cutoff) * mzf_partial_sum({s2}, cutoff) - mzf_partial_sum({s1, s2}, cutoff) -
         mzf_partial_sum({s2, s1}, cutoff) - mzf_partial_sum({s1 + s2}, cutoff);
}

double harmonic_relation_check(Complex s1, Complex s2, long cutoff) {
  return std::abs(harmonic_relation_defect(s1, s2, cutoff));
}

}  // namespace mzf

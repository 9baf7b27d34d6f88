#include "mzf/poset.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

#include "mzf/errors.hpp"

namespace mzf {

Composition::Composition(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("composition needs at least one part");
}

int Composition::weight() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

bool Composition::admissible() const {
  if (parts_.empty() || parts_.back() < 2) return false;
  return std::all_of(parts_.begin(), parts_.end(), [](int k) { return k >= 1; });
}

std::string Composition::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(parts_[k]);
  }
  return out;
}

Composition Composition::parse(std::string_view text) {
  std::vector<int> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto piece = text.substr(start, end - start);
    int v = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size() || v < 1) {
      throw ParseError("bad composition '" + std::string(text) + "'");
    }
    parts.push_back(v);
    start = end + 1;
  }
  return Composition(std::move(parts));
}

// ---------------------------------------------------------------- combination

void SymbolCombination::add(const Composition& c, const mpz_class& coeff) {
  if (!c.admissible()) {
    throw NonAdmissibleError("non-admissible symbol ζ(" + c.to_string() + ")", "");
  }
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(c, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

SymbolCombination& SymbolCombination::operator+=(const SymbolCombination& other) {
  for (const auto& [c, v] : other.terms_) add(c, v);
  return *this;
}

SymbolCombination& SymbolCombination::operator-=(const SymbolCombination& other) {
  for (const auto& [c, v] : other.terms_) add(c, -v);
  return *this;
}

SymbolCombination& SymbolCombination::operator*=(const mpz_class& factor) {
  if (factor == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [c, v] : terms_) v *= factor;
  return *this;
}

mpz_class SymbolCombination::coefficient(const Composition& c) const {
  auto it = terms_.find(c);
  return it == terms_.end() ? mpz_class(0) : it->second;
}

std::string SymbolCombination::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [c, v] : terms_) {
    mpz_class mag = abs(v);
    if (first) {
      if (v < 0) out += "-";
    } else {
      out += v < 0 ? " - " : " + ";
    }
    if (mag != 1) out += mag.get_str() + "*";
    out += "ζ(" + c.to_string() + ")";
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------- weak orders

std::string OrderedSetPartition::to_string() const {
  std::string out;
  for (const auto& level : levels) {
    out += "(";
    for (std::size_t k = 0; k < level.size(); ++k) {
      if (k) out += " ";
      out += level[k].to_string();
    }
    out += ")";
  }
  return out;
}

namespace {

using Mask = std::uint64_t;

struct PredMasks {
  std::vector<VarId> vars;
  std::vector<Mask> strict_pred;
  std::vector<Mask> weak_pred;
};

PredMasks pred_masks(const ConstraintSystem& cs) {
  PredMasks m;
  m.vars = cs.variables();
  if (m.vars.size() > 63) throw BudgetError("too many variables for weak-order enumeration");
  m.strict_pred.assign(m.vars.size(), 0);
  m.weak_pred.assign(m.vars.size(), 0);
  auto idx = [&](VarId v) { return std::lower_bound(m.vars.begin(), m.vars.end(), v) - m.vars.begin(); };
  for (const auto& c : cs.constraints()) {
    const auto a = idx(c.lhs), b = idx(c.rhs);
    (c.rel == Cmp::Less ? m.strict_pred : m.weak_pred)[b] |= Mask{1} << a;
  }
  return m;
}

void peel(const PredMasks& m, Mask remaining, std::vector<Mask>& levels, std::vector<OrderedSetPartition>& out) {
  if (remaining == 0) {
    OrderedSetPartition wo;
    for (Mask level : levels) {
      std::vector<VarId> vs;
      for (std::size_t k = 0; k < m.vars.size(); ++k) {
        if (level >> k & 1) vs.push_back(m.vars[k]);
      }
      wo.levels.push_back(std::move(vs));
    }
    out.push_back(std::move(wo));
    return;
  }
  Mask candidates = 0;
  for (std::size_t k = 0; k < m.vars.size(); ++k) {
    if ((remaining >> k & 1) && (m.strict_pred[k] & remaining) == 0) candidates |= Mask{1} << k;
  }
  // Submasks of `candidates` in increasing numeric order.
  for (Mask sub = (Mask{0} - candidates) & candidates; sub != 0; sub = (sub - candidates) & candidates) {
    bool closed = true;
    for (std::size_t k = 0; k < m.vars.size() && closed; ++k) {
      if ((sub >> k & 1) && (m.weak_pred[k] & remaining & ~sub) != 0) closed = false;
    }
    if (!closed) continue;
    levels.push_back(sub);
    peel(m, remaining & ~sub, levels, out);
    levels.pop_back();
  }
}

}  // namespace

std::vector<OrderedSetPartition> weak_orders(const ConstraintSystem& cs) {
  const auto m = pred_masks(cs);
  std::vector<OrderedSetPartition> out;
  std::vector<Mask> levels;
  const Mask all = m.vars.size() == 64 ? ~Mask{0} : (Mask{1} << m.vars.size()) - 1;
  peel(m, all, levels, out);
  return out;
}

Composition level_composition(const OrderedSetPartition& wo, const ExponentMap& e) {
  std::vector<int> parts;
  parts.reserve(wo.levels.size());
  for (const auto& level : wo.levels) {
    int sum = 0;
    for (const auto& v : level) {
      auto it = e.find(v);
      if (it == e.end()) throw std::invalid_argument("no exponent for " + v.to_string());
      sum += it->second;
    }
    parts.push_back(sum);
  }
  return Composition(std::move(parts));
}

SymbolCombination decompose_to_mzv(const std::vector<OrderedSetPartition>& orders, const ExponentMap& e) {
  for (const auto& [v, k] : e) {
    if (k < 0) throw std::invalid_argument("exponents must be nonnegative");
  }
  SymbolCombination out;
  for (const auto& wo : orders) {
    Composition c = level_composition(wo, e);
    if (!c.admissible()) {
      throw NonAdmissibleError("weak order " + wo.to_string() + " yields non-admissible ζ(" + c.to_string() + ")",
                               wo.to_string());
    }
    out.add(c, 1);
  }
  return out;
}

SymbolCombination decompose_to_mzv(const ConstraintSystem& cs, const ExponentMap& e) {
  for (const auto& v : cs.variables()) {
    if (!e.count(v)) throw std::invalid_argument("no exponent for " + v.to_string());
  }
  return decompose_to_mzv(weak_orders(cs), e);
}

// ---------------------------------------------------------------- counting

mpz_class count_lattice_points(const ConstraintSystem& cs, long N, long cap) {
  if (N > cap) throw BudgetError("counting oracle cutoff " + std::to_string(N) + " exceeds cap " + std::to_string(cap));
  if (N < 1) return 0;
  const auto vars = cs.variables();
  const std::size_t n = vars.size();
  auto idx = [&](VarId v) {
    return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
  };
  // Constraints checked once their later endpoint is assigned.
  std::vector<std::vector<Constraint>> due(n);
  for (const auto& c : cs.constraints()) due[std::max(idx(c.lhs), idx(c.rhs))].push_back(c);

  std::vector<long> x(n, 0);
  std::uint64_t count = 0;
  auto ok = [&](std::size_t k) {
    for (const auto& c : due[k]) {
      const long a = x[idx(c.lhs)], b = x[idx(c.rhs)];
      if (c.rel == Cmp::Less ? !(a < b) : !(a <= b)) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == n) {
      ++count;
      return;
    }
    for (long v = 1; v <= N; ++v) {
      x[k] = v;
      if (ok(k)) self(self, k + 1);
    }
  };
  rec(rec, 0);
  mpz_class out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(count), 0, 0, &count);
  return out;
}

mpz_class chain_count(int t, long N) {
  if (t < 1) throw std::invalid_argument("chain length must be positive");
  if (N < 0) return 0;
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(N), static_cast<unsigned long>(t));
  return out;
}

}  // namespace mzf

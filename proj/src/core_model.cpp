#include "mzf/core_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mzf/errors.hpp"

namespace mzf {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("not a real number: '" + std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view text) {
  text = trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string sub(int block, int pos) {
  return "s_{" + std::to_string(block) + "," + std::to_string(pos) + "}";
}

}  // namespace

// ---------------------------------------------------------------- Shape

Shape::Shape(std::vector<int> depths) : depths_(std::move(depths)) {
  if (depths_.empty()) throw std::invalid_argument("shape needs at least one block");
  for (int r : depths_) {
    if (r < 1) throw std::invalid_argument("block depths must be positive");
  }
  total_ = std::accumulate(depths_.begin(), depths_.end(), 0);
}

int Shape::depth(int block) const {
  if (block < 1 || block > blocks()) throw std::out_of_range("block index out of range");
  return depths_[block - 1];
}

bool Shape::all_singleton() const {
  return std::all_of(depths_.begin(), depths_.end(), [](int r) { return r == 1; });
}

int Shape::flat_index(int block, int pos) const {
  if (block < 1 || block > blocks()) throw std::out_of_range("block index out of range");
  if (pos < 1 || pos > depths_[block - 1]) throw std::out_of_range("position index out of range");
  int offset = 0;
  for (int b = 1; b < block; ++b) offset += depths_[b - 1];
  return offset + pos - 1;
}

int Shape::wrap(int block) const {
  const int d = blocks();
  return ((block - 1) % d + d) % d + 1;
}

std::string Shape::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < depths_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(depths_[i]);
  }
  return out;
}

Shape Shape::parse(std::string_view text) {
  text = trim(text);
  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), ';', ',');
  std::vector<int> depths;
  for (auto part : split(normalized, ',')) {
    int r = parse_int(part);
    if (r < 1) throw ParseError("block depths must be positive");
    depths.push_back(r);
  }
  return Shape(std::move(depths));
}

// ---------------------------------------------------------------- args

ComplexArgs::ComplexArgs(Shape shape, std::vector<Complex> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != shape_.total_depth()) {
    throw std::invalid_argument("argument count does not match shape");
  }
  for (const auto& z : values_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("arguments must be finite");
    }
  }
}

ComplexArgs ComplexArgs::conj() const {
  std::vector<Complex> v;
  v.reserve(values_.size());
  for (const auto& z : values_) v.push_back(std::conj(z));
  return {shape_, std::move(v)};
}

namespace {

template <typename T, typename ParseFn>
std::vector<T> parse_blocks(const Shape& shape, std::string_view text, ParseFn parse_one) {
  auto blocks = split(trim(text), ';');
  std::vector<T> values;
  if (blocks.size() == 1 || static_cast<int>(blocks.size()) == shape.blocks()) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto entries = split(blocks[b], ',');
      if (blocks.size() > 1 && static_cast<int>(entries.size()) != shape.depths()[b]) {
        throw ParseError("block " + std::to_string(b + 1) + " has " + std::to_string(entries.size()) +
                         " entries, shape expects " + std::to_string(shape.depths()[b]));
      }
      for (auto e : entries) values.push_back(parse_one(e));
    }
  } else {
    throw ParseError("argument has " + std::to_string(blocks.size()) + " blocks, shape has " +
                     std::to_string(shape.blocks()));
  }
  if (static_cast<int>(values.size()) != shape.total_depth()) {
    throw ParseError("expected " + std::to_string(shape.total_depth()) + " arguments, got " +
                     std::to_string(values.size()));
  }
  return values;
}

}  // namespace

ComplexArgs ComplexArgs::parse(const Shape& shape, std::string_view text) {
  return {shape, parse_blocks<Complex>(shape, text, [](std::string_view e) { return parse_complex(e); })};
}

std::string ComplexArgs::to_string() const {
  std::string out;
  int k = 0;
  for (int b = 1; b <= shape_.blocks(); ++b) {
    if (b > 1) out += ';';
    for (int p = 1; p <= shape_.depth(b); ++p) {
      if (p > 1) out += ',';
      out += format_complex(values_[k++]);
    }
  }
  return out;
}

IntArgs::IntArgs(Shape shape, std::vector<int> values) : shape_(std::move(shape)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != shape_.total_depth()) {
    throw std::invalid_argument("argument count does not match shape");
  }
  for (int v : values_) {
    if (v < 1) throw std::invalid_argument("integer arguments must be positive");
  }
  weight_ = std::accumulate(values_.begin(), values_.end(), 0);
}

ComplexArgs IntArgs::to_complex() const {
  std::vector<Complex> v(values_.begin(), values_.end());
  return {shape_, std::move(v)};
}

IntArgs IntArgs::parse(const Shape& shape, std::string_view text) {
  auto values = parse_blocks<int>(shape, text, [](std::string_view e) {
    int v = parse_int(e);
    if (v < 1) throw ParseError("integer arguments must be positive");
    return v;
  });
  return {shape, std::move(values)};
}

std::string IntArgs::to_string() const {
  std::string out;
  int k = 0;
  for (int b = 1; b <= shape_.blocks(); ++b) {
    if (b > 1) out += ';';
    for (int p = 1; p <= shape_.depth(b); ++p) {
      if (p > 1) out += ',';
      out += std::to_string(values_[k++]);
    }
  }
  return out;
}

// ---------------------------------------------------------------- constraints

std::string VarId::to_string() const {
  if (is_extra()) return "n";
  return "n_{" + std::to_string(block) + "," + std::to_string(pos) + "}";
}

std::string Constraint::to_string() const {
  return lhs.to_string() + (rel == Cmp::Less ? " < " : " <= ") + rhs.to_string();
}

bool operator<(const Constraint& a, const Constraint& b) {
  if (a.lhs != b.lhs) return a.lhs < b.lhs;
  if (a.rhs != b.rhs) return a.rhs < b.rhs;
  return a.rel < b.rel;
}

ConstraintSystem::ConstraintSystem(Shape shape, bool has_extra_var)
    : shape_(std::move(shape)), has_extra_(has_extra_var) {}

bool ConstraintSystem::valid_var(VarId v) const {
  if (v.is_extra()) return has_extra_ && v.pos == 0;
  return v.block >= 1 && v.block <= shape_.blocks() && v.pos >= 1 && v.pos <= shape_.depth(v.block);
}

void ConstraintSystem::add(VarId lhs, Cmp rel, VarId rhs) {
  if (!valid_var(lhs) || !valid_var(rhs)) {
    throw std::invalid_argument("constraint references a variable outside the system");
  }
  if (lhs == rhs) {
    if (rel == Cmp::LessEq) return;
    throw std::invalid_argument("constraint " + lhs.to_string() + " < itself is unsatisfiable");
  }
  Constraint strict{lhs, Cmp::Less, rhs};
  Constraint weak{lhs, Cmp::LessEq, rhs};
  if (contains(strict)) return;
  if (rel == Cmp::Less) {
    auto it = std::find(constraints_.begin(), constraints_.end(), weak);
    if (it != constraints_.end()) constraints_.erase(it);
  } else if (contains(weak)) {
    return;
  }
  Constraint c{lhs, rel, rhs};
  constraints_.insert(std::upper_bound(constraints_.begin(), constraints_.end(), c), c);
}

void ConstraintSystem::remove(const Constraint& c) {
  auto it = std::find(constraints_.begin(), constraints_.end(), c);
  if (it != constraints_.end()) constraints_.erase(it);
}

bool ConstraintSystem::contains(const Constraint& c) const {
  return std::binary_search(constraints_.begin(), constraints_.end(), c);
}

std::vector<VarId> ConstraintSystem::variables() const {
  std::vector<VarId> vars;
  for (int b = 1; b <= shape_.blocks(); ++b) {
    for (int p = 1; p <= shape_.depth(b); ++p) vars.push_back(VarId::at(b, p));
  }
  if (has_extra_) vars.push_back(VarId::extra());
  return vars;
}

bool ConstraintSystem::has_strict_cycle() const {
  auto vars = variables();
  const std::size_t n = vars.size();
  auto idx = [&](VarId v) {
    return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
  };
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a) reach[a][a] = 1;
  for (const auto& c : constraints_) reach[idx(c.lhs)][idx(c.rhs)] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t a = 0; a < n; ++a)
      if (reach[a][k])
        for (std::size_t b = 0; b < n; ++b)
          if (reach[k][b]) reach[a][b] = 1;
  for (const auto& c : constraints_) {
    if (c.rel == Cmp::Less && reach[idx(c.rhs)][idx(c.lhs)]) return true;
  }
  return false;
}

std::string ConstraintSystem::to_string() const {
  std::string out = "{";
  for (std::size_t k = 0; k < constraints_.size(); ++k) {
    if (k) out += ", ";
    out += constraints_[k].to_string();
  }
  return out + "}";
}

namespace {

void add_block_chains(ConstraintSystem& cs) {
  const auto& shape = cs.shape();
  for (int b = 1; b <= shape.blocks(); ++b) {
    for (int p = 1; p < shape.depth(b); ++p) cs.add(VarId::at(b, p), Cmp::Less, VarId::at(b, p + 1));
  }
}

// Cross-block link k: n_{k,1} <= n_{k+1, r_{k+1}} (cyclic).
Constraint link(const Shape& shape, int k) {
  const int next = shape.wrap(k + 1);
  return {VarId::at(k, 1), Cmp::LessEq, VarId::at(next, shape.depth(next))};
}

void add_links_except(ConstraintSystem& cs, int skipped) {
  for (int k = 1; k <= cs.shape().blocks(); ++k) {
    if (k == skipped) continue;
    auto c = link(cs.shape(), k);
    cs.add(c.lhs, c.rel, c.rhs);
  }
}

void check_block(const Shape& shape, int i) {
  if (i < 1 || i > shape.blocks()) throw std::out_of_range("block index out of range");
}

}  // namespace

ConstraintSystem build_constraints_S(const Shape& shape) {
  ConstraintSystem cs(shape, false);
  add_block_chains(cs);
  add_links_except(cs, 0);
  return cs;
}

ConstraintSystem build_constraints_S_ij(const Shape& shape, int i, int j) {
  check_block(shape, i);
  if (j < 1 || j > shape.depth(i)) throw std::out_of_range("position index out of range");
  const int prev = shape.wrap(i - 1);
  const int ri = shape.depth(i);
  const VarId n = VarId::extra();

  ConstraintSystem cs(shape, true);
  add_block_chains(cs);
  add_links_except(cs, prev);
  // n_{i-1,1} <= max{n_{i,r_i}, n}: the bounds on n decide which side wins.
  if (j < ri) {
    cs.add(VarId::at(prev, 1), Cmp::LessEq, VarId::at(i, ri));
  } else {
    cs.add(VarId::at(prev, 1), Cmp::LessEq, n);
  }
  cs.add(VarId::at(i, j), Cmp::Less, n);
  if (j < ri) cs.add(n, Cmp::Less, VarId::at(i, j + 1));
  return cs;
}

ConstraintSystem build_constraints_S_i(const Shape& shape, int i) {
  check_block(shape, i);
  const int next = shape.wrap(i + 1);
  ConstraintSystem cs(shape, true);
  add_block_chains(cs);
  add_links_except(cs, 0);
  cs.add(VarId::at(i, 1), Cmp::LessEq, VarId::extra());
  cs.add(VarId::extra(), Cmp::LessEq, VarId::at(next, shape.depth(next)));
  return cs;
}

ConstraintSystem build_constraints_T_i(const Shape& shape, int i) {
  check_block(shape, i);
  ConstraintSystem cs(shape, false);
  add_block_chains(cs);
  add_links_except(cs, shape.wrap(i - 1));
  return cs;
}

// ---------------------------------------------------------------- domains

DomainSpec DomainSpec::for_shape(const Shape& shape) {
  return {shape, shape.all_singleton() ? DomainKind::WAllSingleton : DomainKind::WGeneral};
}

std::string DomainCondition::to_string() const {
  const char* op = satisfied ? (strict ? " > " : " ≥ ") : (strict ? " ≤ " : " < ");
  return lhs_text + " = " + fmt_double(lhs_value) + op + fmt_double(threshold);
}

std::vector<DomainCondition> w_conditions(const ComplexArgs& s) {
  const Shape& shape = s.shape();
  std::vector<DomainCondition> out;
  auto push = [&](std::string text, double value, double threshold, bool strict) {
    bool ok = strict ? value > threshold : value >= threshold;
    out.push_back({std::move(text), value, threshold, strict, ok});
  };

  if (!shape.all_singleton()) {
    for (int i = 1; i <= shape.blocks(); ++i) {
      const int r = shape.depth(i);
      if (r == 1) {
        push("Re(" + sub(i, 1) + ")", s.at(i, 1).real(), 1.0, false);
        continue;
      }
      double acc = 0.0;
      std::string text;
      for (int t = 1; t <= r; ++t) {
        const int pos = r - t + 1;
        acc += s.at(i, pos).real();
        text = "Re(" + sub(i, pos) + ")" + (text.empty() ? "" : "+" + text);
        push(text, acc, static_cast<double>(t), true);
      }
    }
    return out;
  }

  const int d = shape.blocks();
  double total = 0.0;
  std::string text;
  for (int l = 1; l <= d; ++l) {
    total += s.at(l, 1).real();
    text += (l > 1 ? "+" : "") + std::string("Re(") + sub(l, 1) + ")";
  }
  push(text, total, static_cast<double>(d), true);
  for (int l = 1; l <= d; ++l) {
    double acc = 0.0;
    std::string window;
    for (int w = 0; w <= d - 2; ++w) {
      const int b = shape.wrap(l + w);
      acc += s.at(b, 1).real();
      window += (w > 0 ? "+" : "") + std::string("Re(") + sub(b, 1) + ")";
      push(window, acc, static_cast<double>(w), true);
    }
  }
  return out;
}

bool in_domain_W(const ComplexArgs& s) {
  auto conds = w_conditions(s);
  return std::all_of(conds.begin(), conds.end(), [](const DomainCondition& c) { return c.satisfied; });
}

std::vector<DomainCondition> ez_conditions(const std::vector<Complex>& s) {
  const int r = static_cast<int>(s.size());
  std::vector<DomainCondition> out;
  for (int l = r; l >= 1; --l) {
    double acc = 0.0;
    std::string text;
    for (int m = l; m <= r; ++m) {
      acc += s[m - 1].real();
      text += (m > l ? "+" : "") + std::string("Re(s_") + std::to_string(m) + ")";
    }
    const double threshold = static_cast<double>(r - l + 1);
    out.push_back({text, acc, threshold, true, acc > threshold});
  }
  return out;
}

bool in_domain_EZ_absolute(const std::vector<Complex>& s) {
  if (s.empty()) throw std::invalid_argument("empty argument list");
  auto conds = ez_conditions(s);
  return std::all_of(conds.begin(), conds.end(), [](const DomainCondition& c) { return c.satisfied; });
}

bool is_integer_point_in_W(const IntArgs& k) {
  const Shape& shape = k.shape();
  if (shape.all_singleton()) return k.weight() >= shape.blocks() + 1;
  for (int i = 1; i <= shape.blocks(); ++i) {
    const int r = shape.depth(i);
    if (r >= 2 && k.at(i, r) < 2) return false;
  }
  return true;
}

// ---------------------------------------------------------------- complex io

Complex parse_complex(std::string_view text) {
  std::string compact;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  }
  std::string_view t(compact);
  if (t.empty()) throw ParseError("empty complex number");
  if (t.back() != 'i') return {parse_double(t), 0.0};

  t.remove_suffix(1);
  // Split at the last sign that is not an exponent sign or the leading sign.
  std::size_t split_at = std::string_view::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  auto imag_of = [](std::string_view im) {
    if (im.empty() || im == "+") return 1.0;
    if (im == "-") return -1.0;
    return parse_double(im);
  };
  if (split_at == std::string_view::npos) return {0.0, imag_of(t)};
  return {parse_double(t.substr(0, split_at)), imag_of(t.substr(split_at))};
}

std::string format_complex(Complex z) {
  // Shortest text that reads back to the same doubles.
  char buf[64];
  char* p = std::to_chars(buf, buf + 30, z.real()).ptr;
  *p++ = std::signbit(z.imag()) ? '-' : '+';
  p = std::to_chars(p, buf + 62, std::abs(z.imag())).ptr;
  *p++ = 'i';
  return std::string(buf, p);
}

}  // namespace mzf

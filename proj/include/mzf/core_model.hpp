#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace mzf {

using Complex = std::complex<double>;

// Block structure (d; r_1, ..., r_d). Blocks and positions are 1-based in
// the public interface.
class Shape {
 public:
  explicit Shape(std::vector<int> depths);

  int blocks() const { return static_cast<int>(depths_.size()); }
  int depth(int block) const;
  int total_depth() const { return total_; }
  const std::vector<int>& depths() const { return depths_; }
  bool all_singleton() const;

  // Flat 0-based position of (block, pos), blocks laid out in order.
  int flat_index(int block, int pos) const;

  // Cyclic neighbour helpers: block 0 is block d, block d+1 is block 1.
  int wrap(int block) const;

  // "2,1"
  std::string to_string() const;
  // Accepts "," or ";" as separator.
  static Shape parse(std::string_view text);

  friend bool operator==(const Shape&, const Shape&) = default;
  friend auto operator<=>(const Shape&, const Shape&) = default;

 private:
  std::vector<int> depths_;
  int total_ = 0;
};

class ComplexArgs {
 public:
  ComplexArgs(Shape shape, std::vector<Complex> values);

  const Shape& shape() const { return shape_; }
  const std::vector<Complex>& values() const { return values_; }
  const Complex& at(int block, int pos) const { return values_[shape_.flat_index(block, pos)]; }
  ComplexArgs conj() const;

  // Blocks separated by ';', entries by ','. A flat list of total_depth
  // entries is also accepted.
  static ComplexArgs parse(const Shape& shape, std::string_view text);
  std::string to_string() const;

 private:
  Shape shape_;
  std::vector<Complex> values_;
};

class IntArgs {
 public:
  IntArgs(Shape shape, std::vector<int> values);

  const Shape& shape() const { return shape_; }
  const std::vector<int>& values() const { return values_; }
  int at(int block, int pos) const { return values_[shape_.flat_index(block, pos)]; }
  int weight() const { return weight_; }
  ComplexArgs to_complex() const;

  static IntArgs parse(const Shape& shape, std::string_view text);
  std::string to_string() const;

  friend bool operator==(const IntArgs&, const IntArgs&) = default;

 private:
  Shape shape_;
  std::vector<int> values_;
  int weight_ = 0;
};

// Summation variable: n_{block,pos}, or the auxiliary n.
struct VarId {
  static constexpr int kExtraBlock = std::numeric_limits<int>::max();

  int block = 0;
  int pos = 0;

  static constexpr VarId extra() { return {kExtraBlock, 0}; }
  static constexpr VarId at(int block, int pos) { return {block, pos}; }
  constexpr bool is_extra() const { return block == kExtraBlock; }
  std::string to_string() const;

  friend constexpr auto operator<=>(const VarId&, const VarId&) = default;
};

enum class Cmp { Less, LessEq };

struct Constraint {
  VarId lhs;
  Cmp rel = Cmp::Less;
  VarId rhs;

  std::string to_string() const;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

// Canonical ordering (lhs, rhs, rel).
bool operator<(const Constraint& a, const Constraint& b);

// Conjunction of order constraints among the variables of a shape (plus
// optionally n). Stored canonically: sorted, no tautologies, and a
// non-strict constraint is dropped when the strict one on the same pair is
// present.
class ConstraintSystem {
 public:
  ConstraintSystem(Shape shape, bool has_extra_var);

  void add(VarId lhs, Cmp rel, VarId rhs);
  void remove(const Constraint& c);

  const Shape& shape() const { return shape_; }
  bool has_extra_var() const { return has_extra_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  // All variables in canonical order (blocks in order, n last).
  std::vector<VarId> variables() const;
  bool contains(const Constraint& c) const;
  bool valid_var(VarId v) const;

  // True when some strict constraint lies on a cycle of the constraint
  // digraph, i.e. the domain is empty.
  bool has_strict_cycle() const;

  // "{n_{1,1} < n_{1,2}, ...}"
  std::string to_string() const;

  friend bool operator==(const ConstraintSystem&, const ConstraintSystem&) = default;

 private:
  Shape shape_;
  bool has_extra_;
  std::vector<Constraint> constraints_;
};

ConstraintSystem build_constraints_S(const Shape& shape);
ConstraintSystem build_constraints_S_ij(const Shape& shape, int i, int j);
ConstraintSystem build_constraints_S_i(const Shape& shape, int i);
ConstraintSystem build_constraints_T_i(const Shape& shape, int i);

enum class DomainKind { WGeneral, WAllSingleton, EZAbsolute };

struct DomainSpec {
  Shape shape;
  DomainKind kind;

  static DomainSpec for_shape(const Shape& shape);
};

// One inequality of a domain definition, evaluated at a point.
struct DomainCondition {
  std::string lhs_text;  // e.g. "Re(s_{1,1})+Re(s_{1,2})"
  double lhs_value = 0.0;
  double threshold = 0.0;
  bool strict = true;
  bool satisfied = false;

  double margin() const { return lhs_value - threshold; }
  std::string to_string() const;
};

std::vector<DomainCondition> w_conditions(const ComplexArgs& s);
bool in_domain_W(const ComplexArgs& s);

std::vector<DomainCondition> ez_conditions(const std::vector<Complex>& s);
bool in_domain_EZ_absolute(const std::vector<Complex>& s);

bool is_integer_point_in_W(const IntArgs& k);

Complex parse_complex(std::string_view text);
std::string format_complex(Complex z);

}  // namespace mzf

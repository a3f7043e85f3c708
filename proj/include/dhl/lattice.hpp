#pragma once

// Finitely supported real sequences on Z^n stored as dense row-major boxes,
// discrete cubes in the sup-norm, multi-indices and lattice norms.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dhl {

/// Raised when an argument is outside the domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Point = std::vector<std::int64_t>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Axis-aligned lattice box origin + [0, shape).
struct Box {
  Point origin;
  Point shape;

  Box() = default;
  Box(Point origin_, Point shape_);

  int dim() const { return static_cast<int>(origin.size()); }
  std::size_t volume() const;
  bool contains(std::span<const std::int64_t> p) const;
  /// Row-major offset of p; p must lie inside the box.
  std::size_t flat_index(std::span<const std::int64_t> p) const;
  Point point_at(std::size_t flat) const;
  /// Last point (origin + shape - 1).
  Point upper() const;

  bool operator==(const Box&) const = default;
};

/// Smallest box containing both.
Box covering_box(const Box& a, const Box& b);

/// Box with the same center whose extents are grown by a factor `factor`
/// (>= 1). The growth per axis is made even so the result stays centered.
Box dilate_box(const Box& b, double factor);

/// Row-major strides of a shape (last axis fastest).
std::vector<std::size_t> strides_of(std::span<const std::int64_t> shape);

class LatticeSeq {
 public:
  LatticeSeq() = default;
  /// Validates length and finiteness of `values`.
  LatticeSeq(Box box, std::vector<double> values);

  static LatticeSeq zeros(Box box);
  /// Unit impulse at `at`.
  static LatticeSeq delta(const Point& at);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  const Point& origin() const { return box_.origin; }
  const Point& shape() const { return box_.shape; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  /// Value at p; exactly 0 outside the stored box.
  double at(std::span<const std::int64_t> p) const;
  double operator[](std::size_t flat) const { return values_[flat]; }

  /// True when every stored value is zero.
  bool is_zero() const;

  bool operator==(const LatticeSeq&) const = default;

 private:
  Box box_;
  std::vector<double> values_;
};

/// a*x + y on the covering box of both inputs.
LatticeSeq seq_axpy(double a, const LatticeSeq& x, const LatticeSeq& y);

LatticeSeq scale(double a, const LatticeSeq& x);

/// Absolute values, same box.
LatticeSeq abs(const LatticeSeq& x);

/// result(j) = b(j - v). Only the origin moves.
LatticeSeq translate(const LatticeSeq& b, std::span<const std::int64_t> v);

/// Copy of b restricted/zero-extended onto `box`.
LatticeSeq restrict_to(const LatticeSeq& b, const Box& box);

/// (sum |b(i)|^p)^(1/p) for finite p > 0, sup |b(i)| for p = infinity.
double lp_norm(const LatticeSeq& b, double p);

/// Same as lp_norm on a raw span of values.
double lp_norm(std::span<const double> values, double p);

/// Discrete cube Q_{center, radius} = { i : |i - center|_inf <= radius }.
struct DiscreteCube {
  Point center;
  std::int64_t radius = 0;

  DiscreteCube() = default;
  DiscreteCube(Point center_, std::int64_t radius_);

  int dim() const { return static_cast<int>(center.size()); }
  /// (2m+1)^n.
  double cardinality() const;
  bool contains(std::span<const std::int64_t> p) const;
  Box box() const;

  bool operator==(const DiscreteCube&) const = default;
};

std::int64_t sup_norm(std::span<const std::int64_t> v);
/// |v|^2 in the Euclidean norm, exact for lattice points.
std::int64_t squared_norm(std::span<const std::int64_t> v);

/// beta = (beta_1, ..., beta_n) with non-negative components.
struct MultiIndex {
  std::vector<int> components;

  int order() const;
  /// p^beta with 0^0 = 1.
  double monomial(std::span<const std::int64_t> p) const;
  double monomial(std::span<const double> x) const;
};

/// Every beta in n variables with order <= max_order, graded then
/// lexicographic. There are binomial(max_order + n, n) of them.
std::vector<MultiIndex> multi_indices_up_to(int n, int max_order);

/// (n, alpha, p, q) with 1/q = 1/p - alpha/n, 0 < alpha < n, 0 < p <= 1.
struct ExponentSet {
  int n = 1;
  double alpha = 0.5;
  double p = 1.0;
  double q = 2.0;

  static ExponentSet make(int n, double alpha, double p);
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace dhl

#include "dhl/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace dhl {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DomainError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                      " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Box::Box(Point origin_, Point shape_) : origin(std::move(origin_)), shape(std::move(shape_)) {
  if (origin.size() != shape.size()) throw DomainError("Box: origin/shape length mismatch");
  if (origin.empty()) throw DomainError("Box: dimension must be positive");
  for (auto s : shape) {
    if (s <= 0) throw DomainError("Box: extents must be positive");
  }
}

std::size_t Box::volume() const {
  std::size_t v = 1;
  for (auto s : shape) v *= static_cast<std::size_t>(s);
  return v;
}

bool Box::contains(std::span<const std::int64_t> p) const {
  if (p.size() != origin.size()) return false;
  for (std::size_t l = 0; l < p.size(); ++l) {
    if (p[l] < origin[l] || p[l] >= origin[l] + shape[l]) return false;
  }
  return true;
}

std::size_t Box::flat_index(std::span<const std::int64_t> p) const {
  std::size_t idx = 0;
  for (std::size_t l = 0; l < origin.size(); ++l) {
    idx = idx * static_cast<std::size_t>(shape[l]) + static_cast<std::size_t>(p[l] - origin[l]);
  }
  return idx;
}

Point Box::point_at(std::size_t flat) const {
  Point p(origin.size());
  for (std::size_t l = origin.size(); l-- > 0;) {
    const auto s = static_cast<std::size_t>(shape[l]);
    p[l] = origin[l] + static_cast<std::int64_t>(flat % s);
    flat /= s;
  }
  return p;
}

Point Box::upper() const {
  Point u(origin.size());
  for (std::size_t l = 0; l < origin.size(); ++l) u[l] = origin[l] + shape[l] - 1;
  return u;
}

Box covering_box(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "covering_box");
  Point o(a.origin.size()), s(a.origin.size());
  for (std::size_t l = 0; l < o.size(); ++l) {
    o[l] = std::min(a.origin[l], b.origin[l]);
    const auto hi = std::max(a.origin[l] + a.shape[l], b.origin[l] + b.shape[l]);
    s[l] = hi - o[l];
  }
  return Box(std::move(o), std::move(s));
}

Box dilate_box(const Box& b, double factor) {
  if (!(factor >= 1.0) || !std::isfinite(factor)) throw DomainError("dilate_box: factor must be >= 1");
  Point o(b.origin), s(b.shape);
  for (std::size_t l = 0; l < o.size(); ++l) {
    const double extra = (factor - 1.0) * static_cast<double>(b.shape[l]);
    const auto half = static_cast<std::int64_t>(std::ceil(extra / 2.0 - 1e-9));
    o[l] -= half;
    s[l] += 2 * half;
  }
  return Box(std::move(o), std::move(s));
}

std::vector<std::size_t> strides_of(std::span<const std::int64_t> shape) {
  std::vector<std::size_t> st(shape.size());
  std::size_t acc = 1;
  for (std::size_t l = shape.size(); l-- > 0;) {
    st[l] = acc;
    acc *= static_cast<std::size_t>(shape[l]);
  }
  return st;
}

LatticeSeq::LatticeSeq(Box box, std::vector<double> values)
    : box_(std::move(box)), values_(std::move(values)) {
  if (values_.size() != box_.volume()) {
    throw DomainError("LatticeSeq: " + std::to_string(values_.size()) + " values for a box of volume " +
                      std::to_string(box_.volume()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("LatticeSeq: non-finite value");
  }
}

LatticeSeq LatticeSeq::zeros(Box box) {
  const auto v = box.volume();
  return LatticeSeq(std::move(box), std::vector<double>(v, 0.0));
}

LatticeSeq LatticeSeq::delta(const Point& at) {
  return LatticeSeq(Box(at, Point(at.size(), 1)), {1.0});
}

double LatticeSeq::at(std::span<const std::int64_t> p) const {
  if (!box_.contains(p)) return 0.0;
  return values_[box_.flat_index(p)];
}

bool LatticeSeq::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

LatticeSeq restrict_to(const LatticeSeq& b, const Box& box) {
  require_same_dim(b.dim(), box.dim(), "restrict_to");
  std::vector<double> out(box.volume(), 0.0);
  const int n = box.dim();
  // Walk the intersection row by row along the last axis.
  Point lo(n), hi(n);
  for (int l = 0; l < n; ++l) {
    lo[l] = std::max(b.origin()[l], box.origin[l]);
    hi[l] = std::min(b.origin()[l] + b.shape()[l], box.origin[l] + box.shape[l]);
    if (lo[l] >= hi[l]) return LatticeSeq(box, std::move(out));
  }
  Point p = lo;
  const auto run = static_cast<std::size_t>(hi[n - 1] - lo[n - 1]);
  while (true) {
    const auto src = b.box().flat_index(p);
    const auto dst = box.flat_index(p);
    std::copy_n(b.values().begin() + static_cast<std::ptrdiff_t>(src), run,
                out.begin() + static_cast<std::ptrdiff_t>(dst));
    int l = n - 2;
    for (; l >= 0; --l) {
      if (++p[l] < hi[l]) break;
      p[l] = lo[l];
    }
    if (l < 0) break;
  }
  return LatticeSeq(box, std::move(out));
}

LatticeSeq seq_axpy(double a, const LatticeSeq& x, const LatticeSeq& y) {
  require_same_dim(x.dim(), y.dim(), "seq_axpy");
  const Box box = covering_box(x.box(), y.box());
  const LatticeSeq xe = restrict_to(x, box);
  const LatticeSeq ye = restrict_to(y, box);
  std::vector<double> out(box.volume());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * xe[k] + ye[k];
  return LatticeSeq(box, std::move(out));
}

LatticeSeq scale(double a, const LatticeSeq& x) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (auto& v : out) v *= a;
  return LatticeSeq(x.box(), std::move(out));
}

LatticeSeq abs(const LatticeSeq& x) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (auto& v : out) v = std::fabs(v);
  return LatticeSeq(x.box(), std::move(out));
}

LatticeSeq translate(const LatticeSeq& b, std::span<const std::int64_t> v) {
  require_same_dim(b.dim(), static_cast<int>(v.size()), "translate");
  Point o = b.origin();
  for (std::size_t l = 0; l < o.size(); ++l) o[l] += v[l];
  return LatticeSeq(Box(std::move(o), b.shape()), std::vector<double>(b.values().begin(), b.values().end()));
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double lp_norm(std::span<const double> values, double p) {
  if (!(p > 0.0)) throw DomainError("lp_norm: p must be positive");
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::fabs(v));
  if (p == kInfinity || peak == 0.0) return peak;
  // Scale by the peak so |v|^p neither overflows nor underflows, and carry
  // the ratios, the sum and the root in extended precision so the result is
  // rounded essentially once.
  const long double lpeak = peak;
  const long double lp = p;
  long double sum = 0.0L, comp = 0.0L;
  for (double v : values) {
    if (v == 0.0) continue;
    const long double r = std::fabs(static_cast<long double>(v)) / lpeak;
    const long double term = p == 1.0 ? r : p == 2.0 ? r * r : std::pow(r, lp);
    const long double t = sum + term;
    comp += (std::fabs(sum) >= term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  sum += comp;
  const long double root = p == 1.0 ? sum : p == 2.0 ? std::sqrt(sum) : std::pow(sum, 1.0L / lp);
  return static_cast<double>(lpeak * root);
}

double lp_norm(const LatticeSeq& b, double p) { return lp_norm(b.values(), p); }

DiscreteCube::DiscreteCube(Point center_, std::int64_t radius_) : center(std::move(center_)), radius(radius_) {
  if (center.empty()) throw DomainError("DiscreteCube: dimension must be positive");
  if (radius < 0) throw DomainError("DiscreteCube: radius must be non-negative");
}

double DiscreteCube::cardinality() const {
  return std::pow(static_cast<double>(2 * radius + 1), static_cast<double>(center.size()));
}

bool DiscreteCube::contains(std::span<const std::int64_t> p) const {
  if (p.size() != center.size()) return false;
  for (std::size_t l = 0; l < p.size(); ++l) {
    if (std::llabs(p[l] - center[l]) > radius) return false;
  }
  return true;
}

Box DiscreteCube::box() const {
  Point o(center.size()), s(center.size(), 2 * radius + 1);
  for (std::size_t l = 0; l < o.size(); ++l) o[l] = center[l] - radius;
  return Box(std::move(o), std::move(s));
}

std::int64_t sup_norm(std::span<const std::int64_t> v) {
  std::int64_t m = 0;
  for (auto x : v) m = std::max<std::int64_t>(m, std::llabs(x));
  return m;
}

std::int64_t squared_norm(std::span<const std::int64_t> v) {
  std::int64_t s = 0;
  for (auto x : v) s += x * x;
  return s;
}

int MultiIndex::order() const {
  int s = 0;
  for (int b : components) s += b;
  return s;
}

double MultiIndex::monomial(std::span<const std::int64_t> p) const {
  double r = 1.0;
  for (std::size_t l = 0; l < components.size(); ++l) {
    for (int e = 0; e < components[l]; ++e) r *= static_cast<double>(p[l]);
  }
  return r;
}

double MultiIndex::monomial(std::span<const double> x) const {
  double r = 1.0;
  for (std::size_t l = 0; l < components.size(); ++l) {
    for (int e = 0; e < components[l]; ++e) r *= x[l];
  }
  return r;
}

std::vector<MultiIndex> multi_indices_up_to(int n, int max_order) {
  if (n <= 0) throw DomainError("multi_indices_up_to: dimension must be positive");
  std::vector<MultiIndex> out;
  if (max_order < 0) return out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  for (int order = 0; order <= max_order; ++order) {
    // All compositions of `order` into n parts, lexicographically descending
    // in the first component.
    auto rec = [&](auto&& self, int l, int left) -> void {
      if (l == n - 1) {
        cur[static_cast<std::size_t>(l)] = left;
        out.push_back(MultiIndex{cur});
        return;
      }
      for (int b = left; b >= 0; --b) {
        cur[static_cast<std::size_t>(l)] = b;
        self(self, l + 1, left - b);
      }
    };
    rec(rec, 0, order);
  }
  return out;
}

ExponentSet ExponentSet::make(int n, double alpha, double p) {
  if (n <= 0) throw DomainError("ExponentSet: n must be positive");
  if (!(alpha > 0.0 && alpha < n)) throw DomainError("ExponentSet: alpha must lie in (0, n)");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("ExponentSet: p must lie in (0, 1]");
  ExponentSet e;
  e.n = n;
  e.alpha = alpha;
  e.p = p;
  e.q = 1.0 / (1.0 / p - alpha / n);
  return e;
}

}  // namespace dhl

#include "dhl/operators.hpp"

#include <algorithm>
#include <cmath>

#include "dhl/fft.hpp"
#include "dhl/parallel.hpp"

namespace dhl {

namespace {

void check_riesz_alpha(double alpha, int n, const char* what) {
  if (!(alpha > 0.0 && alpha < static_cast<double>(n))) {
    throw DomainError(std::string(what) + ": alpha must lie in (0, n)");
  }
}

void check_dims(int a, int b, const char* what) {
  if (a != b) throw DomainError(std::string(what) + ": dimension mismatch");
}

std::int64_t iabs(std::int64_t x) { return x < 0 ? -x : x; }

}  // namespace

double riesz_kernel(std::int64_t squared_length, double alpha, int n) {
  if (squared_length == 0) return 0.0;
  return std::pow(static_cast<double>(squared_length), 0.5 * (alpha - static_cast<double>(n)));
}

Box offset_box(const Box& in, const Box& out) {
  check_dims(in.dim(), out.dim(), "offset_box");
  Point o(in.origin.size()), s(in.origin.size());
  for (std::size_t l = 0; l < o.size(); ++l) {
    o[l] = out.origin[l] - in.origin[l] - in.shape[l] + 1;
    s[l] = in.shape[l] + out.shape[l] - 1;
  }
  return Box(std::move(o), std::move(s));
}

KernelTable KernelTable::build(double alpha, const Box& offsets) {
  const int n = offsets.dim();
  check_riesz_alpha(alpha, n, "KernelTable");
  std::vector<double> vals(offsets.volume());
  parallel_for(vals.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const Point v = offsets.point_at(k);
      vals[k] = riesz_kernel(squared_norm(v), alpha, n);
    }
  });
  return KernelTable{alpha, LatticeSeq(offsets, std::move(vals))};
}

LatticeSeq riesz_apply(const LatticeSeq& b, double alpha, const Box& out_box, RieszMethod method) {
  const int n = b.dim();
  check_dims(n, out_box.dim(), "riesz_apply");
  check_riesz_alpha(alpha, n, "riesz_apply");
  const Box offs = offset_box(b.box(), out_box);
  const KernelTable kernel = KernelTable::build(alpha, offs);

  if (method == RieszMethod::fft) {
    ValidConvolution conv(b.shape(), out_box.shape);
    const Spectrum in = conv.input_spectrum(b.values());
    const Spectrum ker = conv.kernel_spectrum(kernel.table.values());
    return LatticeSeq(out_box, conv.apply(in, ker));
  }

  // Direct: table index of (j - i) is tj(j) - ti(i).
  const auto ts = strides_of(offs.shape);
  std::vector<std::pair<std::ptrdiff_t, double>> terms;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (b[k] == 0.0) continue;
    const Point i = b.box().point_at(k);
    std::ptrdiff_t ti = 0;
    for (int l = 0; l < n; ++l) ti += static_cast<std::ptrdiff_t>((i[l] - b.origin()[l]) * static_cast<std::int64_t>(ts[l]));
    terms.emplace_back(ti, b[k]);
  }
  const auto table = kernel.table.values();
  std::vector<double> out(out_box.volume(), 0.0);
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Point j = out_box.point_at(k);
      std::ptrdiff_t tj = 0;
      for (int l = 0; l < n; ++l) {
        tj += static_cast<std::ptrdiff_t>((j[l] - out_box.origin[l] + b.shape()[l] - 1) * static_cast<std::int64_t>(ts[l]));
      }
      double acc = 0.0;
      for (const auto& [ti, v] : terms) acc += v * table[static_cast<std::size_t>(tj - ti)];
      out[k] = acc;
    }
  }, 16);
  return LatticeSeq(out_box, std::move(out));
}

LatticeSeq convolve(const LatticeSeq& b, const LatticeSeq& c) {
  const int n = b.dim();
  check_dims(n, c.dim(), "convolve");
  Point o(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    o[l] = b.origin()[l] + c.origin()[l];
    s[l] = b.shape()[l] + c.shape()[l] - 1;
  }
  const Box out_box(std::move(o), std::move(s));
  std::vector<double> out(out_box.volume(), 0.0);
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    Point i(static_cast<std::size_t>(n)), lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n)),
        d(static_cast<std::size_t>(n));
    for (std::size_t k = begin; k < end; ++k) {
      const Point j = out_box.point_at(k);
      // i ranges over b's box intersected with j - c's box.
      bool empty = false;
      for (int l = 0; l < n; ++l) {
        lo[l] = std::max(b.origin()[l], j[l] - (c.origin()[l] + c.shape()[l] - 1));
        hi[l] = std::min(b.origin()[l] + b.shape()[l] - 1, j[l] - c.origin()[l]);
        if (lo[l] > hi[l]) empty = true;
      }
      if (empty) continue;
      double acc = 0.0;
      i = lo;
      while (true) {
        for (int l = 0; l < n; ++l) d[l] = j[l] - i[l];
        acc += b.at(i) * c.at(d);
        int l = n - 1;
        for (; l >= 0; --l) {
          if (++i[l] <= hi[l]) break;
          i[l] = lo[l];
        }
        if (l < 0) break;
      }
      out[k] = acc;
    }
  }, 16);
  return LatticeSeq(out_box, std::move(out));
}

namespace {

// Prefix sums of |b| over a box padded by one leading zero slab per axis, in
// extended precision so inclusion-exclusion keeps ~1e-16 relative accuracy.
class SummedAreaTable {
 public:
  explicit SummedAreaTable(const LatticeSeq& b) : n_(b.dim()), shape_(b.shape()) {
    Point padded(shape_);
    for (auto& s : padded) s += 1;
    strides_ = strides_of(padded);
    std::size_t vol = 1;
    for (auto s : padded) vol *= static_cast<std::size_t>(s);
    table_.assign(vol, 0.0L);
    for (std::size_t k = 0; k < b.size(); ++k) {
      const Point p = b.box().point_at(k);
      std::size_t off = 0;
      for (int l = 0; l < n_; ++l) off += static_cast<std::size_t>(p[l] - b.origin()[l] + 1) * strides_[l];
      table_[off] = std::fabs(static_cast<long double>(b[k]));
    }
    // One cumulative pass per axis.
    for (int axis = 0; axis < n_; ++axis) {
      const std::size_t st = strides_[axis];
      const auto ext = static_cast<std::size_t>(padded[axis]);
      for (std::size_t off = 0; off < vol; ++off) {
        const std::size_t coord = (off / st) % ext;
        if (coord > 0) table_[off] += table_[off - st];
      }
    }
  }

  /// Sum over the inclusive index ranges [lo, hi] (box-relative).
  long double sum(std::span<const std::int64_t> lo, std::span<const std::int64_t> hi) const {
    long double acc = 0.0L;
    const unsigned corners = 1u << n_;
    for (unsigned mask = 0; mask < corners; ++mask) {
      std::size_t off = 0;
      int lows = 0;
      for (int l = 0; l < n_; ++l) {
        if (mask & (1u << l)) {
          off += static_cast<std::size_t>(lo[l]) * strides_[l];
          ++lows;
        } else {
          off += static_cast<std::size_t>(hi[l] + 1) * strides_[l];
        }
      }
      acc += (lows % 2 == 0) ? table_[off] : -table_[off];
    }
    return acc;
  }

 private:
  int n_;
  Point shape_;
  std::vector<std::size_t> strides_;
  std::vector<long double> table_;
};

long double direct_cube_sum(const LatticeSeq& b, std::span<const std::int64_t> lo, std::span<const std::int64_t> hi) {
  const int n = b.dim();
  Point p(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) p[l] = b.origin()[l] + lo[l];
  long double acc = 0.0L;
  while (true) {
    acc += std::fabs(static_cast<long double>(b.at(p)));
    int l = n - 1;
    for (; l >= 0; --l) {
      if (++p[l] <= b.origin()[l] + hi[l]) break;
      p[l] = b.origin()[l] + lo[l];
    }
    if (l < 0) break;
  }
  return acc;
}

}  // namespace

LatticeSeq frac_maximal(const LatticeSeq& b, double alpha, const Box& out_box) {
  const int n = b.dim();
  check_dims(n, out_box.dim(), "frac_maximal");
  if (!(alpha >= 0.0 && alpha < static_cast<double>(n))) {
    throw DomainError("frac_maximal: alpha must lie in [0, n)");
  }
  const bool use_table = n <= 3;
  std::unique_ptr<SummedAreaTable> sat;
  if (use_table) sat = std::make_unique<SummedAreaTable>(b);

  const Point lo_b = b.origin();
  const Point hi_b = b.box().upper();
  std::int64_t reach = 0;
  for (int l = 0; l < n; ++l) {
    reach = std::max({reach, iabs(out_box.origin[l] - lo_b[l]), iabs(out_box.origin[l] - hi_b[l]),
                      iabs(out_box.origin[l] + out_box.shape[l] - 1 - lo_b[l]),
                      iabs(out_box.origin[l] + out_box.shape[l] - 1 - hi_b[l])});
  }
  std::vector<double> weight(static_cast<std::size_t>(reach) + 1);
  for (std::size_t m = 0; m < weight.size(); ++m) {
    weight[m] = std::pow(static_cast<double>(2 * m + 1), alpha - static_cast<double>(n));
  }
  long double total_ld = 0.0L;
  for (double v : b.values()) total_ld += std::fabs(static_cast<long double>(v));
  const double total = static_cast<double>(total_ld);

  std::vector<double> out(out_box.volume(), 0.0);
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    Point lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (std::size_t k = begin; k < end; ++k) {
      const Point j = out_box.point_at(k);
      std::int64_t m_min = 0, m_max = 0;
      for (int l = 0; l < n; ++l) {
        m_min = std::max({m_min, lo_b[l] - j[l], j[l] - hi_b[l]});
        m_max = std::max({m_max, iabs(j[l] - lo_b[l]), iabs(j[l] - hi_b[l])});
      }
      // The m = 0 cube is {j}: its value is |b(j)| exactly.
      double best = std::fabs(b.at(j));
      for (std::int64_t m = std::max<std::int64_t>(1, m_min); m <= m_max; ++m) {
        const double w = weight[static_cast<std::size_t>(m)];
        // The cube sum never exceeds the total mass and w decreases in m.
        if (total * w <= best) break;
        for (int l = 0; l < n; ++l) {
          lo[l] = std::max(j[l] - m, lo_b[l]) - lo_b[l];
          hi[l] = std::min(j[l] + m, hi_b[l]) - lo_b[l];
        }
        const long double s = use_table ? sat->sum(lo, hi) : direct_cube_sum(b, lo, hi);
        best = std::max(best, static_cast<double>(s) * w);
      }
      out[k] = best;
    }
  }, 16);
  return LatticeSeq(out_box, std::move(out));
}

LatticeSeq hl_maximal(const LatticeSeq& b, const Box& out_box) { return frac_maximal(b, 0.0, out_box); }

double kernel_sum(std::span<const std::int64_t> k, const DiscreteCube& cube, double alpha) {
  const int n = cube.dim();
  check_dims(n, static_cast<int>(k.size()), "kernel_sum");
  check_riesz_alpha(alpha, n, "kernel_sum");
  const double expo = 0.5 * (alpha - static_cast<double>(n));
  // Offsets i - k over the cube, iterated row-major.
  Point lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    lo[l] = cube.center[l] - cube.radius - k[l];
    hi[l] = cube.center[l] + cube.radius - k[l];
  }
  CompensatedSum acc;
  d = lo;
  if (n == 1) {
    for (std::int64_t x = lo[0]; x <= hi[0]; ++x) {
      if (x != 0) acc.add(std::pow(static_cast<double>(x * x), expo));
    }
    return acc.value();
  }
  while (true) {
    // Innermost axis handled in a tight loop.
    std::int64_t r2 = 0;
    for (int l = 0; l + 1 < n; ++l) r2 += d[l] * d[l];
    for (std::int64_t x = lo[n - 1]; x <= hi[n - 1]; ++x) {
      const std::int64_t s = r2 + x * x;
      if (s != 0) acc.add(std::pow(static_cast<double>(s), expo));
    }
    int l = n - 2;
    for (; l >= 0; --l) {
      if (++d[l] <= hi[l]) break;
      d[l] = lo[l];
    }
    if (l < 0) break;
  }
  return acc.value();
}

}  // namespace dhl

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dhl/lattice.hpp"

namespace testing_support {

inline dhl::LatticeSeq random_seq(const dhl::Box& box, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(box.volume());
  for (auto& x : v) x = dist(rng);
  return dhl::LatticeSeq(box, std::move(v));
}

inline double max_abs_diff(const dhl::LatticeSeq& a, const dhl::LatticeSeq& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::fabs(a[k] - b[k]));
  return d;
}

/// max |a - b| / max |b|.
inline double rel_dev(const dhl::LatticeSeq& a, const dhl::LatticeSeq& b) {
  const double ref = dhl::lp_norm(b, dhl::kInfinity);
  return ref == 0.0 ? max_abs_diff(a, b) : max_abs_diff(a, b) / ref;
}

/// Distance in units in the last place relative to the larger magnitude.
inline double ulps_apart(double a, double b) {
  const double m = std::max(std::fabs(a), std::fabs(b));
  if (m == 0.0) return 0.0;
  return std::fabs(a - b) / (std::nextafter(m, INFINITY) - m);
}

}  // namespace testing_support

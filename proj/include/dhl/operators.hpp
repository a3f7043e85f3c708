#pragma once

// Discrete Riesz potential, lattice convolution and the centered
// (fractional) maximal operators on Z^n.
//
//   (I_alpha b)(j) = sum_{i != j} b(i) |i - j|^(alpha - n)       Euclidean norm
//   (M_alpha b)(j) = sup_m (2m+1)^(alpha - n) sum_{|i-j|_inf <= m} |b(i)|
//
// Every operator has a slow direct path that doubles as a test oracle and an
// accelerated path (FFT for I_alpha, summed-area tables for M_alpha).

#include <span>

#include "dhl/lattice.hpp"

namespace dhl {

enum class RieszMethod { direct, fft };

/// |v|^(alpha - n) with the Euclidean norm, 0 at v = 0.
double riesz_kernel(std::int64_t squared_length, double alpha, int n);

/// Box of all offsets j - i with i in `in` and j in `out`.
Box offset_box(const Box& in, const Box& out);

/// Riesz kernel tabulated on a box of offsets.
struct KernelTable {
  double alpha = 0.0;
  LatticeSeq table;

  static KernelTable build(double alpha, const Box& offsets);
  double at(std::span<const std::int64_t> v) const { return table.at(v); }
};

/// Restriction of I_alpha b to out_box. Requires 0 < alpha < n.
LatticeSeq riesz_apply(const LatticeSeq& b, double alpha, const Box& out_box,
                       RieszMethod method = RieszMethod::fft);

/// Full convolution (b * c)(j) = sum_i b(i) c(j - i) on the Minkowski sum of
/// the two boxes.
LatticeSeq convolve(const LatticeSeq& b, const LatticeSeq& c);

/// M_alpha b on out_box for 0 <= alpha < n. Uses summed-area tables for
/// n <= 3 and direct cube sums otherwise.
LatticeSeq frac_maximal(const LatticeSeq& b, double alpha, const Box& out_box);

/// Hardy-Littlewood maximal operator, frac_maximal with alpha = 0.
LatticeSeq hl_maximal(const LatticeSeq& b, const Box& out_box);

/// sum_{i in Q, i != k} |k - i|^(alpha - n). The i = k term is dropped
/// whether or not k lies in Q.
double kernel_sum(std::span<const std::int64_t> k, const DiscreteCube& cube, double alpha);

}  // namespace dhl

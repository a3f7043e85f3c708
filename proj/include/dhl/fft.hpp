#pragma once

// Linear ("valid") convolution on boxes through zero-padded real FFTs.
//
// For an input box of shape S and an output box of shape T, the kernel is
// tabulated on every offset v = j - i that can occur, a box of shape
// S + T - 1 whose first entry is the offset (out.origin - in.origin) - S + 1.
// Padding every axis to P >= S + T - 1 keeps the needed part of the circular
// convolution free of wrap-around.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dhl/lattice.hpp"

namespace dhl {

/// Smallest m >= n whose prime factors are all in {2, 3, 5, 7}.
std::int64_t next_smooth_size(std::int64_t n);

template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n);
  void deallocate(T* p, std::size_t) noexcept;
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept {
    return true;
  }
};

using RealBuffer = std::vector<double, FftwAllocator<double>>;
using Spectrum = std::vector<std::complex<double>, FftwAllocator<std::complex<double>>>;

/// Forward/inverse real FFT pair on a fixed padded shape. Plans are made with
/// FFTW_ESTIMATE so results do not depend on timing. Execution is
/// thread-safe.
class RealFft {
 public:
  explicit RealFft(Point shape);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  const Point& shape() const { return shape_; }
  const std::vector<std::size_t>& strides() const { return strides_; }
  std::size_t volume() const { return volume_; }
  std::size_t spectrum_size() const { return spectrum_size_; }

  RealBuffer make_real() const { return RealBuffer(volume_, 0.0); }
  /// Unnormalized forward transform; `real` is destroyed.
  Spectrum forward(RealBuffer& real) const;
  /// Unnormalized inverse transform; `spec` is destroyed.
  RealBuffer inverse(Spectrum& spec) const;

 private:
  struct Plans;

  Point shape_;
  std::vector<std::size_t> strides_;
  std::size_t volume_ = 0;
  std::size_t spectrum_size_ = 0;
  std::unique_ptr<Plans> plans_;
};

class ValidConvolution {
 public:
  ValidConvolution(Point in_shape, Point out_shape);
  ~ValidConvolution();
  ValidConvolution(const ValidConvolution&) = delete;
  ValidConvolution& operator=(const ValidConvolution&) = delete;

  const Point& in_shape() const { return in_shape_; }
  const Point& out_shape() const { return out_shape_; }
  /// in_shape + out_shape - 1.
  const Point& kernel_shape() const { return kernel_shape_; }
  const Point& padded_shape() const { return padded_shape_; }
  std::size_t padded_volume() const { return fft_->volume(); }

  /// Flat position inside the padded real array of kernel entry `k`
  /// (0 <= k < kernel_shape).
  std::size_t padded_offset(std::span<const std::int64_t> k) const;

  /// Zero-filled real buffer of the padded size.
  RealBuffer make_padded() const;

  /// Spectrum of a row-major input on in_shape.
  Spectrum input_spectrum(std::span<const double> input) const;
  /// Spectrum of a row-major kernel table on kernel_shape.
  Spectrum kernel_spectrum(std::span<const double> kernel) const;
  /// Spectrum of an already padded real array (destroyed on return).
  Spectrum padded_spectrum(RealBuffer& padded) const;

  /// Output on out_shape, row-major.
  std::vector<double> apply(const Spectrum& input, const Spectrum& kernel) const;

 private:
  Point in_shape_, out_shape_, kernel_shape_, padded_shape_;
  std::unique_ptr<RealFft> fft_;
};

}  // namespace dhl

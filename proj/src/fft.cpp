#include "dhl/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <new>

namespace dhl {

namespace {
// The FFTW planner is not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::int64_t next_smooth_size(std::int64_t n) {
  if (n <= 1) return 1;
  for (std::int64_t m = n;; ++m) {
    std::int64_t r = m;
    for (std::int64_t f : {2, 3, 5, 7}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

template <class T>
T* FftwAllocator<T>::allocate(std::size_t n) {
  void* p = fftw_malloc(n * sizeof(T));
  if (p == nullptr && n != 0) throw std::bad_alloc();
  return static_cast<T*>(p);
}

template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  fftw_free(p);
}

template struct FftwAllocator<double>;
template struct FftwAllocator<std::complex<double>>;

struct RealFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

RealFft::RealFft(Point shape) : shape_(std::move(shape)) {
  if (shape_.empty()) throw DomainError("RealFft: empty shape");
  for (auto s : shape_) {
    if (s <= 0) throw DomainError("RealFft: extents must be positive");
  }
  strides_ = strides_of(shape_);
  volume_ = 1;
  for (auto p : shape_) volume_ *= static_cast<std::size_t>(p);
  spectrum_size_ = volume_ / static_cast<std::size_t>(shape_.back()) * (static_cast<std::size_t>(shape_.back()) / 2 + 1);

  std::vector<int> dims(shape_.begin(), shape_.end());
  RealBuffer real(volume_);
  Spectrum cplx(spectrum_size_);
  plans_ = std::make_unique<Plans>();
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_ESTIMATE keeps plan selection, and so rounding, reproducible.
  const int rank = static_cast<int>(shape_.size());
  plans_->forward = fftw_plan_dft_r2c(rank, dims.data(), real.data(), reinterpret_cast<fftw_complex*>(cplx.data()),
                                      FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft_c2r(rank, dims.data(), reinterpret_cast<fftw_complex*>(cplx.data()), real.data(),
                                       FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("FFTW planning failed");
}

RealFft::~RealFft() = default;

Spectrum RealFft::forward(RealBuffer& real) const {
  Spectrum out(spectrum_size_);
  fftw_execute_dft_r2c(plans_->forward, real.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

RealBuffer RealFft::inverse(Spectrum& spec) const {
  RealBuffer out(volume_);
  fftw_execute_dft_c2r(plans_->backward, reinterpret_cast<fftw_complex*>(spec.data()), out.data());
  return out;
}

ValidConvolution::ValidConvolution(Point in_shape, Point out_shape)
    : in_shape_(std::move(in_shape)), out_shape_(std::move(out_shape)) {
  if (in_shape_.size() != out_shape_.size() || in_shape_.empty()) {
    throw DomainError("ValidConvolution: shape dimension mismatch");
  }
  const std::size_t n = in_shape_.size();
  kernel_shape_.resize(n);
  padded_shape_.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    if (in_shape_[l] <= 0 || out_shape_[l] <= 0) throw DomainError("ValidConvolution: empty shape");
    kernel_shape_[l] = in_shape_[l] + out_shape_[l] - 1;
    padded_shape_[l] = next_smooth_size(kernel_shape_[l]);
  }
  fft_ = std::make_unique<RealFft>(padded_shape_);
}

ValidConvolution::~ValidConvolution() = default;

std::size_t ValidConvolution::padded_offset(std::span<const std::int64_t> k) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < k.size(); ++l) off += static_cast<std::size_t>(k[l]) * fft_->strides()[l];
  return off;
}

RealBuffer ValidConvolution::make_padded() const { return fft_->make_real(); }

namespace {

// Copies a row-major block of `shape` into the top corner of a padded array.
void scatter_block(std::span<const double> src, const Point& shape, const std::vector<std::size_t>& padded_strides,
                   RealBuffer& dst) {
  const std::size_t n = shape.size();
  const auto run = static_cast<std::size_t>(shape[n - 1]);
  const std::size_t rows = src.size() / run;
  std::vector<std::int64_t> idx(n, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < n; ++l) off += static_cast<std::size_t>(idx[l]) * padded_strides[l];
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(r * run), run, dst.begin() + static_cast<std::ptrdiff_t>(off));
    for (std::size_t l = n - 1; l-- > 0;) {
      if (++idx[l] < shape[l]) break;
      idx[l] = 0;
    }
  }
}

}  // namespace

Spectrum ValidConvolution::padded_spectrum(RealBuffer& padded) const { return fft_->forward(padded); }

Spectrum ValidConvolution::input_spectrum(std::span<const double> input) const {
  std::size_t vol = 1;
  for (auto s : in_shape_) vol *= static_cast<std::size_t>(s);
  if (input.size() != vol) throw DomainError("ValidConvolution: input size mismatch");
  RealBuffer buf = make_padded();
  scatter_block(input, in_shape_, fft_->strides(), buf);
  return padded_spectrum(buf);
}

Spectrum ValidConvolution::kernel_spectrum(std::span<const double> kernel) const {
  std::size_t vol = 1;
  for (auto s : kernel_shape_) vol *= static_cast<std::size_t>(s);
  if (kernel.size() != vol) throw DomainError("ValidConvolution: kernel size mismatch");
  RealBuffer buf = make_padded();
  scatter_block(kernel, kernel_shape_, fft_->strides(), buf);
  return padded_spectrum(buf);
}

std::vector<double> ValidConvolution::apply(const Spectrum& input, const Spectrum& kernel) const {
  Spectrum prod(fft_->spectrum_size());
  for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = input[k] * kernel[k];
  const RealBuffer real = fft_->inverse(prod);

  const std::size_t n = out_shape_.size();
  std::size_t out_vol = 1;
  for (auto s : out_shape_) out_vol *= static_cast<std::size_t>(s);
  std::vector<double> out(out_vol);
  const double inv = 1.0 / static_cast<double>(fft_->volume());
  // Output u sits at circular index u + in_shape - 1.
  const auto run = static_cast<std::size_t>(out_shape_[n - 1]);
  std::vector<std::int64_t> idx(n, 0);
  for (std::size_t r = 0; r < out_vol / run; ++r) {
    std::size_t off = 0;
    for (std::size_t l = 0; l < n; ++l) {
      const std::int64_t base = (l + 1 < n ? idx[l] : 0) + in_shape_[l] - 1;
      off += static_cast<std::size_t>(base) * fft_->strides()[l];
    }
    for (std::size_t c = 0; c < run; ++c) out[r * run + c] = real[off + c] * inv;
    for (std::size_t l = n - 1; l-- > 0;) {
      if (++idx[l] < out_shape_[l]) break;
      idx[l] = 0;
    }
  }
  return out;
}

}  // namespace dhl

#pragma once

/**
 * @file fft.hpp
 * Linear convolution of non-negative integer sequences through FFTW.
 */

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "minplus/numeric.hpp"

namespace minplus::detail {

// Real-to-complex plans for one transform size, with their own buffers.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    real_ = fftw_alloc_real(n);
    spec_a_ = fftw_alloc_complex(n / 2 + 1);
    spec_b_ = fftw_alloc_complex(n / 2 + 1);
    if (!real_ || !spec_a_ || !spec_b_) throw std::bad_alloc();
    const int len = static_cast<int>(n);
    forward_a_ = fftw_plan_dft_r2c_1d(len, real_, spec_a_, FFTW_ESTIMATE);
    forward_b_ = fftw_plan_dft_r2c_1d(len, real_, spec_b_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(len, spec_a_, real_, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    fftw_destroy_plan(forward_a_);
    fftw_destroy_plan(forward_b_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spec_a_);
    fftw_free(spec_b_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }

  // out[k] = sum_i a[i] b[k-i], rounded to the nearest integer.  The caller
  // guarantees that a.size() + b.size() - 1 <= size() and that every exact
  // coefficient stays well below 2^50.
  void convolve(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out) {
    std::fill(real_, real_ + n_, 0.0);
    std::copy(a.begin(), a.end(), real_);
    fftw_execute(forward_a_);
    std::fill(real_, real_ + n_, 0.0);
    std::copy(b.begin(), b.end(), real_);
    fftw_execute(forward_b_);
    const std::size_t m = n_ / 2 + 1;
    for (std::size_t k = 0; k < m; ++k) {
      const double re = spec_a_[k][0] * spec_b_[k][0] - spec_a_[k][1] * spec_b_[k][1];
      const double im = spec_a_[k][0] * spec_b_[k][1] + spec_a_[k][1] * spec_b_[k][0];
      spec_a_[k][0] = re;
      spec_a_[k][1] = im;
    }
    fftw_execute(inverse_);
    const std::size_t len = a.empty() || b.empty() ? 0 : a.size() + b.size() - 1;
    out.resize(len);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k < len; ++k) out[k] = std::nearbyint(real_[k] * scale);
    // Three transforms of n/2 log n butterflies plus the pointwise products.
    charge_multiplications(3 * (n_ / 2) * static_cast<std::uint64_t>(std::bit_width(n_) - 1) + n_);
  }

 private:
  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spec_a_ = nullptr;
  fftw_complex* spec_b_ = nullptr;
  fftw_plan forward_a_ = nullptr;
  fftw_plan forward_b_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

// Plans are cached per size for the lifetime of the thread.
inline FftPlan& fft_plan_for(std::size_t min_length) {
  thread_local std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  const std::size_t n = std::bit_ceil(std::max<std::size_t>(min_length, 2));
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

inline std::vector<double> convolve_counts(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  if (a.empty() || b.empty()) return out;
  fft_plan_for(a.size() + b.size() - 1).convolve(a, b, out);
  return out;
}

}  // namespace minplus::detail

#pragma once

#include <complex>
#include <cstddef>

#include <fftw3.h>

namespace chemoflux::detail {

/// r2c / c2r plan pair for one resolution. Executed through FFTW's new-array
/// interface, so a single plan may be shared by concurrent callers.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(const double* in, std::complex<double>* out) const;
  /// Destroys `in`.
  void inverse(std::complex<double>* in, double* out) const;

 private:
  std::size_t n_;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
};

}  // namespace chemoflux::detail

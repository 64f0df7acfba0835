#pragma once

#include <fftw3.h>

#include <complex>
#include <vector>

namespace qhj {

/// In-place complex FFT of fixed length bound to one buffer. Unnormalized in
/// both directions, like FFTW.
class FftPlan {
 public:
  explicit FftPlan(std::vector<std::complex<double>>& buffer);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward();
  void backward();

 private:
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace qhj

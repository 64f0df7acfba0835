#include "qhj/fft.hpp"

#include "qhj/errors.hpp"

namespace qhj {

FftPlan::FftPlan(std::vector<std::complex<double>>& buffer) {
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  const int n = static_cast<int>(buffer.size());
  // ESTIMATE plans do not overwrite the buffer and are reproducible run to run.
  fwd_ = fftw_plan_dft_1d(n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!fwd_ || !bwd_) throw Error("FFTW plan creation failed");
}

FftPlan::~FftPlan() {
  if (fwd_) fftw_destroy_plan(fwd_);
  if (bwd_) fftw_destroy_plan(bwd_);
}

void FftPlan::forward() { fftw_execute(fwd_); }
void FftPlan::backward() { fftw_execute(bwd_); }

}  // namespace qhj

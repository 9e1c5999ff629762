#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "perifront/error.hpp"

namespace perifront::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFFT::RealFFT(std::size_t n) : n_(n) {
  require(n >= 2, "FFT length must be at least 2");
  std::vector<double> re(n);
  std::vector<std::complex<double>> sp(n / 2 + 1);
  auto* c = reinterpret_cast<fftw_complex*>(sp.data());
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  fwd_ = fftw_plan_dft_r2c_1d(len, re.data(), c, flags);
  bwd_ = fftw_plan_dft_c2r_1d(len, c, re.data(), flags | FFTW_DESTROY_INPUT);
  if (fwd_ == nullptr || bwd_ == nullptr) fail(ErrorCode::InvalidInput, "FFTW planning failed");
}

RealFFT::~RealFFT() {
  if (fwd_ == nullptr && bwd_ == nullptr) return;
  std::lock_guard lock(planner_mutex());
  if (fwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

RealFFT::RealFFT(RealFFT&& o) noexcept : n_(o.n_), fwd_(o.fwd_), bwd_(o.bwd_) {
  o.fwd_ = o.bwd_ = nullptr;
  o.n_ = 0;
}

RealFFT& RealFFT::operator=(RealFFT&& o) noexcept {
  if (this != &o) {
    RealFFT tmp(std::move(*this));
    n_ = o.n_;
    fwd_ = o.fwd_;
    bwd_ = o.bwd_;
    o.fwd_ = o.bwd_ = nullptr;
    o.n_ = 0;
  }
  return *this;
}

void RealFFT::forward(double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), in, reinterpret_cast<fftw_complex*>(out));
}

void RealFFT::backward(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(bwd_), reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace perifront::detail

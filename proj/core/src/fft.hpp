#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace perifront::detail {

/// Unnormalized real-to-complex transform of length n (n/2 + 1 outputs).
/// Plans are built with FFTW_ESTIMATE so results do not depend on timing.
/// Executing one instance from several threads at once is safe.
class RealFFT {
 public:
  explicit RealFFT(std::size_t n);
  ~RealFFT();
  RealFFT(RealFFT&&) noexcept;
  RealFFT& operator=(RealFFT&&) noexcept;

  std::size_t size() const noexcept { return n_; }
  std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

  void forward(double* in, std::complex<double>* out) const;
  /// Destroys the contents of `in`.
  void backward(std::complex<double>* in, double* out) const;

 private:
  std::size_t n_ = 0;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace perifront::detail

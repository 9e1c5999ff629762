#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace perifront {

bool is_power_of_two(std::size_t n) noexcept;

/// Throws InvalidInput unless M >= 8 and M is a power of two.
void check_grid_size(std::size_t M);

/// Samples of a 1-periodic function at x_j = j/M, j = 0..M-1.
class PeriodicField {
 public:
  PeriodicField() = default;
  explicit PeriodicField(std::vector<double> values);

  static PeriodicField constant(std::size_t M, double value);
  static PeriodicField sample(std::size_t M, const std::function<double(double)>& f);

  std::size_t size() const noexcept { return v_.size(); }
  double h() const noexcept { return 1.0 / static_cast<double>(v_.size()); }
  double x(std::size_t j) const noexcept { return static_cast<double>(j) * h(); }

  double operator[](std::size_t j) const noexcept { return v_[j]; }
  double& operator[](std::size_t j) noexcept { return v_[j]; }
  const std::vector<double>& values() const noexcept { return v_; }
  std::vector<double>& values() noexcept { return v_; }
  const double* data() const noexcept { return v_.data(); }
  double* data() noexcept { return v_.data(); }

  double max() const;
  double min() const;
  double sup_norm() const;
  /// Rectangle-rule integral over the unit cell.
  double mean() const;

 private:
  std::vector<double> v_;
};

double sup_distance(const PeriodicField& a, const PeriodicField& b);
void check_same_grid(const PeriodicField& a, const PeriodicField& b);

enum class Direction : int { Right = 1, Left = -1 };

constexpr int sign(Direction e) noexcept { return static_cast<int>(e); }
Direction direction_from_int(int e);

/// Even, nonnegative dispersal density supported in [-1, 1].
class KernelSpec {
 public:
  enum class Kind { Bump, Samples };

  /// C * exp(-1 / (1 - z^2)) on (-1, 1).
  static KernelSpec bump();
  /// Values on the symmetric grid z_k = -1 + 2k/(n-1), linearly interpolated.
  static KernelSpec from_samples(std::vector<double> samples);

  Kind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;
  const std::vector<double>& samples() const noexcept { return samples_; }
  double normalization() const noexcept { return norm_; }

  /// Normalized density J(z).
  double operator()(double z) const noexcept;

  /// Discrete weights w_q ~ J(q/M) for q = -M..M (index q + M), rescaled so
  /// that (1/M) * sum_q w_q == 1.
  std::vector<double> line_weights(std::size_t M) const;

 private:
  double profile(double z) const noexcept;

  Kind kind_ = Kind::Bump;
  std::vector<double> samples_;
  double norm_ = 1.0;
};

/// K_lambda(z_j) = sum_k J(z_j - k) exp(-lambda (z_j - k) e) on the cell grid.
struct TiltedPeriodizedKernel {
  double lambda = 0.0;
  Direction e = Direction::Right;
  std::vector<double> K;

  std::size_t size() const noexcept { return K.size(); }
  /// Rectangle-rule integral of K over the cell.
  double mass() const;
};

TiltedPeriodizedKernel periodize_tilted(const KernelSpec& J, double lambda, Direction e,
                                        std::size_t M);

/// (K * u)_i = (1/M) sum_j K_{i-j mod M} u_j, via FFT.
PeriodicField cyclic_convolve(const TiltedPeriodizedKernel& K, const PeriodicField& u);
/// Same product by the O(M^2) double sum.
PeriodicField cyclic_convolve_direct(const TiltedPeriodizedKernel& K, const PeriodicField& u);

/// Reusable FFT convolution with a fixed kernel. Holds scratch buffers, so a
/// single instance must not be shared between threads.
class CyclicConvolver {
 public:
  explicit CyclicConvolver(const TiltedPeriodizedKernel& K);
  ~CyclicConvolver();
  CyclicConvolver(CyclicConvolver&&) noexcept;
  CyclicConvolver& operator=(CyclicConvolver&&) noexcept;

  std::size_t size() const noexcept;
  void apply(std::span<const double> u, std::span<double> out) const;
  PeriodicField apply(const PeriodicField& u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// eps * (u_{i+1} - 2 u_i + u_{i-1}) / h^2 with periodic wraparound.
PeriodicField laplacian_periodic(const PeriodicField& u, double eps);

/// Solves the cyclic tridiagonal system
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]  (indices mod n)
/// by Thomas elimination plus a Sherman-Morrison correction for the corners.
std::vector<double> solve_periodic_tridiagonal(std::span<const double> lower,
                                               std::span<const double> diag,
                                               std::span<const double> upper,
                                               std::span<const double> rhs);

/// Solves (alpha - eps * Delta_h) x = rhs on the periodic grid.
PeriodicField solve_shifted_laplacian(double alpha, double eps, const PeriodicField& rhs);

}  // namespace perifront

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "perifront/grid.hpp"

namespace perifront {

/// A 1-periodic coefficient, kept in closed form where possible so it can be
/// resampled at any resolution.
class Medium {
 public:
  enum class Kind { Fourier, Samples, Peak };

  static Medium constant(double value);
  /// mean + sum_k amplitudes[k-1] * cos(2 pi k x + phases[k-1]).
  static Medium fourier(double mean, std::vector<double> amplitudes, std::vector<double> phases = {});
  /// Raw samples at x_j = j/n. Resampling is limited to divisors of n.
  static Medium samples(std::vector<double> values);
  /// top - slope * dist_per(x, center)^exponent.
  static Medium peak(double top, double slope, double center, double exponent);

  Kind kind() const noexcept { return kind_; }
  bool has_closed_form() const noexcept { return kind_ != Kind::Samples; }

  double operator()(double x) const;
  double derivative(double x) const;
  PeriodicField at_grid(std::size_t M) const;
  /// The same medium plus a constant.
  Medium shifted(double offset) const;

  double mean() const noexcept { return mean_; }
  const std::vector<double>& amplitudes() const noexcept { return amps_; }
  const std::vector<double>& phases() const noexcept { return phases_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double top() const noexcept { return top_; }
  double slope() const noexcept { return slope_; }
  double center() const noexcept { return center_; }
  double exponent() const noexcept { return exponent_; }

 private:
  Kind kind_ = Kind::Fourier;
  double mean_ = 0.0;
  std::vector<double> amps_, phases_, values_;
  double top_ = 0.0, slope_ = 0.0, center_ = 0.0, exponent_ = 1.0;
};

double periodic_distance(double x, double y) noexcept;

/// Logistic reaction f(x,u) = u (a(x) - b(x) u) sampled on a cell grid.
class Nonlinearity {
 public:
  Nonlinearity() = default;

  /// Throws NonKPP if min b <= 0.
  static Nonlinearity logistic(const Medium& a, const Medium& b, std::size_t M);
  /// Skips hypothesis checks; for building deliberately degenerate fixtures.
  static Nonlinearity logistic_unchecked(const Medium& a, const Medium& b, std::size_t M);

  Nonlinearity at_grid(std::size_t M) const;

  std::size_t size() const noexcept { return a_.size(); }
  const PeriodicField& a() const noexcept { return a_; }
  const PeriodicField& b() const noexcept { return b_; }
  const Medium& a_medium() const noexcept { return am_; }
  const Medium& b_medium() const noexcept { return bm_; }

  double f(std::size_t j, double u) const noexcept { return u * (a_[j] - b_[j] * u); }
  double f_u(std::size_t j, double u) const noexcept { return a_[j] - 2.0 * b_[j] * u; }
  double F(std::size_t j, double u) const noexcept {
    return a_[j] * u * u / 2.0 - b_[j] * u * u * u / 3.0;
  }
  /// x-derivative of f at fixed u, from the closed-form media.
  double f_x(std::size_t j, double u) const;

  /// M_cap = max(a)^+ / min(b); infinite when min b <= 0.
  double cap() const noexcept { return cap_; }
  /// sup over x and u in [0, upper] of |f_u|, plus 1.
  double shift_constant(double upper) const;

 private:
  Medium am_, bm_;
  PeriodicField a_, b_;
  double cap_ = 0.0;
};

struct KppReport {
  bool zero_at_origin = false;
  bool decreasing_ratio = false;
  bool nonpositive_above_cap = false;
  /// Largest f(x,u) seen on the lattice for u >= M_cap.
  double max_f_above_cap = 0.0;
  /// Largest increment of f(x,u)/u along u (must be < 0).
  double max_ratio_increment = 0.0;
  bool ok() const noexcept { return zero_at_origin && decreasing_ratio && nonpositive_above_cap; }
};

KppReport validate_kpp(const Nonlinearity& nl, std::size_t nu = 64);

/// The data every solver needs: kernel, reaction, and front direction.
struct Problem {
  KernelSpec kernel = KernelSpec::bump();
  Nonlinearity nl;
  Direction e = Direction::Right;

  std::size_t M() const noexcept { return nl.size(); }
  Problem at_grid(std::size_t M) const { return {kernel, nl.at_grid(M), e}; }
};

}  // namespace perifront

#include "perifront/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "perifront/error.hpp"

namespace perifront {

double periodic_distance(double x, double y) noexcept {
  double d = std::fmod(std::abs(x - y), 1.0);
  return std::min(d, 1.0 - d);
}

Medium Medium::constant(double value) { return fourier(value, {}, {}); }

Medium Medium::fourier(double mean, std::vector<double> amplitudes, std::vector<double> phases) {
  if (phases.empty()) phases.assign(amplitudes.size(), 0.0);
  if (phases.size() != amplitudes.size())
    fail(ErrorCode::InvalidInput, "Fourier medium needs one phase per amplitude");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::isfinite(mean) || !std::all_of(amplitudes.begin(), amplitudes.end(), finite) ||
      !std::all_of(phases.begin(), phases.end(), finite))
    fail(ErrorCode::InvalidInput, "Fourier medium coefficients must be finite");
  Medium m;
  m.kind_ = Kind::Fourier;
  m.mean_ = mean;
  m.amps_ = std::move(amplitudes);
  m.phases_ = std::move(phases);
  return m;
}

Medium Medium::samples(std::vector<double> values) {
  PeriodicField check(values);
  Medium m;
  m.kind_ = Kind::Samples;
  m.values_ = std::move(values);
  return m;
}

Medium Medium::peak(double top, double slope, double center, double exponent) {
  if (!std::isfinite(top) || !std::isfinite(slope) || !std::isfinite(center) || !(exponent > 0.0))
    fail(ErrorCode::InvalidInput, "peak medium parameters must be finite with exponent > 0");
  Medium m;
  m.kind_ = Kind::Peak;
  m.top_ = top;
  m.slope_ = slope;
  m.center_ = center - std::floor(center);
  m.exponent_ = exponent;
  return m;
}

double Medium::operator()(double x) const {
  using std::numbers::pi;
  switch (kind_) {
    case Kind::Fourier: {
      double v = mean_;
      for (std::size_t k = 0; k < amps_.size(); ++k)
        v += amps_[k] * std::cos(2.0 * pi * static_cast<double>(k + 1) * x + phases_[k]);
      return v;
    }
    case Kind::Peak:
      return top_ - slope_ * std::pow(periodic_distance(x, center_), exponent_);
    case Kind::Samples: {
      const auto n = static_cast<double>(values_.size());
      double t = (x - std::floor(x)) * n;
      auto k = static_cast<std::size_t>(t);
      if (k >= values_.size()) k = values_.size() - 1;
      const double w = t - static_cast<double>(k);
      return (1.0 - w) * values_[k] + w * values_[(k + 1) % values_.size()];
    }
  }
  return 0.0;
}

double Medium::derivative(double x) const {
  using std::numbers::pi;
  switch (kind_) {
    case Kind::Fourier: {
      double v = 0.0;
      for (std::size_t k = 0; k < amps_.size(); ++k) {
        const double w = 2.0 * pi * static_cast<double>(k + 1);
        v -= amps_[k] * w * std::sin(w * x + phases_[k]);
      }
      return v;
    }
    case Kind::Peak: {
      double y = x - center_;
      y -= std::round(y);
      const double d = std::abs(y);
      if (d == 0.0) return 0.0;
      const double g = slope_ * exponent_ * std::pow(d, exponent_ - 1.0);
      return y > 0.0 ? -g : g;
    }
    case Kind::Samples: {
      const auto n = static_cast<double>(values_.size());
      return ((*this)(x + 0.5 / n) - (*this)(x - 0.5 / n)) * n;
    }
  }
  return 0.0;
}

PeriodicField Medium::at_grid(std::size_t M) const {
  check_grid_size(M);
  if (kind_ == Kind::Samples) {
    const std::size_t n = values_.size();
    if (M > n || n % M != 0)
      fail(ErrorCode::GridMismatch, "sampled medium of size " + std::to_string(n) +
                                        " cannot be evaluated at M = " + std::to_string(M));
    std::vector<double> v(M);
    for (std::size_t j = 0; j < M; ++j) v[j] = values_[j * (n / M)];
    return PeriodicField(std::move(v));
  }
  return PeriodicField::sample(M, [this](double x) { return (*this)(x); });
}

Medium Medium::shifted(double offset) const {
  Medium m = *this;
  m.mean_ += offset;
  m.top_ += offset;
  for (double& v : m.values_) v += offset;
  return m;
}

// ------------------------------------------------------------ nonlinearity

Nonlinearity Nonlinearity::logistic_unchecked(const Medium& a, const Medium& b, std::size_t M) {
  Nonlinearity nl;
  nl.am_ = a;
  nl.bm_ = b;
  nl.a_ = a.at_grid(M);
  nl.b_ = b.at_grid(M);
  const double bmin = nl.b_.min();
  nl.cap_ = bmin > 0.0 ? std::max(nl.a_.max(), 0.0) / bmin : std::numeric_limits<double>::infinity();
  return nl;
}

Nonlinearity Nonlinearity::logistic(const Medium& a, const Medium& b, std::size_t M) {
  auto nl = logistic_unchecked(a, b, M);
  if (!(nl.b_.min() > 0.0))
    fail(ErrorCode::NonKPP, "logistic saturation b must be positive (min b = " +
                                std::to_string(nl.b_.min()) + ")");
  return nl;
}

Nonlinearity Nonlinearity::at_grid(std::size_t M) const {
  return logistic_unchecked(am_, bm_, M);
}

double Nonlinearity::f_x(std::size_t j, double u) const {
  const double x = a_.x(j);
  auto dmed = [x](const Medium& m, const PeriodicField& s, std::size_t jj) {
    if (m.has_closed_form()) return m.derivative(x);
    const std::size_t n = s.size();
    return (s[(jj + 1) % n] - s[(jj + n - 1) % n]) * 0.5 * static_cast<double>(n);
  };
  return dmed(am_, a_, j) * u - dmed(bm_, b_, j) * u * u;
}

double Nonlinearity::shift_constant(double upper) const {
  double s = 0.0;
  for (std::size_t j = 0; j < size(); ++j)
    s = std::max({s, std::abs(f_u(j, 0.0)), std::abs(f_u(j, upper))});
  return s + 1.0;
}

KppReport validate_kpp(const Nonlinearity& nl, std::size_t nu) {
  require(nu >= 2, "validate_kpp needs at least two u samples");
  KppReport r;
  const std::size_t M = nl.size();
  double umax = std::isfinite(nl.cap()) ? 2.0 * nl.cap() : 2.0 * std::max(1.0, std::abs(nl.a().max()));
  if (umax <= 0.0) umax = 1.0;

  r.zero_at_origin = true;
  for (std::size_t j = 0; j < M; ++j)
    if (nl.f(j, 0.0) != 0.0) r.zero_at_origin = false;

  r.max_ratio_increment = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < M; ++j) {
    double prev = 0.0;
    for (std::size_t k = 1; k <= nu; ++k) {
      const double u = umax * static_cast<double>(k) / static_cast<double>(nu);
      const double q = nl.f(j, u) / u;
      if (k > 1) r.max_ratio_increment = std::max(r.max_ratio_increment, q - prev);
      prev = q;
    }
  }
  r.decreasing_ratio = r.max_ratio_increment < 0.0;

  if (std::isfinite(nl.cap())) {
    r.max_f_above_cap = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < nu; ++k) {
        const double u = nl.cap() * (1.0 + static_cast<double>(k) / static_cast<double>(nu - 1));
        r.max_f_above_cap = std::max(r.max_f_above_cap, nl.f(j, u));
      }
    r.nonpositive_above_cap = r.max_f_above_cap <= 0.0;
  } else {
    r.max_f_above_cap = std::numeric_limits<double>::infinity();
    r.nonpositive_above_cap = false;
  }
  return r;
}

}  // namespace perifront

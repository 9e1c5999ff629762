#include "perifront/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "fft.hpp"
#include "perifront/error.hpp"

namespace perifront {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

void check_grid_size(std::size_t M) {
  if (M < 8 || !is_power_of_two(M))
    fail(ErrorCode::InvalidInput, "grid size must be a power of two >= 8, got " + std::to_string(M));
}

PeriodicField::PeriodicField(std::vector<double> values) : v_(std::move(values)) {
  check_grid_size(v_.size());
  for (double x : v_)
    if (!std::isfinite(x)) fail(ErrorCode::InvalidInput, "periodic field has non-finite samples");
}

PeriodicField PeriodicField::constant(std::size_t M, double value) {
  return PeriodicField(std::vector<double>(M, value));
}

PeriodicField PeriodicField::sample(std::size_t M, const std::function<double(double)>& f) {
  std::vector<double> v(M);
  for (std::size_t j = 0; j < M; ++j) v[j] = f(static_cast<double>(j) / static_cast<double>(M));
  return PeriodicField(std::move(v));
}

double PeriodicField::max() const { return *std::max_element(v_.begin(), v_.end()); }
double PeriodicField::min() const { return *std::min_element(v_.begin(), v_.end()); }

double PeriodicField::sup_norm() const {
  double s = 0.0;
  for (double x : v_) s = std::max(s, std::abs(x));
  return s;
}

double PeriodicField::mean() const {
  return std::accumulate(v_.begin(), v_.end(), 0.0) / static_cast<double>(v_.size());
}

void check_same_grid(const PeriodicField& a, const PeriodicField& b) {
  if (a.size() != b.size())
    fail(ErrorCode::GridMismatch,
         "grid sizes differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

double sup_distance(const PeriodicField& a, const PeriodicField& b) {
  check_same_grid(a, b);
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

Direction direction_from_int(int e) {
  if (e == 1) return Direction::Right;
  if (e == -1) return Direction::Left;
  fail(ErrorCode::InvalidInput, "direction must be +1 or -1");
}

// ---------------------------------------------------------------- kernels

namespace {

double bump_profile(double z) noexcept {
  const double t = 1.0 - z * z;
  return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
}

// The bump vanishes to all orders at +-1, so the trapezoid rule converges
// faster than any power of the step.
double bump_integral() {
  constexpr int n = 1 << 14;
  double s = 0.0;
  for (int k = 1; k < n; ++k) s += bump_profile(-1.0 + 2.0 * k / n);
  return s * 2.0 / n;
}

}  // namespace

KernelSpec KernelSpec::bump() {
  static const double integral = bump_integral();
  KernelSpec J;
  J.kind_ = Kind::Bump;
  J.norm_ = 1.0 / integral;
  return J;
}

KernelSpec KernelSpec::from_samples(std::vector<double> samples) {
  const std::size_t n = samples.size();
  if (n < 3 || n % 2 == 0)
    fail(ErrorCode::InvalidInput, "kernel samples need an odd count >= 3 on a symmetric grid");
  double peak = 0.0;
  for (double v : samples) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::InvalidInput, "kernel samples must be finite and >= 0");
    peak = std::max(peak, v);
  }
  if (samples[n / 2] <= 0.0) fail(ErrorCode::InvalidInput, "kernel must be positive at the origin");
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double a = samples[k], b = samples[n - 1 - k];
    if (std::abs(a - b) > 1e-12 * peak) fail(ErrorCode::InvalidInput, "kernel samples are not even");
    samples[k] = samples[n - 1 - k] = 0.5 * (a + b);
  }
  // Exact integral of the piecewise-linear interpolant.
  const double dz = 2.0 / static_cast<double>(n - 1);
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) integral += 0.5 * (samples[k] + samples[k + 1]) * dz;
  KernelSpec J;
  J.kind_ = Kind::Samples;
  J.samples_ = std::move(samples);
  J.norm_ = 1.0 / integral;
  return J;
}

std::string_view KernelSpec::name() const noexcept {
  return kind_ == Kind::Bump ? "bump" : "samples";
}

double KernelSpec::profile(double z) const noexcept {
  if (kind_ == Kind::Bump) return bump_profile(z);
  if (z < -1.0 || z > 1.0) return 0.0;
  const std::size_t n = samples_.size();
  const double t = (z + 1.0) * 0.5 * static_cast<double>(n - 1);
  const auto k = std::min(static_cast<std::size_t>(t), n - 2);
  const double w = t - static_cast<double>(k);
  return (1.0 - w) * samples_[k] + w * samples_[k + 1];
}

double KernelSpec::operator()(double z) const noexcept { return norm_ * profile(z); }

std::vector<double> KernelSpec::line_weights(std::size_t M) const {
  require(M >= 1, "line_weights needs M >= 1");
  const auto m = static_cast<std::ptrdiff_t>(M);
  std::vector<double> w(2 * M + 1);
  for (std::ptrdiff_t q = -m; q <= m; ++q) {
    double v = (*this)(static_cast<double>(q) / static_cast<double>(M));
    if (q == -m || q == m) v *= 0.5;
    w[static_cast<std::size_t>(q + m)] = v;
  }
  const double mass = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(M);
  for (double& v : w) v /= mass;
  return w;
}

double TiltedPeriodizedKernel::mass() const {
  return std::accumulate(K.begin(), K.end(), 0.0) / static_cast<double>(K.size());
}

TiltedPeriodizedKernel periodize_tilted(const KernelSpec& J, double lambda, Direction e,
                                        std::size_t M) {
  check_grid_size(M);
  if (!std::isfinite(lambda)) fail(ErrorCode::InvalidInput, "tilt must be finite");
  const auto w = J.line_weights(M);
  const auto m = static_cast<std::ptrdiff_t>(M);
  const double le = lambda * sign(e);
  TiltedPeriodizedKernel out{lambda, e, std::vector<double>(M, 0.0)};
  for (std::ptrdiff_t q = -m; q <= m; ++q) {
    const double wq = w[static_cast<std::size_t>(q + m)];
    if (wq == 0.0) continue;
    const auto j = static_cast<std::size_t>(((q % m) + m) % m);
    out.K[j] += wq * std::exp(-le * static_cast<double>(q) / static_cast<double>(M));
  }
  return out;
}

// ------------------------------------------------------------ convolution

struct CyclicConvolver::Impl {
  detail::RealFFT fft;
  std::vector<std::complex<double>> khat;
  mutable std::vector<double> in;
  mutable std::vector<std::complex<double>> spec;

  explicit Impl(const TiltedPeriodizedKernel& K)
      : fft(K.size()), khat(K.size() / 2 + 1), in(K.size()), spec(K.size() / 2 + 1) {
    const double scale = 1.0 / (static_cast<double>(K.size()) * static_cast<double>(K.size()));
    std::copy(K.K.begin(), K.K.end(), in.begin());
    fft.forward(in.data(), khat.data());
    for (auto& c : khat) c *= scale;
  }
};

CyclicConvolver::CyclicConvolver(const TiltedPeriodizedKernel& K) {
  check_grid_size(K.size());
  impl_ = std::make_unique<Impl>(K);
}
CyclicConvolver::~CyclicConvolver() = default;
CyclicConvolver::CyclicConvolver(CyclicConvolver&&) noexcept = default;
CyclicConvolver& CyclicConvolver::operator=(CyclicConvolver&&) noexcept = default;

std::size_t CyclicConvolver::size() const noexcept { return impl_->khat.size() * 2 - 2; }

void CyclicConvolver::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t M = size();
  if (u.size() != M || out.size() != M)
    fail(ErrorCode::GridMismatch, "convolution operand does not match kernel grid");
  std::copy(u.begin(), u.end(), impl_->in.begin());
  impl_->fft.forward(impl_->in.data(), impl_->spec.data());
  for (std::size_t k = 0; k < impl_->spec.size(); ++k) impl_->spec[k] *= impl_->khat[k];
  impl_->fft.backward(impl_->spec.data(), out.data());
}

PeriodicField CyclicConvolver::apply(const PeriodicField& u) const {
  std::vector<double> out(u.size());
  apply(u.values(), out);
  return PeriodicField(std::move(out));
}

PeriodicField cyclic_convolve(const TiltedPeriodizedKernel& K, const PeriodicField& u) {
  if (K.size() != u.size()) fail(ErrorCode::GridMismatch, "kernel and field grids differ");
  return CyclicConvolver(K).apply(u);
}

PeriodicField cyclic_convolve_direct(const TiltedPeriodizedKernel& K, const PeriodicField& u) {
  const std::size_t M = u.size();
  if (K.size() != M) fail(ErrorCode::GridMismatch, "kernel and field grids differ");
  std::vector<double> out(M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < M; ++j) s += K.K[(i + M - j) % M] * u[j];
    out[i] = s / static_cast<double>(M);
  }
  return PeriodicField(std::move(out));
}

// ------------------------------------------------------------- laplacian

PeriodicField laplacian_periodic(const PeriodicField& u, double eps) {
  require(eps >= 0.0, "viscosity must be nonnegative");
  const std::size_t M = u.size();
  std::vector<double> out(M, 0.0);
  if (eps == 0.0) return PeriodicField(std::move(out));
  const double c = eps * static_cast<double>(M) * static_cast<double>(M);
  for (std::size_t i = 0; i < M; ++i)
    out[i] = c * (u[(i + 1) % M] - 2.0 * u[i] + u[(i + M - 1) % M]);
  return PeriodicField(std::move(out));
}

namespace {

// Plain Thomas elimination; lower[0] and upper[n-1] are ignored.
void thomas(std::span<const double> lower, std::span<const double> diag,
            std::span<const double> upper, std::span<double> x) {
  const std::size_t n = diag.size();
  std::vector<double> cp(n);
  double beta = diag[0];
  x[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    cp[i - 1] = upper[i - 1] / beta;
    beta = diag[i] - lower[i] * cp[i - 1];
    x[i] = (x[i] - lower[i] * x[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
}

}  // namespace

std::vector<double> solve_periodic_tridiagonal(std::span<const double> lower,
                                               std::span<const double> diag,
                                               std::span<const double> upper,
                                               std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    fail(ErrorCode::GridMismatch, "tridiagonal bands have inconsistent lengths");
  require(n >= 3, "periodic tridiagonal system needs n >= 3");
  // A = T + u v^T with u = (gamma, 0, ..., 0, upper[n-1]), v = (1, 0, ..., 0, lower[0]/gamma).
  const double gamma = -diag[0];
  std::vector<double> d(diag.begin(), diag.end());
  d[0] -= gamma;
  d[n - 1] -= upper[n - 1] * lower[0] / gamma;
  std::vector<double> x(rhs.begin(), rhs.end());
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = upper[n - 1];
  thomas(lower, d, upper, x);
  thomas(lower, d, upper, z);
  const double vx = x[0] + lower[0] / gamma * x[n - 1];
  const double vz = z[0] + lower[0] / gamma * z[n - 1];
  const double f = vx / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) x[i] -= f * z[i];
  return x;
}

PeriodicField solve_shifted_laplacian(double alpha, double eps, const PeriodicField& rhs) {
  require(eps >= 0.0, "viscosity must be nonnegative");
  require(alpha > 0.0, "shift must be positive");
  const std::size_t M = rhs.size();
  if (eps == 0.0) {
    std::vector<double> out(rhs.values());
    for (double& v : out) v /= alpha;
    return PeriodicField(std::move(out));
  }
  const double c = eps * static_cast<double>(M) * static_cast<double>(M);
  std::vector<double> off(M, -c), diag(M, alpha + 2.0 * c);
  return PeriodicField(solve_periodic_tridiagonal(off, diag, off, rhs.values()));
}

}  // namespace perifront

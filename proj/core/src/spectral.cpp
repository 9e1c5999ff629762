#include "perifront/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "perifront/error.hpp"

namespace perifront {

TiltedOperator::TiltedOperator(const Problem& problem, double lambda, double eps)
    : TiltedOperator(problem, eps, periodize_tilted(problem.kernel, lambda, problem.e, problem.M())) {}

TiltedOperator::TiltedOperator(const Problem& problem, double eps, TiltedPeriodizedKernel K)
    : lambda_(K.lambda), eps_(eps), shift_(0.0), norm_(0.0), a_(problem.nl.a().values()), conv_(K) {
  require(eps >= 0.0, "viscosity must be nonnegative");
  const double M = static_cast<double>(size());
  double amax = 0.0;
  for (double v : a_) amax = std::max(amax, std::abs(v));
  shift_ = 1.0 + 4.0 * eps * M * M + amax + 1.0;
  norm_ = shift_ + K.mass();
}

void TiltedOperator::apply(std::span<const double> w, std::span<double> out) const {
  const std::size_t M = size();
  conv_.apply(w, out);
  for (std::size_t i = 0; i < M; ++i) out[i] += (a_[i] - 1.0) * w[i];
  if (eps_ > 0.0) {
    const double c = eps_ * static_cast<double>(M) * static_cast<double>(M);
    for (std::size_t i = 0; i < M; ++i)
      out[i] += c * (w[(i + 1) % M] - 2.0 * w[i] + w[(i + M - 1) % M]);
  }
}

PeriodicField apply_operator(const Problem& problem, double lambda, double eps,
                             const PeriodicField& w) {
  if (w.size() != problem.M()) fail(ErrorCode::GridMismatch, "operand does not match medium grid");
  TiltedOperator L(problem, lambda, eps);
  std::vector<double> out(w.size());
  L.apply(w.values(), out);
  return PeriodicField(std::move(out));
}

std::string_view to_string(EigenClass c) noexcept {
  return c == EigenClass::PrincipalEigenpair ? "PrincipalEigenpair" : "EssentialSuspected";
}

std::string_view to_string(Trichotomy t) noexcept {
  switch (t) {
    case Trichotomy::Exists: return "Exists";
    case Trichotomy::NotExists: return "NotExists";
    case Trichotomy::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

struct PowerResult {
  double rho;
  std::vector<double> x;
  double residual;
  std::size_t iterations;
};

PowerResult power_iteration(const TiltedOperator& L, double tol, std::size_t max_iter) {
  const std::size_t M = L.size();
  tol = std::max(tol, 100.0 * std::numeric_limits<double>::epsilon() * L.norm_bound());
  const double s0 = L.shift();
  std::vector<double> x(M, 1.0), y(M);
  double rho_prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 1; it <= max_iter; ++it) {
    L.apply(x, y);
    double xy = 0.0, xx = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      y[i] += s0 * x[i];
      xy += x[i] * y[i];
      xx += x[i] * x[i];
    }
    const double rho = xy / xx;
    double res = 0.0, ymax = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      res = std::max(res, std::abs(y[i] - rho * x[i]));
      ymax = std::max(ymax, std::abs(y[i]));
    }
    // x is sup-normalized from the second pass on, so res is absolute.
    const bool settled = std::abs(rho - rho_prev) <= 0.1 * tol * std::abs(rho);
    for (std::size_t i = 0; i < M; ++i) x[i] = y[i] / ymax;
    if (it > 1 && settled && res <= tol) return {rho, std::move(x), res, it};
    rho_prev = rho;
  }
  fail(ErrorCode::NoConvergence, "power iteration did not converge in " + std::to_string(max_iter) +
                                     " iterations (lambda = " + std::to_string(L.lambda()) +
                                     ", eps = " + std::to_string(L.eps()) + ")");
}

double sup_residual(const TiltedOperator& L, const std::vector<double>& phi, double mu) {
  std::vector<double> y(phi.size());
  L.apply(phi, y);
  double r = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) r = std::max(r, std::abs(y[i] + mu * phi[i]));
  return r;
}

}  // namespace

EigenResult principal_eig(const Problem& problem, double lambda, double eps,
                          const EigenOptions& options) {
  require(options.tol > 0.0, "eigen tolerance must be positive");
  require(std::isfinite(lambda), "tilt must be finite");
  TiltedOperator L(problem, lambda, eps);
  auto pr = power_iteration(L, options.tol, options.max_iter);

  EigenResult r;
  r.lambda = lambda;
  r.eps = eps;
  r.mu = L.shift() - pr.rho;
  r.iterations = pr.iterations;
  r.phi = PeriodicField(std::move(pr.x));
  r.residual = sup_residual(L, r.phi.values(), r.mu);

  if (options.adjoint) {
    if (lambda == 0.0) {
      r.phi_star = r.phi;
    } else {
      TiltedOperator Ls(problem, -lambda, eps);
      auto ps = power_iteration(Ls, options.tol, options.max_iter);
      r.iterations += ps.iterations;
      r.phi_star = PeriodicField(std::move(ps.x));
    }
    TiltedOperator Ls(problem, -lambda, eps);
    r.residual_star = sup_residual(Ls, r.phi_star.values(), r.mu);
  }

  r.gap = -((problem.nl.a().max() - 1.0) + r.mu);
  r.gap_refined = std::numeric_limits<double>::quiet_NaN();
  if (options.classify && eps == 0.0 && r.gap < options.gap_screen) {
    EigenOptions fine = options;
    fine.classify = false;
    fine.adjoint = false;
    const Problem p2 = problem.at_grid(2 * problem.M());
    const auto r2 = principal_eig(p2, lambda, eps, fine);
    r.gap_refined = r2.gap;
    if (r2.gap < options.tol_gap || r.gap >= 1.8 * r2.gap)
      r.classification = EigenClass::EssentialSuspected;
  }
  return r;
}

std::vector<MuPoint> mu_curve(const Problem& problem, std::vector<double> lambdas, double eps,
                              const EigenOptions& options, unsigned threads) {
  require(!lambdas.empty(), "mu_curve needs at least one tilt");
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<MuPoint> out(lambdas.size());
  EigenOptions opt = options;
  opt.adjoint = false;
  opt.classify = false;

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < lambdas.size(); k = next++) {
      try {
        out[k] = {lambdas[k], principal_eig(problem, lambdas[k], eps, opt).mu};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(lambdas.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace perifront

#include "perifront/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "perifront/error.hpp"

namespace perifront {

std::string_view to_string(StartFrom s) noexcept { return s == StartFrom::Above ? "above" : "below"; }

StationaryMap::StationaryMap(const Problem& problem, double eps)
    : StationaryMap(problem, eps, problem.nl.shift_constant(problem.nl.cap())) {}

StationaryMap::StationaryMap(const Problem& problem, double eps, double A)
    : problem_(&problem),
      eps_(eps),
      A_(A),
      conv_(periodize_tilted(problem.kernel, 0.0, problem.e, problem.M())) {
  require(eps >= 0.0, "viscosity must be nonnegative");
}

PeriodicField StationaryMap::operator()(const PeriodicField& u) const {
  const auto& nl = problem_->nl;
  check_same_grid(u, nl.a());
  auto rhs = conv_.apply(u);
  for (std::size_t j = 0; j < u.size(); ++j) rhs[j] += nl.f(j, u[j]) + A_ * u[j];
  return solve_shifted_laplacian(A_ + 1.0, eps_, rhs);
}

double StationaryMap::residual(const PeriodicField& u) const {
  const auto& nl = problem_->nl;
  check_same_grid(u, nl.a());
  auto r = conv_.apply(u);
  const auto lap = laplacian_periodic(u, eps_);
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    s = std::max(s, std::abs(r[j] - u[j] + lap[j] + nl.f(j, u[j])));
  return s;
}

StationaryResult solve_stationary(const Problem& problem, double eps, StartFrom from,
                                  const StationaryOptions& opt) {
  require(opt.tol > 0.0, "stationary tolerance must be positive");
  const auto& nl = problem.nl;
  StationaryResult r;
  r.eps = eps;
  r.from = from;
  const auto eig = principal_eig(problem, 0.0, eps, opt.eig);
  r.mu0 = eig.mu;
  if (eig.mu >= 0.0)
    fail(ErrorCode::NoPositiveState,
         "mu_{eps,0} = " + std::to_string(eig.mu) + " >= 0, only the zero state exists");

  const StationaryMap T(problem, eps);
  PeriodicField u;
  if (from == StartFrom::Above) {
    u = PeriodicField::constant(problem.M(), nl.cap());
  } else {
    double bphi = 0.0;
    for (std::size_t j = 0; j < eig.phi.size(); ++j) bphi = std::max(bphi, nl.b()[j] * eig.phi[j]);
    const double sigma = -eig.mu / (2.0 * bphi);
    u = eig.phi;
    for (double& v : u.values()) v *= sigma;
  }

  for (std::size_t it = 0; it <= opt.max_iter; ++it) {
    const double res = T.residual(u);
    if (res <= opt.tol) {
      r.p = std::move(u);
      r.residual = res;
      r.iterations = it;
      return r;
    }
    u = T(u);
  }
  fail(ErrorCode::NoConvergence,
       "stationary iteration did not converge in " + std::to_string(opt.max_iter) + " steps");
}

LipschitzReport lipschitz_check(const Problem& problem, const PeriodicField& p) {
  const auto& nl = problem.nl;
  check_same_grid(p, nl.a());
  const std::size_t M = p.size();
  const double Mh = static_cast<double>(M);
  LipschitzReport rep;
  rep.delta0 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < M; ++j) {
    rep.delta0 = std::min(rep.delta0, nl.f(j, p[j]) - nl.f_u(j, p[j]) * p[j]);
    rep.fx_norm = std::max(rep.fx_norm, std::abs(nl.f_x(j, p[j])));
  }
  double d2 = 0.0;
  for (std::size_t j = 0; j < M; ++j)
    d2 = std::max(d2, std::abs(p[(j + 1) % M] - 2.0 * p[j] + p[(j + M - 1) % M]) * Mh * Mh);
  rep.slack = d2 / Mh + 1e-12;
  const double L = rep.fx_norm / rep.delta0;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < M; ++j) {
    const double dp = (p[(j + 1) % M] - p[j]) * Mh;
    rep.worst_excess = std::max(rep.worst_excess, std::abs(dp) - L * p[j]);
  }
  rep.holds = rep.delta0 > 0.0 && rep.worst_excess <= rep.slack;
  return rep;
}

}  // namespace perifront

#include "perifront/speed.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "perifront/error.hpp"

namespace perifront {

namespace {

class GEval {
 public:
  GEval(const Problem& p, double eps, const EigenOptions& o, double h = 0.0)
      : p_(p), eps_(eps), h_(h), opt_(o) {
    opt_.adjoint = false;
    opt_.classify = false;
  }
  double mu(double lambda) {
    auto it = cache_.find(lambda);
    if (it != cache_.end()) return it->second;
    const double m = principal_eig(p_, lambda, eps_, opt_).mu;
    cache_.emplace(lambda, m);
    return m;
  }
  /// Speed of the exponential e^{lambda s}; with h > 0 the s-derivative is one-sided.
  double g(double lambda) { return h_ > 0.0 ? mu(lambda) * h_ / std::expm1(-lambda * h_) : -mu(lambda) / lambda; }
  const std::map<double, double>& cache() const { return cache_; }

 private:
  const Problem& p_;
  double eps_, h_;
  EigenOptions opt_;
  std::map<double, double> cache_;
};

std::pair<double, double> golden(GEval& G, double lo, double hi, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = G.g(x1), f2 = G.g(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = G.g(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = G.g(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

namespace {

SpeedResult minimize_speed(const Problem& problem, double eps, double h, const SpeedOptions& opt) {
  require(eps >= 0.0, "viscosity must be nonnegative");
  GEval G(problem, eps, opt.eig, h);
  SpeedResult r;
  r.eps = eps;
  r.e = problem.e;
  r.mu_at_zero = G.mu(0.0);
  if (r.mu_at_zero >= 0.0)
    fail(ErrorCode::NotKPPUnstable,
         "mu_0 = " + std::to_string(r.mu_at_zero) + " >= 0, the zero state is not unstable");

  // Double until g increases.
  double prev = opt.lambda_floor, cur = opt.first_lambda;
  double gcur = G.g(cur);
  double next = 2.0 * cur;
  double gnext = G.g(next);
  while (gnext <= gcur) {
    if (next > opt.lambda_cap)
      fail(ErrorCode::BracketFailure, "-mu/lambda still decreasing at lambda = " + std::to_string(next));
    prev = cur;
    cur = next;
    gcur = gnext;
    next *= 2.0;
    gnext = G.g(next);
  }

  auto [ls, cs] = golden(G, prev, next, opt.lambda_tol);

  // Guard against numerical non-unimodality: any sample below the golden
  // result triggers a dense scan and a local restart.
  double best_l = ls, best_g = cs;
  for (const auto& [l, m] : G.cache())
    if (l > 0.0 && G.g(l) < best_g - 10.0 * opt.tol) best_l = l, best_g = G.g(l);
  if (best_l != ls) {
    r.scan_fallback = true;
    for (double l = 0.01; l <= next; l += 0.01) {
      const double gl = G.g(l);
      if (gl < best_g) best_l = l, best_g = gl;
    }
    auto refined = golden(G, std::max(opt.lambda_floor, best_l - 0.01), best_l + 0.01, opt.lambda_tol);
    ls = refined.first;
    cs = refined.second;
  }

  r.lambda_star = ls;
  r.c_star = cs;
  r.mu_at_star = G.mu(ls);
  for (const auto& [l, m] : G.cache())
    if (l > 0.0) r.curve.push_back({l, G.g(l)});
  return r;
}

}  // namespace

SpeedResult min_speed(const Problem& problem, double eps, const SpeedOptions& opt) {
  return minimize_speed(problem, eps, 0.0, opt);
}

SpeedResult grid_min_speed(const Problem& problem, double eps, std::size_t M, const SpeedOptions& opt) {
  require(M > 0, "grid size must be positive");
  return minimize_speed(problem, eps, 1.0 / static_cast<double>(M), opt);
}

double lambda_of_c(const Problem& problem, double c, const SpeedResult& speed,
                   const SpeedOptions& opt) {
  if (c < speed.c_star - opt.tol)
    fail(ErrorCode::SubcriticalSpeed, "c = " + std::to_string(c) + " is below c* = " +
                                          std::to_string(speed.c_star));
  if (c <= speed.c_star + opt.tol) return speed.lambda_star;
  GEval G(problem, speed.eps, opt.eig);
  double lo = 0.0, hi = speed.lambda_star;
  // h(lambda) - c lambda > 0 on (0, root), <= 0 on [root, lambda*].
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (-G.mu(mid) - c * mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double lambda_of_c(const Problem& problem, double c, double eps, const SpeedOptions& opt) {
  return lambda_of_c(problem, c, min_speed(problem, eps, opt), opt);
}

double kappa_bound(double c, const SpeedResult& speed) {
  const double l = speed.lambda_star;
  return (c * l + speed.mu_at_star) / (l * l);
}

double kappa_bound(double c, const SpeedResult& speed, std::size_t M) {
  const double l = speed.lambda_star, h = 1.0 / static_cast<double>(M);
  const double drift = -c * std::expm1(-l * h) / h;
  const double sh = 2.0 * std::sinh(0.5 * l * h) / h;
  return (drift + speed.mu_at_star) / (sh * sh);
}

}  // namespace perifront

#pragma once

#include <cstddef>
#include <vector>

#include "perifront/spectral.hpp"

namespace perifront {

struct SpeedOptions {
  /// Target accuracy of c*.
  double tol = 1e-10;
  /// Width of the final golden-section interval in lambda.
  double lambda_tol = 1e-7;
  double lambda_floor = 1e-4;
  double lambda_cap = 50.0;
  double first_lambda = 0.25;
  EigenOptions eig{.tol = 1e-12};
};

struct SpeedSample {
  double lambda;
  /// -mu_lambda / lambda (grid_min_speed: -mu_lambda h / (1 - e^{-lambda h})).
  double g;
};

struct SpeedResult {
  double c_star = 0.0;
  double lambda_star = 0.0;
  double mu_at_star = 0.0;
  double mu_at_zero = 0.0;
  double eps = 0.0;
  Direction e = Direction::Right;
  /// Every evaluated point, sorted by lambda.
  std::vector<SpeedSample> curve;
  bool scan_fallback = false;
};

/// c* = inf over lambda > 0 of -mu_{eps,lambda}/lambda by doubling + golden section.
/// Throws NotKPPUnstable or BracketFailure.
SpeedResult min_speed(const Problem& problem, double eps, const SpeedOptions& options = {});

/// Minimal speed of the front scheme, whose s-derivative is the backward
/// difference with step 1/M: inf of -mu_lambda h / (1 - e^{-lambda h}).
/// Exceeds c* by about c* lambda* h / 2.
SpeedResult grid_min_speed(const Problem& problem, double eps, std::size_t M,
                           const SpeedOptions& options = {});

/// Smallest positive root of -mu_{eps,lambda} = c lambda, to 1e-9 in lambda.
/// Throws SubcriticalSpeed when c < c* - tol.
double lambda_of_c(const Problem& problem, double c, const SpeedResult& speed,
                   const SpeedOptions& options = {});
double lambda_of_c(const Problem& problem, double c, double eps, const SpeedOptions& options = {});

/// Largest s-viscosity for which the exponential supersolution argument works:
/// (c lambda* + mu_{lambda*}) / lambda*^2.
double kappa_bound(double c, const SpeedResult& speed);
/// Same bound for the upwind/central s-stencil with spacing 1/M:
/// (c (1 - e^{-lambda* h})/h + mu_{lambda*}) / (4 sinh^2(lambda* h/2)/h^2).
double kappa_bound(double c, const SpeedResult& speed, std::size_t M);

}  // namespace perifront

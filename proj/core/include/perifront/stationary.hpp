#pragma once

#include <cstddef>
#include <string_view>

#include "perifront/spectral.hpp"

namespace perifront {

enum class StartFrom { Above, Below };
std::string_view to_string(StartFrom s) noexcept;

struct StationaryOptions {
  double tol = 1e-10;
  std::size_t max_iter = 200000;
  EigenOptions eig{.tol = 1e-12, .classify = false, .adjoint = false};
};

struct StationaryResult {
  PeriodicField p;
  double eps = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  StartFrom from = StartFrom::Above;
  double mu0 = 0.0;
};

/// Order-preserving map u -> (A+1 - eps Lap_h)^{-1} [K_0 * u + f(x,u) + A u].
class StationaryMap {
 public:
  StationaryMap(const Problem& problem, double eps);
  StationaryMap(const Problem& problem, double eps, double A);

  double shift() const noexcept { return A_; }
  PeriodicField operator()(const PeriodicField& u) const;
  /// sup |K_0 * u - u + eps Lap_h u + f(x,u)|.
  double residual(const PeriodicField& u) const;

 private:
  const Problem* problem_;
  double eps_, A_;
  CyclicConvolver conv_;
};

/// Positive periodic solution of K_0 * p - p + eps Lap_h p + f(x,p) = 0.
/// Throws NoPositiveState when mu_{eps,0} >= 0, NoConvergence after max_iter.
StationaryResult solve_stationary(const Problem& problem, double eps, StartFrom from,
                                  const StationaryOptions& options = {});

struct LipschitzReport {
  /// max_j |D^+ p_j| - (||f_x||/delta0) p_j.
  double worst_excess = 0.0;
  double slack = 0.0;
  double delta0 = 0.0;
  double fx_norm = 0.0;
  bool holds = false;
};

/// One-sided difference bound |Dp| <= (||f_x(.,p)||/delta0) p + O(h), with
/// delta0 = min (f(x,p) - f_u(x,p) p) and slack h * max |D^+ D^- p|.
LipschitzReport lipschitz_check(const Problem& problem, const PeriodicField& p);

}  // namespace perifront

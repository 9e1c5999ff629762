#include "perifront/validation.hpp"

#include <algorithm>
#include <cmath>

#include "perifront/error.hpp"
#include "perifront/speed.hpp"
#include "perifront/stationary.hpp"

namespace perifront {

namespace {

// value <= threshold passes.
PropertyCheck at_most(std::string name, double value, double threshold) {
  return {std::move(name), value <= threshold, value, threshold};
}

}  // namespace

std::vector<PropertyCheck> run_property_battery(const Problem& problem, const ValidationOptions& opt) {
  std::vector<PropertyCheck> out;
  const EigenOptions eo{.tol = opt.eig_tol, .classify = false, .adjoint = false};

  const auto kpp = validate_kpp(problem.nl);
  out.push_back({"kpp.zero_at_origin", kpp.zero_at_origin, 0.0, 0.0});
  out.push_back(at_most("kpp.ratio_decreasing", kpp.max_ratio_increment, 0.0));
  out.push_back(at_most("kpp.nonpositive_above_cap", kpp.max_f_above_cap, 0.0));

  const auto K0 = periodize_tilted(problem.kernel, 0.0, problem.e, problem.M());
  out.push_back(at_most("kernel.unit_mass", std::abs(K0.mass() - 1.0), 1e-12));

  const auto e0 = principal_eig(problem, 0.0, 0.0, EigenOptions{.tol = opt.eig_tol, .classify = false});
  out.push_back(at_most("eig.residual", e0.residual, 10.0 * opt.eig_tol));
  out.push_back(at_most("eig.upper_bound", problem.nl.a().max() - 1.0 + e0.mu, 1e-10));
  out.push_back({"eig.positive", e0.phi.min() > 0.0, e0.phi.min(), 0.0});

  const double mp = principal_eig(problem, 1.0, 0.0, eo).mu;
  const double mm = principal_eig(problem, -1.0, 0.0, eo).mu;
  out.push_back(at_most("eig.evenness", std::abs(mp - mm), 1e-9));

  std::vector<double> lambdas;
  for (int k = 0; k * opt.lambda_step <= opt.lambda_max + 1e-12; ++k) lambdas.push_back(k * opt.lambda_step);
  const auto curve = mu_curve(problem, lambdas, 0.0, eo);
  double convex = -INFINITY;
  for (std::size_t k = 1; k + 1 < curve.size(); ++k)
    convex = std::max(convex, -curve[k].mu - 0.5 * (-curve[k - 1].mu - curve[k + 1].mu));
  out.push_back(at_most("eig.midpoint_convexity", convex, 1e-9));

  Problem raised = problem;
  raised.nl = Nonlinearity::logistic(problem.nl.a_medium().shifted(opt.offset), problem.nl.b_medium(),
                                     problem.M());
  const double mr = principal_eig(raised, 0.0, 0.0, eo).mu;
  out.push_back(at_most("eig.monotone_in_a", mr - e0.mu, 1e-10));
  out.push_back(at_most("eig.lipschitz_in_a", std::abs(mr - e0.mu) - opt.offset, 1e-10));

  if (opt.include_stationary && e0.mu < 0.0) {
    const auto above = solve_stationary(problem, 0.0, StartFrom::Above);
    const auto below = solve_stationary(problem, 0.0, StartFrom::Below);
    out.push_back(at_most("stationary.two_sided_agreement", sup_distance(above.p, below.p), 1e-8));
    out.push_back({"stationary.positive", above.p.min() > 0.0, above.p.min(), 0.0});
    out.push_back(at_most("stationary.below_cap", above.p.max() - problem.nl.cap(), 1e-12));
    const auto lip = lipschitz_check(problem, above.p);
    out.push_back(at_most("stationary.lipschitz", lip.worst_excess, lip.slack));
  }

  if (opt.include_speed && e0.mu < 0.0) {
    const auto sp = min_speed(problem, 0.0);
    double worst = -INFINITY;
    for (const auto& s : sp.curve) worst = std::max(worst, sp.c_star - s.g);
    for (const auto& pt : curve)
      if (pt.lambda > 0.0) worst = std::max(worst, sp.c_star + pt.mu / pt.lambda);
    out.push_back(at_most("speed.variational_bound", worst, 1e-9));
    double prev = INFINITY, rise = -INFINITY;
    for (int k = 0; k < 5; ++k) {
      const double c = sp.c_star * (1.0 + 0.25 * k);
      const double l = lambda_of_c(problem, c, sp);
      rise = std::max(rise, l - prev);
      prev = l;
    }
    out.push_back(at_most("speed.lambda_of_c_nonincreasing", rise, 1e-8));
    Problem flipped = problem;
    flipped.e = problem.e == Direction::Right ? Direction::Left : Direction::Right;
    const auto sl = min_speed(flipped, 0.0);
    out.push_back(at_most("speed.direction_symmetry", std::abs(sl.c_star - sp.c_star), 1e-9));
  }
  return out;
}

}  // namespace perifront

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "perifront/error.hpp"
#include "perifront/front.hpp"

namespace perifront {

DecayFit fit_decay(const FrontGrid& front, Side side, const DecayOptions& opt) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < front.rows(); ++i) {
    const double s = front.s(i);
    if (s < -front.r + opt.boundary_margin || s > front.R - opt.boundary_margin) continue;
    double v;
    if (side == Side::Left) {
      v = front.row_max(i);
    } else {
      if (s < 0.0) continue;
      v = 0.0;
      for (std::size_t j = 0; j < front.M; ++j) v = std::max(v, front.upper[j] - front.at(i, j));
    }
    if (v >= opt.band_lo && v <= opt.band_hi) {
      xs.push_back(s);
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < opt.min_samples)
    fail(ErrorCode::InsufficientTail, std::string(side == Side::Left ? "left" : "right") +
                                          " tail has " + std::to_string(xs.size()) +
                                          " samples in the fitting band");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  const double slope = sxy / sxx;
  return {side == Side::Left ? slope : -slope, xs.size(), xs.front(), xs.back()};
}

EnergyBalance energy_balance(const Problem& problem, const FrontGrid& front) {
  const std::size_t M = front.M;
  if (problem.M() != M) fail(ErrorCode::GridMismatch, "front grid and medium grid differ");
  const double h = front.h();
  const auto& p = front.upper;
  EnergyBalance e;
  double lhs = 0.0;
  for (std::size_t i = 1; i < front.rows(); ++i)
    for (std::size_t j = 0; j < M; ++j) {
      const double d = (front.at(i, j) - front.at(i - 1, j)) / h;
      lhs += d * d;
    }
  e.lhs = front.c * lhs * h * h;

  double grad = 0.0, nonlocal = 0.0, pot = 0.0;
  const auto K = periodize_tilted(problem.kernel, 0.0, front.e, M);
  for (std::size_t j = 0; j < M; ++j) {
    const double d = (p[(j + 1) % M] - p[j]) / h;
    grad += d * d * h;
    pot += problem.nl.F(j, p[j]) * h;
    for (std::size_t l = 0; l < M; ++l) {
      const double q = p[j] - p[l];
      nonlocal += K.K[(j + M - l) % M] * q * q * h * h;
    }
  }
  e.rhs = -0.5 * front.eps * grad - 0.25 * nonlocal + pot;
  e.gap = std::abs(e.lhs - e.rhs) / std::abs(e.rhs);
  return e;
}

double energy_identity_gap(const Problem& problem, const FrontGrid& front) {
  return energy_balance(problem, front).gap;
}

double weak_residual(const Problem& problem, const FrontGrid& front) {
  const auto res = front_residual(problem, front);
  const std::size_t M = front.M, rows = front.rows();
  double worst = 0.0;
  for (std::size_t first = 1; first + M <= rows - 1; first += M) {
    double s = 0.0;
    for (std::size_t i = first; i < first + M; ++i)
      for (std::size_t j = 0; j < M; ++j) s += res[i * M + j];
    worst = std::max(worst, std::abs(s) / static_cast<double>(M * M));
  }
  return worst;
}

Diagnostics diagnose(const Problem& problem, const FrontGrid& front) {
  Diagnostics d;
  const std::size_t M = front.M, rows = front.rows();
  const auto res = front_residual(problem, front);
  for (double v : res) d.residual = std::max(d.residual, std::abs(v));
  d.weak_residual = weak_residual(problem, front);

  const auto eb = energy_balance(problem, front);
  d.energy_gap = eb.gap;
  d.energy_lhs = eb.lhs;
  d.energy_rhs = eb.rhs;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const auto f = fit_decay(front, Side::Left);
    d.decay_rate_left = f.rate;
    d.decay_samples_left = f.samples;
  } catch (const Error& e) {
    d.decay_rate_left = nan;
    d.flags.emplace_back(e.what());
  }
  try {
    const auto f = fit_decay(front, Side::Right);
    d.decay_rate_right = f.rate;
    d.decay_samples_right = f.samples;
  } catch (const Error& e) {
    d.decay_rate_right = nan;
    d.flags.emplace_back(e.what());
  }

  d.left_limit = front.row_max(front.row_of(-front.r + 1.0));
  const std::size_t ir = front.row_of(front.R - 1.0);
  for (std::size_t j = 0; j < M; ++j)
    d.right_limit = std::max(d.right_limit, std::abs(front.upper[j] - front.at(ir, j)));

  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      const double v = front.at(i, j);
      if (i + 1 < rows) d.monotonicity_violation = std::max(d.monotonicity_violation, v - front.at(i + 1, j));
      d.order_violation = std::max({d.order_violation, -v, v - front.upper[j]});
    }
  return d;
}

std::vector<Stage> default_schedule(double kappa_c) {
  std::vector<Stage> s;
  if (kappa_c > 0.0)
    for (double k : {kappa_c, kappa_c / 4.0, kappa_c / 16.0}) s.push_back({k, 1e-2});
  for (double e : {1e-2, 1e-3, 1e-4, 0.0}) s.push_back({0.0, e});
  return s;
}

ContinuationResult continue_front(const Problem& problem, double c, const ContinuationOptions& opt) {
  ContinuationResult out;
  out.speed = min_speed(problem, 0.0, opt.speed);
  const double cs = out.speed.c_star;
  if (c < cs - 1e-9 * std::max(1.0, cs))
    fail(ErrorCode::SubcriticalSpeed, "no pulsating front below c* = " + std::to_string(cs));
  const bool critical = c < cs * (1.0 + opt.margin);
  out.grid_speed = grid_min_speed(problem, 0.0, problem.M(), opt.speed);
  const double ch = out.grid_speed.c_star;
  if (c < ch && !critical)
    fail(ErrorCode::SubcriticalSpeed, "c = " + std::to_string(c) + " is below the minimal speed " +
                                          std::to_string(ch) + " of the M = " +
                                          std::to_string(problem.M()) + " front scheme; refine M");
  out.c = std::max(c, ch);
  out.kappa_c = out.c > ch ? std::max(0.0, kappa_bound(out.c, out.speed, problem.M())) : 0.0;
  out.lambda_c = lambda_of_c(problem, std::max(c, cs), out.speed, opt.speed);
  const auto schedule = opt.schedule.empty() ? default_schedule(out.kappa_c) : opt.schedule;

  std::map<double, FrontState> states;
  std::optional<FrontGrid> prev;
  double prev_res = 0.0;
  for (const Stage& stage : schedule) {
    auto it = states.find(stage.eps);
    if (it == states.end()) it = states.emplace(stage.eps, front_state(problem, stage.eps, opt.stationary)).first;
    auto shot = shoot_sigma(problem, it->second, out.speed, out.c, stage.kappa, opt.r, opt.R, opt.shoot,
                            prev ? &*prev : nullptr);
    StageReport rep{stage, shot.sigma, shot.solution.residual, shot.shots, shot.iterations};
    out.stages.push_back(rep);
    if (opt.on_stage) opt.on_stage(rep);
    const double floor = std::max(prev_res, opt.shoot.solve.tol);
    if (prev && rep.residual > 10.0 * floor)
      fail(ErrorCode::StageRegression, "residual grew to " + std::to_string(rep.residual) +
                                           " at kappa = " + std::to_string(stage.kappa) +
                                           ", eps = " + std::to_string(stage.eps));
    prev_res = rep.residual;
    prev = std::move(shot.solution.front);
  }
  out.front = std::move(*prev);
  out.diagnostics = diagnose(problem, out.front);
  out.diagnostics.critical = critical;
  if (critical) out.diagnostics.flags.emplace_back("critical speed: decay fits use the relaxed tolerance");
  if (out.c > c)
    out.diagnostics.flags.emplace_back("speed raised from " + std::to_string(c) +
                                       " to the grid minimal speed " + std::to_string(out.c));
  return out;
}

}  // namespace perifront

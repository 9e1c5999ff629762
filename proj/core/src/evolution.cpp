#include "perifront/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "perifront/error.hpp"
#include "perifront/stationary.hpp"

namespace perifront {

namespace {

std::size_t grid_points(double L, std::size_t M) {
  if (!(L > 0.0) || L != std::floor(L)) fail(ErrorCode::InvalidInput, "evolution half-width L must be a positive integer");
  return static_cast<std::size_t>(2.0 * L) * M;
}

}  // namespace

std::vector<double> compact_initial_data(const PeriodicField& p, double L, double halfwidth) {
  const std::size_t M = p.size();
  const std::size_t n = grid_points(L, M);
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -L + static_cast<double>(i) / static_cast<double>(M);
    if (std::abs(x) <= halfwidth) u[i] = p[i % M];
  }
  return u;
}

Trajectory evolve(const Problem& problem, std::vector<double> u, const EvolutionOptions& opt) {
  const auto& nl = problem.nl;
  const std::size_t M = nl.size();
  const std::size_t n = grid_points(opt.L, M);
  if (u.size() != n) fail(ErrorCode::GridMismatch, "initial data does not match the evolution grid");
  require(opt.T > 0.0 && opt.dt > 0.0 && opt.snapshots >= 1, "evolution needs T, dt > 0 and snapshots >= 1");

  double umax = nl.cap();
  for (double v : u) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::InvalidInput, "initial data must be finite and >= 0");
    umax = std::max(umax, v);
  }
  const double fu = nl.shift_constant(umax) - 1.0;
  if (opt.dt * (1.0 + fu) > 0.5)
    fail(ErrorCode::StabilityViolation, "dt * (1 + max|f_u|) = " + std::to_string(opt.dt * (1.0 + fu)) +
                                            " exceeds 0.5");

  Trajectory tr;
  tr.M = M;
  tr.L = opt.L;
  tr.reference = opt.reference > 0.0 ? opt.reference : solve_stationary(problem, 0.0, StartFrom::Above).p.min();

  auto w = problem.kernel.line_weights(M);
  for (double& v : w) v /= static_cast<double>(M);
  const auto m = static_cast<std::ptrdiff_t>(M);
  const auto nn = static_cast<std::ptrdiff_t>(n);
  const auto guard = static_cast<std::size_t>(opt.guard * static_cast<double>(M));
  const double guard_level = opt.guard_fraction * tr.reference;

  const auto steps = static_cast<std::size_t>(std::llround(opt.T / opt.dt));
  std::vector<std::size_t> snap_at;
  for (std::size_t k = 1; k <= opt.snapshots; ++k)
    snap_at.push_back(static_cast<std::size_t>(std::llround(static_cast<double>(steps) * static_cast<double>(k) /
                                                            static_cast<double>(opt.snapshots))));
  tr.snapshots.push_back({0.0, u});

  std::vector<double> conv(n);
  std::size_t next_snap = 0;
  for (std::size_t step = 1; step <= steps; ++step) {
    std::fill(conv.begin(), conv.end(), 0.0);
    for (std::ptrdiff_t q = -m; q <= m; ++q) {
      const double wq = w[static_cast<std::size_t>(q + m)];
      if (wq == 0.0) continue;
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, q), hi = std::min(nn, nn + q);
      for (std::ptrdiff_t i = lo; i < hi; ++i) conv[i] += wq * u[i - q];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double v = u[i];
      u[i] = v + opt.dt * (conv[i] - v + nl.f(i % M, v));
    }
    while (next_snap < snap_at.size() && snap_at[next_snap] == step) {
      for (std::size_t i = 0; i < guard; ++i)
        if (u[i] > guard_level || u[n - 1 - i] > guard_level)
          fail(ErrorCode::DomainTooSmall, "front reached the domain boundary at t = " +
                                              std::to_string(static_cast<double>(step) * opt.dt));
      tr.snapshots.push_back({static_cast<double>(step) * opt.dt, u});
      ++next_snap;
    }
  }
  return tr;
}

std::optional<double> level_position(const Trajectory& tr, const Snapshot& snap, double level, Front side) {
  const auto& u = snap.u;
  const std::size_t n = u.size();
  const double h = 1.0 / static_cast<double>(tr.M);
  if (side == Front::Right) {
    for (std::size_t i = n; i-- > 0;)
      if (u[i] >= level) {
        double X = tr.x(i);
        if (i + 1 < n) X += (u[i] - level) / (u[i] - u[i + 1]) * h;
        return X;
      }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      if (u[i] >= level) {
        double X = tr.x(i);
        if (i > 0) X -= (u[i] - level) / (u[i] - u[i - 1]) * h;
        return -X;
      }
  }
  return std::nullopt;
}

double spreading_speed(const Trajectory& tr, double theta, Front side) {
  require(theta > 0.0 && theta < 1.0, "level theta must lie in (0, 1)");
  require(!tr.snapshots.empty(), "empty trajectory");
  const double T = tr.snapshots.back().t;
  const double level = theta * tr.reference;
  std::vector<double> ts, xs;
  for (const auto& s : tr.snapshots) {
    if (s.t < 0.5 * T) continue;
    const auto X = level_position(tr, s, level, side);
    if (!X) fail(ErrorCode::LevelNotReached, "level " + std::to_string(level) + " absent at t = " + std::to_string(s.t));
    ts.push_back(s.t);
    xs.push_back(*X);
  }
  if (ts.size() < 10) fail(ErrorCode::InvalidInput, "need at least 10 snapshots in the second half of the run");
  const double k = static_cast<double>(ts.size());
  double mt = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) mt += ts[i], mx += xs[i];
  mt /= k;
  mx /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - mt) * (xs[i] - mx);
    sxx += (ts[i] - mt) * (ts[i] - mt);
  }
  return sxy / sxx;
}

}  // namespace perifront

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "perifront/model.hpp"

namespace perifront {

struct EvolutionOptions {
  /// Domain [-L, L), L a positive integer; grid x_i = -L + i/M.
  double L = 300.0;
  double T = 200.0;
  double dt = 0.01;
  std::size_t snapshots = 100;
  /// Reference level for level sets and the boundary guard (min p); computed when <= 0.
  double reference = 0.0;
  /// DomainTooSmall fires once u exceeds guard_fraction * reference within guard of the ends.
  double guard = 2.0;
  double guard_fraction = 0.01;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
};

struct Trajectory {
  std::size_t M = 0;
  double L = 0.0;
  double reference = 0.0;
  std::vector<Snapshot> snapshots;

  std::size_t points() const noexcept { return static_cast<std::size_t>(2.0 * L * static_cast<double>(M)); }
  double x(std::size_t i) const noexcept { return -L + static_cast<double>(i) / static_cast<double>(M); }
};

/// p(x) on [-halfwidth, halfwidth], zero elsewhere, on the evolution grid.
std::vector<double> compact_initial_data(const PeriodicField& p, double L, double halfwidth);

/// Explicit Euler for u_t = J * u - u + f(x,u) with u = 0 outside [-L, L).
/// Throws StabilityViolation or DomainTooSmall.
Trajectory evolve(const Problem& problem, std::vector<double> u0, const EvolutionOptions& options = {});

enum class Front { Right, Left };

/// Outermost crossing of `level`, as a distance travelled (x on the right, -x on the left).
/// Empty when u stays below the level.
std::optional<double> level_position(const Trajectory& traj, const Snapshot& snap, double level, Front side);

/// Slope of the outermost crossing of theta * reference over the second half of the run.
/// Positive for an invading front on either side. Throws LevelNotReached.
double spreading_speed(const Trajectory& traj, double theta, Front side = Front::Right);

}  // namespace perifront

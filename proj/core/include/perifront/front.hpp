#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "perifront/speed.hpp"
#include "perifront/stationary.hpp"

namespace perifront {

/// Ingredients of the truncated problem at a given x-viscosity.
struct FrontState {
  double eps = 0.0;
  PeriodicField p;    ///< p_eps
  PeriodicField phi;  ///< phi_{eps,0}, sup-normalized
  double mu0 = 0.0;
  /// -mu0 / (2 max b phi): sigma phi is a subsolution below this.
  double sigma_sub = 0.0;
  /// min p / phi: sigma phi <= p below this.
  double sigma_order = 0.0;
  /// Admissible range [0, sigma_max] for the left amplitude.
  double sigma_max = 0.0;
};

FrontState front_state(const Problem& problem, double eps, const StationaryOptions& options = {});

/// psi(s_i, x_j) on s_i = -r + i/M, i = 0..N, x_j = j/M.
struct FrontGrid {
  std::size_t M = 0;
  double r = 0.0, R = 0.0;
  double c = 0.0, eps = 0.0, kappa = 0.0, sigma = 0.0;
  Direction e = Direction::Right;
  PeriodicField lower;  ///< sigma phi_eps: value of psi for s <= -r
  PeriodicField upper;  ///< p_eps: value of psi for s >= R
  std::vector<double> psi;

  std::size_t rows() const noexcept { return M == 0 ? 0 : psi.size() / M; }
  double h() const noexcept { return 1.0 / static_cast<double>(M); }
  double s(std::size_t i) const noexcept { return -r + static_cast<double>(i) * h(); }
  std::size_t row_of(double s_value) const;
  double& at(std::size_t i, std::size_t j) noexcept { return psi[i * M + j]; }
  double at(std::size_t i, std::size_t j) const noexcept { return psi[i * M + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {psi.data() + i * M, M}; }
  std::span<double> row(std::size_t i) noexcept { return {psi.data() + i * M, M}; }
  double row_max(std::size_t i) const;

  /// Empty grid on [-r, R] with both boundary rows set; interior = lower.
  static FrontGrid make(std::size_t M, double r, double R, const PeriodicField& lower,
                        const PeriodicField& upper);
};

/// M[psi](s_i, x_j) = (1/M) sum_q w_q psi(s_i - q e/M, x_j - q/M) on every row,
/// reading lower below the window and upper above it.
std::vector<double> apply_M(const Problem& problem, const FrontGrid& grid);

/// Coefficients of the discrete operator (A+1) - eps Lap_x - kappa D_ss + c D_s^-.
struct FrontStencil {
  double diag = 0.0;
  double s_minus = 0.0, s_plus = 0.0;
  double x_minus = 0.0, x_plus = 0.0;
  bool is_m_matrix() const noexcept;
};

FrontStencil front_stencil(double c, double eps, double kappa, std::size_t M, double A);

/// Exact solver for the linear step: FFT in x, then one tridiagonal solve in s
/// per Fourier mode, with Dirichlet rows at both window ends.
class FrontLinearSolver {
 public:
  /// `row_shift` (optional, one entry per row) is added to the diagonal of each row.
  FrontLinearSolver(std::size_t M, std::size_t rows, const FrontStencil& stencil,
                    std::span<const double> row_shift = {});
  ~FrontLinearSolver();
  FrontLinearSolver(FrontLinearSolver&&) noexcept;
  FrontLinearSolver& operator=(FrontLinearSolver&&) noexcept;

  /// rhs holds all rows; rows 0 and rows-1 of `psi` are the boundary data.
  /// Writes the interior rows of `psi`.
  void solve(std::span<const double> rhs, std::span<double> psi) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct TruncatedOptions {
  double tol = 1e-9;
  /// Bound on |residual| / psi, which controls the exponentially small left tail.
  double rtol = 1e-10;
  /// Below this residual the monotone steps are replaced by Newton-GMRES
  /// steps preconditioned with the same linear solve; 0 disables Newton.
  double newton_switch = 1e-1;
  double gmres_rtol = 1e-4;
  std::size_t gmres_restart = 40;
  std::size_t gmres_max_matvec = 400;
  std::size_t max_iter = 20000;
  /// Allowed decrease of psi along s before MonotonicityLost is raised.
  double monotone_tol = 1e-12;
};

struct TruncatedResult {
  FrontGrid front;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Minimal solution of the truncated problem by monotone iteration.
/// `start` (optional) must lie between 0 and p; a subsolution keeps the
/// iteration monotone. Throws SigmaOutOfRange, NoConvergence, MonotonicityLost.
TruncatedResult solve_truncated(const Problem& problem, const FrontState& state, double c,
                                double kappa, double r, double R, double sigma,
                                const TruncatedOptions& options = {},
                                const FrontGrid* start = nullptr);

/// Interior residual field of c psi_s = M[psi] - psi + f + eps Lap psi + kappa psi_ss
/// (rows 1..N-1; boundary rows are zero).
std::vector<double> front_residual(const Problem& problem, const FrontGrid& grid);

struct ShootOptions {
  double k_norm = 10.0;
  /// Relative tolerance on max_x psi(0, x) against the target.
  double target_rtol = 1e-8;
  std::size_t max_shots = 60;
  TruncatedOptions solve;
};

struct ShootResult {
  double sigma = 0.0;
  TruncatedResult solution;
  double target = 0.0;
  double achieved = 0.0;
  std::size_t shots = 0;
  std::size_t iterations = 0;
};

/// Finds sigma with max_x psi_sigma(0, x) = min p / k_norm. `speed` is the
/// eps = 0 minimal speed; `warm` optionally seeds the first shot.
/// Throws SubcriticalSpeed, InvalidInput (kappa above the bound), BracketFailure.
ShootResult shoot_sigma(const Problem& problem, const FrontState& state, const SpeedResult& speed,
                        double c, double kappa, double r, double R, const ShootOptions& options = {},
                        const FrontGrid* warm = nullptr);

struct DecayFit {
  double rate = 0.0;
  std::size_t samples = 0;
  double s_first = 0.0, s_last = 0.0;
};

enum class Side { Left, Right };

struct DecayOptions {
  double band_lo = 1e-10;
  double band_hi = 1e-2;
  std::size_t min_samples = 20;
  /// Samples closer than this to either window end are ignored.
  double boundary_margin = 2.0;
};

/// Least-squares rate of log sup_x psi (left) or log sup_x (p - psi) (right).
/// Throws InsufficientTail.
DecayFit fit_decay(const FrontGrid& front, Side side, const DecayOptions& options = {});

struct EnergyBalance {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// c int |psi_s|^2 against -(eps/2) int |p'|^2 - 1/4 int int j (p(x)-p(y))^2 + int F(x,p).
EnergyBalance energy_balance(const Problem& problem, const FrontGrid& front);
double energy_identity_gap(const Problem& problem, const FrontGrid& front);

/// Largest |mean residual| over unit cells [s, s+1) x [0, 1) inside the window.
double weak_residual(const Problem& problem, const FrontGrid& front);

struct Diagnostics {
  double residual = 0.0;
  double weak_residual = 0.0;
  double energy_gap = 0.0;
  double energy_lhs = 0.0;
  double energy_rhs = 0.0;
  double decay_rate_left = 0.0;
  double decay_rate_right = 0.0;
  std::size_t decay_samples_left = 0;
  std::size_t decay_samples_right = 0;
  /// sup_x psi(-r + 1, x) and sup_x |p - psi|(R - 1, x).
  double left_limit = 0.0;
  double right_limit = 0.0;
  /// Largest decrease of psi along s, and largest excursion outside [0, p].
  double monotonicity_violation = 0.0;
  double order_violation = 0.0;
  bool critical = false;
  std::vector<std::string> flags;
};

Diagnostics diagnose(const Problem& problem, const FrontGrid& front);

struct Stage {
  double kappa = 0.0;
  double eps = 0.0;
};

struct StageReport {
  Stage stage;
  double sigma = 0.0;
  double residual = 0.0;
  std::size_t shots = 0;
  std::size_t iterations = 0;
};

struct ContinuationOptions {
  /// Empty: kappa(c), kappa/4, kappa/16, 0 at eps = 1e-2, then eps = 1e-3, 1e-4, 0.
  std::vector<Stage> schedule;
  double r = 40.0;
  double R = 40.0;
  /// Speeds within this fraction of c* are treated as critical.
  double margin = 0.05;
  ShootOptions shoot;
  StationaryOptions stationary;
  SpeedOptions speed;
  std::function<void(const StageReport&)> on_stage;
};

struct ContinuationResult {
  FrontGrid front;
  Diagnostics diagnostics;
  std::vector<StageReport> stages;
  SpeedResult speed;
  /// Minimal speed of the discrete scheme (grid_min_speed at eps = 0).
  SpeedResult grid_speed;
  /// Speed actually used: max(c, grid_speed.c_star), so above c only in the critical case.
  double c = 0.0;
  double kappa_c = 0.0;
  double lambda_c = 0.0;
};

std::vector<Stage> default_schedule(double kappa_c);

/// Warm-started shoot_sigma solves along the (kappa, eps) schedule.
/// Critical speeds below the grid minimal speed are raised to it and flagged.
/// Throws SubcriticalSpeed, StageRegression and errors from the inner solves.
ContinuationResult continue_front(const Problem& problem, double c,
                                  const ContinuationOptions& options = {});

}  // namespace perifront

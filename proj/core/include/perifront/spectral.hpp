#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "perifront/grid.hpp"
#include "perifront/model.hpp"

namespace perifront {

/// Matrix-free L_{eps,lambda} w = eps Lap_h w + K_lambda * w - w + a w, a = f_u(x,0).
class TiltedOperator {
 public:
  TiltedOperator(const Problem& problem, double lambda, double eps);

  std::size_t size() const noexcept { return a_.size(); }
  double lambda() const noexcept { return lambda_; }
  double eps() const noexcept { return eps_; }
  /// Shift s0 making s0 I + L entrywise nonnegative.
  double shift() const noexcept { return shift_; }
  /// Bound on the sup-norm of s0 I + L; sets the roundoff floor of the stopping test.
  double norm_bound() const noexcept { return norm_; }

  void apply(std::span<const double> w, std::span<double> out) const;

 private:
  TiltedOperator(const Problem& problem, double eps, TiltedPeriodizedKernel K);

  double lambda_, eps_, shift_, norm_;
  std::vector<double> a_;
  CyclicConvolver conv_;
};

PeriodicField apply_operator(const Problem& problem, double lambda, double eps,
                             const PeriodicField& w);

enum class EigenClass { PrincipalEigenpair, EssentialSuspected };
std::string_view to_string(EigenClass c) noexcept;

struct EigenOptions {
  /// Clamped below at 100 machine epsilons times the operator norm bound.
  double tol = 1e-10;
  std::size_t max_iter = 50000;
  /// Gap below which the supremum is suspected not to be attained.
  double tol_gap = 1e-6;
  /// Gaps above this are accepted without a refinement run.
  double gap_screen = 0.05;
  bool classify = true;
  bool adjoint = true;
};

struct EigenResult {
  double lambda = 0.0;
  double eps = 0.0;
  /// L phi + mu phi = 0.
  double mu = 0.0;
  PeriodicField phi;
  PeriodicField phi_star;
  double residual = 0.0;
  double residual_star = 0.0;
  std::size_t iterations = 0;
  EigenClass classification = EigenClass::PrincipalEigenpair;
  /// -(max(f_u - 1) + mu); nonnegative at eps = 0.
  double gap = 0.0;
  /// Same gap on the doubled grid, NaN when the refinement run was skipped.
  double gap_refined = 0.0;
};

/// Perron root of s0 I + L by power iteration. Throws NoConvergence.
EigenResult principal_eig(const Problem& problem, double lambda, double eps,
                          const EigenOptions& options = {});

struct MuPoint {
  double lambda;
  double mu;
};

/// principal_eig over several tilts; `threads` workers evaluate points concurrently.
std::vector<MuPoint> mu_curve(const Problem& problem, std::vector<double> lambdas, double eps,
                              const EigenOptions& options = {}, unsigned threads = 1);

enum class Trichotomy { Exists, NotExists, Inconclusive };
std::string_view to_string(Trichotomy t) noexcept;

struct CriteriaEvidence {
  Trichotomy verdict = Trichotomy::Inconclusive;
  std::string reason;
  /// Coefficient of the zeroth-order term, f_u - 1, and its maximum.
  double A = 0.0;
  /// Integral of 1/(A - a) over the cell; +inf when it diverges or saturates.
  double I = 0.0;
  bool I_saturated = false;
  /// Midpoint sums of 1/(A - a) on successively doubled grids.
  std::vector<double> I_sequence;
  /// sup over the cell of the tilted periodized kernel.
  double M_const = 0.0;
  double M_const_times_I = 0.0;
  /// Constructive branch: best m, floor d of J^(m) on an integer cell, shift and eps_s.
  int m = 0;
  double d = 0.0;
  double shift = 0.0;
  double eps_s = 0.0;
  double constructive_value = 0.0;
  bool constructive_holds = false;
};

struct CriteriaOptions {
  /// Base resolution for the cell quadratures; refined up to 16x.
  std::size_t quadrature_M = 1024;
  double saturation = 1e12;
  double divergence_ratio = 0.9;
  int max_m = 8;
};

CriteriaEvidence existence_criteria(const Problem& problem, double lambda,
                                    const CriteriaOptions& options = {});

}  // namespace perifront

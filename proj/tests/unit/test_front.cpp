#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "perifront/error.hpp"
#include "perifront/front.hpp"
#include "problems.hpp"

using namespace perifront;

namespace {

FrontGrid random_grid(std::size_t M, double r, double R, Direction e, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> lo(M), up(M);
  for (auto& v : lo) v = U(rng);
  for (auto& v : up) v = U(rng);
  auto g = FrontGrid::make(M, r, R, PeriodicField(lo), PeriodicField(up));
  g.e = e;
  for (auto& v : g.psi) v = U(rng);
  return g;
}

// Direct double sum with weights built from the closed-form bump.
std::vector<double> direct_M(const FrontGrid& g) {
  const int M = static_cast<int>(g.M), rows = static_cast<int>(g.rows());
  const int e = sign(g.e);
  std::vector<double> w(2 * M + 1);
  double mass = 0.0;
  for (int q = -M; q <= M; ++q) {
    double v = oracle::bump(static_cast<double>(q) / M);
    if (q == -M || q == M) v *= 0.5;
    w[q + M] = v;
    mass += v / M;
  }
  std::vector<double> out(g.psi.size(), 0.0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < M; ++j) {
      double s = 0.0;
      for (int q = -M; q <= M; ++q) {
        const int ii = i - q * e;
        const int jj = ((j - q) % M + M) % M;
        const double v = ii < 0 ? g.lower[jj] : ii >= rows ? g.upper[jj] : g.at(ii, jj);
        s += w[q + M] / mass / M * v;
      }
      out[i * M + j] = s;
    }
  return out;
}

void apply_stencil(const FrontStencil& st, std::size_t M, std::size_t rows,
                   const std::vector<double>& u, const std::vector<double>& shift,
                   std::vector<double>& out) {
  out.assign(u.size(), 0.0);
  for (std::size_t i = 1; i + 1 < rows; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      const std::size_t k = i * M + j;
      out[k] = (st.diag + shift[i]) * u[k] + st.s_minus * u[k - M] + st.s_plus * u[k + M] +
               st.x_minus * u[i * M + (j + M - 1) % M] + st.x_plus * u[i * M + (j + 1) % M];
    }
}

struct Setup {
  Problem P;
  SpeedResult speed;
  FrontState state;
  double c;
};

Setup cosine_setup(std::size_t M, double eps, double factor = 1.5) {
  Setup s{fixture::cosine(M), {}, {}, 0.0};
  s.speed = min_speed(s.P, 0.0);
  s.state = front_state(s.P, eps);
  s.c = factor * s.speed.c_star;
  return s;
}

}  // namespace

TEST(ApplyM, ConstantIsPreserved) {
  auto g = FrontGrid::make(16, 3.0, 3.0, PeriodicField(std::vector<double>(16, 1.0)),
                           PeriodicField(std::vector<double>(16, 1.0)));
  std::fill(g.psi.begin(), g.psi.end(), 1.0);
  const auto out = apply_M(fixture::homogeneous(1.0, 16), g);
  for (double v : out) EXPECT_NEAR(v, 1.0, 1e-13);
}

TEST(ApplyM, MatchesDirectSumBothDirections) {
  for (auto e : {Direction::Right, Direction::Left}) {
    const auto g = random_grid(16, 2.0, 3.0, e, 7);
    const auto P = fixture::logistic(Medium::fourier(1.0, {0.5}), 16, e);
    const auto fast = apply_M(P, g);
    const auto ref = direct_M(g);
    for (std::size_t k = 0; k < ref.size(); ++k) ASSERT_NEAR(fast[k], ref[k], 1e-12) << k;
  }
}

TEST(ApplyM, ExponentialProfileScalesByJhat) {
  const double lambda = 0.8;
  const double J = oracle::jhat(lambda);
  std::vector<double> err;
  for (std::size_t M : {32, 64}) {
    auto g = FrontGrid::make(M, 4.0, 4.0, PeriodicField(std::vector<double>(M, 0.0)),
                             PeriodicField(std::vector<double>(M, 0.0)));
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < M; ++j) g.at(i, j) = std::exp(lambda * g.s(i));
    const auto out = apply_M(fixture::homogeneous(1.0, M), g);
    double e = 0.0;
    for (std::size_t i = g.row_of(-2.0); i <= g.row_of(2.0); ++i)
      for (std::size_t j = 0; j < M; ++j) e = std::max(e, std::abs(out[i * M + j] / g.at(i, j) - J));
    err.push_back(e);
  }
  EXPECT_LE(err[0], 1e-7);
  EXPECT_LE(err[1], 0.1 * err[0]);
}

TEST(ApplyM, GridMismatchThrows) {
  const auto g = random_grid(16, 2.0, 2.0, Direction::Right, 1);
  try {
    apply_M(fixture::homogeneous(1.0, 32), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(FrontStencil, IsMMatrixWithRowSumAPlusOne) {
  for (double c : {0.3, 1.0, 2.5})
    for (double eps : {0.0, 1e-2})
      for (double kappa : {0.0, 0.05}) {
        const auto st = front_stencil(c, eps, kappa, 32, 0.7);
        EXPECT_TRUE(st.is_m_matrix());
        EXPECT_GT(st.diag, 0.0);
        EXPECT_LE(st.s_minus, 0.0);
        EXPECT_LE(st.s_plus, 0.0);
        EXPECT_LE(st.x_minus, 0.0);
        EXPECT_NEAR(st.diag + st.s_minus + st.s_plus + st.x_minus + st.x_plus, 1.7, 1e-12);
      }
}

TEST(FrontLinearSolver, InvertsStencilWithRowShifts) {
  const std::size_t M = 16, rows = 41;
  const auto st = front_stencil(1.3, 1e-2, 0.02, M, 0.5);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> u(M * rows), shift(rows);
  for (auto& v : u) v = U(rng);
  for (auto& v : shift) v = 1.0 + U(rng);
  for (bool shifted : {false, true}) {
    const std::vector<double> sh = shifted ? shift : std::vector<double>(rows, 0.0);
    std::vector<double> rhs;
    apply_stencil(st, M, rows, u, sh, rhs);
    std::vector<double> x(u.size(), 0.0);
    for (std::size_t j = 0; j < M; ++j) {
      x[j] = u[j];
      x[(rows - 1) * M + j] = u[(rows - 1) * M + j];
    }
    const FrontLinearSolver solver(M, rows, st, shifted ? std::span<const double>(shift) : std::span<const double>());
    solver.solve(rhs, x);
    for (std::size_t k = 0; k < u.size(); ++k) ASSERT_NEAR(x[k], u[k], 1e-11);
  }
}

TEST(FrontState, HomogeneousAmplitudeBounds) {
  const auto st = front_state(fixture::homogeneous(1.0, 16), 0.0);
  EXPECT_NEAR(st.mu0, -1.0, 1e-10);
  EXPECT_NEAR(st.sigma_sub, 0.5, 1e-10);
  EXPECT_NEAR(st.sigma_order, 1.0, 1e-10);
  EXPECT_DOUBLE_EQ(st.sigma_max, std::min(st.sigma_sub, st.sigma_order));
}

TEST(Truncated, OrderedInSigmaMonotoneAndBounded) {
  const auto S = cosine_setup(16, 1e-2);
  const double kappa = 0.5 * kappa_bound(S.c, S.speed, 16);
  const double r = 10.0, R = 10.0;
  std::vector<TruncatedResult> sols;
  for (double sigma : {1e-12, 1e-9, 1e-6})
    sols.push_back(solve_truncated(S.P, S.state, S.c, kappa, r, R, sigma));
  for (std::size_t k = 0; k < sols.size(); ++k) {
    const auto& g = sols[k].front;
    EXPECT_LE(sols[k].residual, 1e-9);
    const auto d = diagnose(S.P, g);
    EXPECT_LE(d.monotonicity_violation, 1e-12);
    EXPECT_LE(d.order_violation, 1e-12);
    if (k > 0)
      for (std::size_t n = 0; n < g.psi.size(); ++n) ASSERT_LE(sols[k - 1].front.psi[n], g.psi[n] + 1e-12);
  }
  double worst = 0.0;
  for (double v : front_residual(S.P, sols[1].front)) worst = std::max(worst, std::abs(v));
  EXPECT_LE(worst, 1e-9);
  EXPECT_LE(weak_residual(S.P, sols[1].front), worst);
}

TEST(Truncated, SigmaAboveRangeRejected) {
  const auto S = cosine_setup(16, 1e-2);
  try {
    solve_truncated(S.P, S.state, S.c, 0.0, 5.0, 5.0, 1.01 * S.state.sigma_max);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SigmaOutOfRange);
  }
}

TEST(Truncated, TranslationCovariantInX) {
  const std::size_t M = 16, k = 5;
  const auto P = fixture::cosine(M);
  const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) / M;
  const auto Q = fixture::logistic(Medium::fourier(1.0, {0.5}, {phase}), M);
  const auto speed = min_speed(P, 0.0);
  const double c = 1.5 * speed.c_star;
  const double kappa = 0.5 * kappa_bound(c, speed, M);
  const auto sp = front_state(P, 1e-2), sq = front_state(Q, 1e-2);
  const double sigma = 1e-8;
  const auto a = solve_truncated(P, sp, c, kappa, 8.0, 8.0, sigma);
  const auto b = solve_truncated(Q, sq, c, kappa, 8.0, 8.0, sigma);
  for (std::size_t i = 0; i < a.front.rows(); ++i)
    for (std::size_t j = 0; j < M; ++j) {
      const double v = a.front.at(i, j), w = b.front.at(i, (j + k) % M);
      ASSERT_NEAR(w, v, 1e-8 * std::max(v, 1e-6)) << i << " " << j;
    }
}

TEST(Shooting, HitsTargetLevel) {
  const auto S = cosine_setup(16, 1e-2);
  const double kappa = kappa_bound(S.c, S.speed, 16);
  const auto shot = shoot_sigma(S.P, S.state, S.speed, S.c, kappa, 20.0, 20.0);
  EXPECT_NEAR(shot.achieved / shot.target - 1.0, 0.0, 1e-8);
  EXPECT_NEAR(shot.target, S.state.p.min() / 10.0, 1e-15);
  EXPECT_GT(shot.sigma, 0.0);
  EXPECT_LE(shot.sigma, S.state.sigma_max);
}

TEST(Shooting, RejectsSubcriticalSpeed) {
  const auto S = cosine_setup(16, 1e-2, 0.5);
  try {
    shoot_sigma(S.P, S.state, S.speed, S.c, 0.0, 10.0, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SubcriticalSpeed);
  }
}

TEST(Shooting, RejectsKappaAboveBound) {
  const auto S = cosine_setup(16, 1e-2);
  const double kc = kappa_bound(S.c, S.speed, 16);
  try {
    shoot_sigma(S.P, S.state, S.speed, S.c, 1.5 * kc, 10.0, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(FitDecay, RecoversSyntheticRates) {
  const std::size_t M = 8;
  auto g = FrontGrid::make(M, 40.0, 40.0, PeriodicField(std::vector<double>(M, 0.0)),
                           PeriodicField(std::vector<double>(M, 1.0)));
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const double s = g.s(i);
    const double v = s < 0.0 ? 0.5 * std::exp(0.7 * s) : 1.0 - 0.5 * std::exp(-0.4 * s);
    for (std::size_t j = 0; j < M; ++j) g.at(i, j) = v;
  }
  const auto left = fit_decay(g, Side::Left);
  const auto right = fit_decay(g, Side::Right);
  EXPECT_NEAR(left.rate, 0.7, 1e-10);
  EXPECT_NEAR(right.rate, 0.4, 1e-10);
  EXPECT_GE(left.samples, 20u);
  EXPECT_LT(left.s_last, 0.0);
  EXPECT_GE(right.s_first, 0.0);
}

TEST(FitDecay, FlatProfileHasNoTail) {
  const std::size_t M = 8;
  auto g = FrontGrid::make(M, 10.0, 10.0, PeriodicField(std::vector<double>(M, 0.5)),
                           PeriodicField(std::vector<double>(M, 1.0)));
  std::fill(g.psi.begin(), g.psi.end(), 0.5);
  try {
    fit_decay(g, Side::Left);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientTail);
  }
}

TEST(Energy, HomogeneousRightHandSideIsOneSixth) {
  const std::size_t M = 16;
  auto g = FrontGrid::make(M, 5.0, 5.0, PeriodicField(std::vector<double>(M, 0.0)),
                           PeriodicField(std::vector<double>(M, 1.0)));
  g.c = 2.0;
  const auto eb = energy_balance(fixture::homogeneous(1.0, M), g);
  EXPECT_NEAR(eb.rhs, 1.0 / 6.0, 1e-14);
}

TEST(Energy, TanhProfileLeftSideMatchesQuadrature) {
  const std::size_t M = 8;
  auto g = FrontGrid::make(M, 20.0, 20.0, PeriodicField(std::vector<double>(M, 0.0)),
                           PeriodicField(std::vector<double>(M, 1.0)));
  g.c = 2.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < M; ++j) g.at(i, j) = 0.5 * (1.0 + std::tanh(g.s(i)));
  // c int_0^1 int |psi_s|^2 ds dx with psi_s = sech^2 / 2 gives c / 3.
  EXPECT_NEAR(energy_balance(fixture::homogeneous(1.0, M), g).lhs, 2.0 / 3.0, 1e-3);
}

TEST(Continuation, DefaultScheduleEndsAtZeroRegularization) {
  const auto s = default_schedule(0.1);
  ASSERT_FALSE(s.empty());
  EXPECT_DOUBLE_EQ(s.back().kappa, 0.0);
  EXPECT_DOUBLE_EQ(s.back().eps, 0.0);
  EXPECT_DOUBLE_EQ(s.front().kappa, 0.1);
  for (std::size_t k = 1; k < s.size(); ++k) {
    EXPECT_LE(s[k].kappa, s[k - 1].kappa);
    EXPECT_LE(s[k].eps, s[k - 1].eps);
  }
  EXPECT_DOUBLE_EQ(default_schedule(0.0).front().kappa, 0.0);
}

TEST(Continuation, HomogeneousFrontSmallGrid) {
  const auto P = fixture::homogeneous(1.0, 32);
  ContinuationOptions opt;
  opt.r = 30.0;
  opt.R = 30.0;
  const auto res = continue_front(P, 1.5 * min_speed(P, 0.0).c_star, opt);
  const auto& d = res.diagnostics;
  EXPECT_LE(d.residual, 1e-6);
  EXPECT_LE(d.weak_residual, 1e-5);
  EXPECT_LE(d.monotonicity_violation, 1e-12);
  EXPECT_NEAR(d.decay_rate_left / res.lambda_c, 1.0, 0.05);
  EXPECT_GT(d.decay_rate_right, 0.0);
  EXPECT_NEAR(d.energy_rhs, 1.0 / 6.0, 1e-12);
  EXPECT_LE(d.energy_gap, 0.02);
  EXPECT_FALSE(d.critical);
  EXPECT_DOUBLE_EQ(res.c, 1.5 * res.speed.c_star);
  EXPECT_GT(res.grid_speed.c_star, res.speed.c_star);

  // sup_s psi e^{-l s} for l below lambda(c) is attained away from the left end.
  const auto& g = res.front;
  const double l = 0.9 * res.lambda_c;
  double best = -INFINITY, s_best = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    if (const double v = std::log(g.row_max(i)) - l * g.s(i); v > best) best = v, s_best = g.s(i);
  EXPECT_GT(s_best, -opt.r + 5.0);
}

TEST(Continuation, CriticalSpeedIsRaisedToTheGridSpeed) {
  const auto P = fixture::homogeneous(1.0, 16);
  ContinuationOptions opt;
  opt.r = 20.0;
  opt.R = 20.0;
  opt.schedule = {{0.0, 1e-2}};
  const auto cs = min_speed(P, 0.0).c_star;
  const auto res = continue_front(P, cs, opt);
  EXPECT_TRUE(res.diagnostics.critical);
  EXPECT_DOUBLE_EQ(res.c, res.grid_speed.c_star);
  EXPECT_GT(res.c, cs);
  EXPECT_GE(res.diagnostics.flags.size(), 2u);
}

TEST(Continuation, SpeedBetweenContinuousAndGridMinimumIsRejected) {
  const auto P = fixture::homogeneous(1.0, 8);
  const auto cs = min_speed(P, 0.0).c_star;
  const auto ch = grid_min_speed(P, 0.0, 8).c_star;
  ContinuationOptions opt;
  opt.margin = 0.01;
  const double c = 0.5 * (1.02 * cs + ch);
  ASSERT_GT(c, cs * 1.01);
  ASSERT_LT(c, ch);
  try {
    continue_front(P, c, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SubcriticalSpeed);
  }
}

TEST(Truncated, AtSigmaMaxBoundaryRowsAreExact) {
  const auto S = cosine_setup(16, 1e-2);
  const double s0 = S.state.sigma_max;
  const auto g = solve_truncated(S.P, S.state, S.c, 0.0, 5.0, 5.0, s0).front;
  const std::size_t last = g.rows() - 1;
  for (std::size_t j = 0; j < 16; ++j) {
    EXPECT_DOUBLE_EQ(g.at(0, j), s0 * S.state.phi[j]);
    EXPECT_DOUBLE_EQ(g.at(last, j), S.state.p[j]);
    for (std::size_t i = 0; i <= last; ++i) {
      ASSERT_GE(g.at(i, j), s0 * S.state.phi[j] - 1e-12);
      ASSERT_LE(g.at(i, j), S.state.p[j] + 1e-12);
    }
  }
}

TEST(Truncated, ZeroSigmaStaysBelowExponentialSupersolution) {
  const std::size_t M = 16;
  const double eps = 1e-2, r = 5.0, R = 5.0, h = 1.0 / M;
  const auto S = cosine_setup(M, eps, 3.0);
  // w = K e^{l (s - R)} phi_l is a supersolution of the upwind scheme when
  // c (1 - e^{-l h}) / h + mu_l >= 0; take the l maximizing that margin.
  double best = -INFINITY, l_best = 0.0;
  for (double l = 0.1; l < S.speed.lambda_star; l += 0.05) {
    const double d = -S.c * std::expm1(-l * h) / h + principal_eig(S.P, l, eps).mu;
    if (d > best) best = d, l_best = l;
  }
  ASSERT_GT(best, 0.0);
  const auto phi = principal_eig(S.P, l_best, eps).phi;
  const double K = S.state.p.max() / phi.min();
  const auto g = solve_truncated(S.P, S.state, S.c, 0.0, r, R, 0.0).front;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < M; ++j)
      ASSERT_LE(g.at(i, j), K * std::exp(l_best * (g.s(i) - R)) * phi[j] + 1e-12) << i << " " << j;
}

TEST(Shooting, LargeNormalizationDrivesSigmaDown) {
  const auto S = cosine_setup(16, 1e-2);
  const double kappa = kappa_bound(S.c, S.speed, 16);
  const auto a = shoot_sigma(S.P, S.state, S.speed, S.c, kappa, 15.0, 15.0);
  const auto b = shoot_sigma(S.P, S.state, S.speed, S.c, kappa, 15.0, 15.0, {.k_norm = 1e6});
  EXPECT_LT(b.sigma, 1e-3 * a.sigma);
  EXPECT_NEAR(b.solution.front.row_max(b.solution.front.row_of(0.0)), S.state.p.min() / 1e6,
              1e-8 * S.state.p.min() / 1e6);
}

TEST(Energy, ShortWindowBreaksTheIdentity) {
  const auto S = cosine_setup(16, 1e-2);
  const double kappa = 0.5 * kappa_bound(S.c, S.speed, 16);
  const auto shot = [&](double w) {
    return shoot_sigma(S.P, S.state, S.speed, S.c, kappa, w, w).solution.front;
  };
  EXPECT_GT(energy_identity_gap(S.P, shot(5.0)), 0.05);
  EXPECT_LT(energy_identity_gap(S.P, shot(30.0)), 0.02);
}

TEST(Shooting, WindowShiftByOneCellChangesOnlyTheTails) {
  const std::size_t M = 16;
  const auto S = cosine_setup(M, 0.0);
  const double h = 1.0 / M;
  const auto a = shoot_sigma(S.P, S.state, S.speed, S.c, 0.0, 30.0, 30.0).solution.front;
  const auto b = shoot_sigma(S.P, S.state, S.speed, S.c, 0.0, 30.0 + h, 30.0 - h).solution.front;
  double worst = 0.0;
  for (std::size_t i = a.row_of(-10.0); i <= a.row_of(10.0); ++i) {
    const std::size_t k = b.row_of(a.s(i));
    for (std::size_t j = 0; j < M; ++j) worst = std::max(worst, std::abs(a.at(i, j) - b.at(k, j)));
  }
  EXPECT_LE(worst, 1e-6);
}

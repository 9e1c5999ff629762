// Acceptance run: one PASS/FAIL line per criterion with the measured values.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "perifront/error.hpp"
#include "perifront/evolution.hpp"
#include "perifront/front.hpp"
#include "perifront/spectral.hpp"
#include "perifront/speed.hpp"
#include "perifront/stationary.hpp"
#include "problems.hpp"

using namespace perifront;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::vector<double> fu0(const Problem& P) {
  std::vector<double> a(P.M());
  for (std::size_t j = 0; j < P.M(); ++j) a[j] = P.nl.f_u(j, 0.0);
  return a;
}

EigenOptions plain(double tol = 1e-12) {
  EigenOptions o;
  o.tol = tol;
  o.classify = false;
  o.adjoint = false;
  return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome eigen_oracle() {
  Outcome o;
  double dmu = 0.0, res = 0.0;
  for (bool cosine : {false, true}) {
    const auto P = cosine ? fixture::cosine(128) : fixture::homogeneous(1.0, 128);
    for (double l : {0.0, 0.5, 1.0, 2.0}) {
      const auto r = principal_eig(P, l, 0.0, plain());
      const auto d = oracle::dense_principal(oracle::dense_operator(fu0(P), l, 0.0), l == 0.0);
      dmu = std::max(dmu, std::abs(r.mu - d.mu));
      res = std::max(res, r.residual);
    }
  }
  o.check(dmu <= 1e-10, fmt::format("max |mu - dense mu| = {:.3g} (<= 1e-10)", dmu));
  o.check(res <= 1e-9, fmt::format("max |L phi + mu phi| = {:.3g} (<= 1e-9)", res));
  return o;
}

Outcome homogeneous_closed_form() {
  Outcome o;
  const auto P = fixture::homogeneous(1.0, 256);
  double d = 0.0;
  for (double l : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    const double mu = principal_eig(P, l, 0.0, plain()).mu;
    d = std::max(d, std::abs(mu + (oracle::jhat(l) - 1.0 + 1.0)));
  }
  o.check(d <= 1e-8, fmt::format("max |mu + (Jhat - 1 + a0)| = {:.3g} (<= 1e-8)", d));

  auto g = [](double l) { return oracle::jhat(l, 20000) / l; };
  double best = INFINITY, arg = 0.0;
  for (double l = 0.05; l < 10.0; l += 1e-3)
    if (const double v = g(l); v < best) best = v, arg = l;
  for (double l = arg - 2e-3; l <= arg + 2e-3; l += 1e-6) best = std::min(best, g(l));
  const double cs = min_speed(P, 0.0).c_star;
  o.check(std::abs(cs - best) <= 1e-6,
          fmt::format("c* = {:.10f} vs scan {:.10f}, diff {:.3g} (<= 1e-6)", cs, best, std::abs(cs - best)));
  return o;
}

Outcome eigen_structure() {
  Outcome o;
  const auto P = fixture::cosine(128);
  std::vector<double> ls;
  for (int k = 0; k <= 30; ++k) ls.push_back(0.1 * k);
  std::vector<double> mu;
  double even = 0.0, upper = -INFINITY;
  double amax = -INFINITY;
  for (double v : fu0(P)) amax = std::max(amax, v - 1.0);
  for (double l : ls) {
    const double m = principal_eig(P, l, 0.0, plain()).mu;
    mu.push_back(m);
    even = std::max(even, std::abs(m - principal_eig(P, -l, 0.0, plain()).mu));
    upper = std::max(upper, amax + m);
  }
  double convex = -INFINITY;
  for (std::size_t i = 0; i < ls.size(); ++i)
    for (std::size_t k = i + 2; k < ls.size(); k += 2) {
      const std::size_t j = (i + k) / 2;
      convex = std::max(convex, 0.5 * (mu[i] + mu[k]) - mu[j]);  // -mu is convex
    }
  o.check(even <= 1e-9, fmt::format("max |mu_l - mu_-l| = {:.3g} (<= 1e-9)", even));
  o.check(convex <= 1e-9, fmt::format("worst midpoint convexity defect of -mu = {:.3g} (<= 1e-9)", convex));
  o.check(upper <= 1e-10, fmt::format("max (a + mu) = {:.3g} (<= 1e-10)", upper));

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(-0.3, 0.3), Up(0.0, 2.0 * std::numbers::pi), Ud(0.0, 0.2);
  double lip = -INFINITY, mono = -INFINITY;
  const std::size_t M = 128;
  for (int pair = 0; pair < 20; ++pair) {
    std::vector<double> a1, p1, a2, p2;
    for (int k = 0; k < 3; ++k) a1.push_back(U(rng)), p1.push_back(Up(rng)), a2.push_back(U(rng)), p2.push_back(Up(rng));
    const auto m1 = Medium::fourier(1.0, a1, p1), m2 = Medium::fourier(1.0 + U(rng), a2, p2);
    const auto P1 = fixture::logistic(m1, M), P2 = fixture::logistic(m2, M);
    // Ordered pair: P1 raised by a nonnegative bump.
    const double lift = Ud(rng);
    const auto m3 = Medium::fourier(1.0 + lift, a1, p1);
    const auto P3 = fixture::logistic(m3, M);
    for (double l : {0.0, 1.0}) {
      const double u1 = principal_eig(P1, l, 0.0, plain()).mu;
      const double u2 = principal_eig(P2, l, 0.0, plain()).mu;
      const double u3 = principal_eig(P3, l, 0.0, plain()).mu;
      const auto f1 = fu0(P1), f2 = fu0(P2);
      double da = 0.0;
      for (std::size_t j = 0; j < M; ++j) da = std::max(da, std::abs(f1[j] - f2[j]));
      lip = std::max(lip, std::abs(u1 - u2) - da);
      mono = std::max(mono, u3 - u1);
    }
  }
  o.check(lip <= 1e-10, fmt::format("20 pairs: max |dmu| - |da|_inf = {:.3g} (<= 0)", lip));
  o.check(mono <= 1e-10, fmt::format("20 ordered pairs: max mu(a + d) - mu(a) = {:.3g} (<= 0)", mono));
  return o;
}

Outcome eps_convergence() {
  Outcome o;
  const auto P = fixture::cosine(128);
  for (double l : {0.0, 1.0}) {
    const auto r0 = principal_eig(P, l, 0.0, plain());
    std::vector<double> d, dphi;
    for (double e : {1e-2, 1e-3, 1e-4}) {
      const auto r = principal_eig(P, l, e, plain());
      d.push_back(std::abs(r.mu - r0.mu));
      dphi.push_back(sup_distance(r.phi, r0.phi));
    }
    const double C = std::max({d[0] / 1e-2, d[1] / 1e-3, d[2] / 1e-4});
    const double q1 = d[0] / d[1], q2 = d[1] / d[2];
    o.check(q1 > 5.0 && q1 < 20.0 && q2 > 5.0 && q2 < 20.0,
            fmt::format("lambda {}: |dmu| = {:.3g}, {:.3g}, {:.3g}, C = {:.3g}, ratios {:.3g}, {:.3g} (first order: in (5, 20))",
                        l, d[0], d[1], d[2], C, q1, q2));
    o.check(dphi[0] > dphi[1] && dphi[1] > dphi[2],
            fmt::format("lambda {}: |dphi| = {:.3g}, {:.3g}, {:.3g} (decreasing)", l, dphi[0], dphi[1], dphi[2]));
  }
  return o;
}

Outcome stationary_dichotomy() {
  Outcome o;
  try {
    solve_stationary(fixture::homogeneous(-0.5, 64), 0.0, StartFrom::Above);
    o.check(false, "a = -0.5: no error raised");
  } catch (const Error& e) {
    o.check(e.code() == ErrorCode::NoPositiveState, fmt::format("a = -0.5: {}", e.name()));
  }
  for (bool cosine : {false, true}) {
    const auto P = cosine ? fixture::cosine(128) : fixture::homogeneous(1.0, 128);
    const auto up = solve_stationary(P, 0.0, StartFrom::Above);
    const auto dn = solve_stationary(P, 0.0, StartFrom::Below);
    const double gap = sup_distance(up.p, dn.p);
    const double res = std::max(up.residual, dn.residual);
    o.check(gap <= 1e-8 && res <= 1e-10,
            fmt::format("{}: |p_above - p_below| = {:.3g} (<= 1e-8), residual {:.3g} (<= 1e-10)",
                        cosine ? "cosine" : "a = 1", gap, res));
  }
  for (std::size_t M : {64, 128}) {
    const auto P = fixture::cosine(M);
    const auto L = lipschitz_check(P, solve_stationary(P, 0.0, StartFrom::Above).p);
    o.check(L.holds, fmt::format("Lipschitz bound M = {}: excess {:.3g} vs slack {:.3g}", M, L.worst_excess, L.slack));
  }
  return o;
}

struct FrontRuns {
  ContinuationResult main;
  double main_seconds = 0.0;
};

Outcome front_construction(const FrontRuns& F) {
  Outcome o;
  const auto& r = F.main;
  double worst = 0.0;
  for (const auto& s : r.stages) worst = std::max(worst, s.residual);
  const auto& d = r.diagnostics;
  const auto& last = r.stages.back().stage;
  o.check(last.kappa == 0.0 && last.eps == 0.0, fmt::format("{} stages ending at kappa = eps = 0", r.stages.size()));
  o.check(worst <= 1e-6 && d.residual <= 1e-6,
          fmt::format("max stage residual {:.3g}, final interior residual {:.3g} (<= 1e-6)", worst, d.residual));
  o.check(d.weak_residual <= 1e-5, fmt::format("weak residual {:.3g} (<= 1e-5)", d.weak_residual));
  o.check(d.monotonicity_violation <= 1e-12,
          fmt::format("monotonicity violation {:.3g} (<= 1e-12)", d.monotonicity_violation));
  o.check(d.left_limit <= 1e-4 && d.right_limit <= 1e-4,
          fmt::format("window limits {:.3g}, {:.3g} (<= 1e-4)", d.left_limit, d.right_limit));
  o.check(F.main_seconds < 300.0, fmt::format("continuation {:.1f} s at M = 64 (< 300 s)", F.main_seconds));
  return o;
}

Outcome energy_identity() {
  Outcome o;
  for (bool cosine : {true, false}) {
    const auto P = cosine ? fixture::cosine(64) : fixture::homogeneous(1.0, 64);
    const auto sp = min_speed(P, 0.0);
    const double c = 1.5 * sp.c_star;
    const double kc = kappa_bound(c, sp, 64);
    ContinuationOptions opt;
    opt.schedule = {{kc, 1e-2}, {kc / 4, 1e-2}, {kc / 16, 1e-2}, {1e-3, 1e-2}, {1e-3, 1e-3}};
    const auto r = continue_front(P, c, opt);
    const auto& d = r.diagnostics;
    if (cosine) {
      o.check(d.energy_gap <= 0.02, fmt::format("cosine, kappa = eps = 1e-3, M = 64: lhs {:.6g}, rhs {:.6g}, gap {:.3g} (<= 2%)",
                                                d.energy_lhs, d.energy_rhs, d.energy_gap));
    } else {
      const double drhs = std::abs(d.energy_rhs * 6.0 - 1.0), dlhs = std::abs(d.energy_lhs * 6.0 - 1.0);
      o.check(drhs <= 0.02 && dlhs <= 0.02,
              fmt::format("homogeneous: rhs {:.6g}, lhs {:.6g} vs 1/6, rel. errors {:.3g}, {:.3g} (<= 2%)",
                          d.energy_rhs, d.energy_lhs, drhs, dlhs));
    }
  }
  return o;
}

Outcome exponential_decay(const FrontRuns& F) {
  Outcome o;
  const auto& d = F.main.diagnostics;
  const double rel = std::abs(d.decay_rate_left / F.main.lambda_c - 1.0);
  o.check(rel <= 0.05, fmt::format("c = 1.5c*, M = 64: left rate {:.6f} vs lambda(c) {:.6f}, rel. {:.3g} (<= 5%)",
                                   d.decay_rate_left, F.main.lambda_c, rel));
  o.check(d.decay_rate_right > 0.0, fmt::format("right rate {:.6f} (> 0)", d.decay_rate_right));

  const auto P = fixture::cosine(32);
  const double cs = min_speed(P, 0.0).c_star;
  const auto crit = continue_front(P, cs);
  const auto& dc = crit.diagnostics;
  const double relc = std::abs(dc.decay_rate_left / crit.lambda_c - 1.0);
  o.check(relc <= 0.15 && dc.critical,
          fmt::format("c = c*, M = 32 (run at grid speed {:.6f}): left rate {:.6f} vs lambda* {:.6f}, rel. {:.3g} (<= 15%), flagged {}",
                      crit.c, dc.decay_rate_left, crit.lambda_c, relc, dc.critical ? "yes" : "no"));
  o.check(dc.decay_rate_right > 0.0, fmt::format("critical right rate {:.6f} (> 0)", dc.decay_rate_right));
  return o;
}

Outcome minimal_speed_consistency() {
  Outcome o;
  {
    const auto P = fixture::cosine(64);
    const auto sp = min_speed(P, 0.0);
    const auto st = front_state(P, 0.0);
    try {
      shoot_sigma(P, st, sp, 0.5 * sp.c_star, 0.0, 40.0, 40.0);
      o.check(false, "c = 0.5c*: accepted");
    } catch (const Error& e) {
      o.check(e.code() == ErrorCode::SubcriticalSpeed, fmt::format("c = 0.5c*: {}", e.name()));
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  for (bool cosine : {false, true}) {
    const std::size_t M = 32;
    const auto P = cosine ? fixture::cosine(M) : fixture::homogeneous(1.0, M);
    const double cs = min_speed(P, 0.0).c_star;
    const auto p = solve_stationary(P, 0.0, StartFrom::Above).p;
    const EvolutionOptions opt{.L = 300.0, .T = 200.0, .dt = 0.02, .snapshots = 200};
    const auto tr = evolve(P, compact_initial_data(p, opt.L, 2.0), opt);
    const double right = spreading_speed(tr, 0.5, Front::Right);
    const double left = spreading_speed(tr, 0.5, Front::Left);
    const double rel = std::max(std::abs(right / cs - 1.0), std::abs(left / cs - 1.0));
    o.check(rel <= 0.05, fmt::format("{}: spreading {:.5f} (right), {:.5f} (left) vs c* {:.5f}, rel. {:.3g} (<= 5%)",
                                     cosine ? "cosine" : "a = 1", right, left, cs, rel));
  }
  const double secs = seconds_since(t0);
  o.check(secs < 300.0, fmt::format("evolution {:.1f} s (< 300 s)", secs));
  return o;
}

Outcome existence_trichotomy() {
  Outcome o;
  for (double a0 : {0.5, 1.0, 2.0}) {
    const auto ev = existence_criteria(fixture::homogeneous(a0, 64), 0.0);
    o.check(ev.verdict == Trichotomy::Exists, fmt::format("a = {}: {}", a0, to_string(ev.verdict)));
  }
  const auto ev = existence_criteria(fixture::peaked(256), 0.0);
  o.check(ev.verdict == Trichotomy::NotExists && ev.M_const_times_I < 1.0,
          fmt::format("peaked: {}, M_const I = {:.4g} (< 1)", to_string(ev.verdict), ev.M_const_times_I));
  std::vector<double> ratio;
  for (std::size_t M : {128, 512}) {
    const auto d = oracle::dense_principal(oracle::dense_operator(fu0(fixture::peaked(M)), 0.0, 0.0), true);
    ratio.push_back(static_cast<double>(M) / d.phi.sum());  // sup / mean of the sup-normalized eigenvector
  }
  o.check(ratio[1] >= 2.0 * ratio[0],
          fmt::format("dense eigenvector sup/mean {:.4g} (M = 128) -> {:.4g} (M = 512), growth {:.3g} (>= 2)",
                      ratio[0], ratio[1], ratio[1] / ratio[0]));
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto run = [&](int id, const char* name, double budget, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.check(false, std::string("error: ") + e.what());
    }
    const double secs = seconds_since(t0);
    if (budget > 0.0) o.check(secs < budget, fmt::format("runtime {:.1f} s (< {:.0f} s)", secs, budget));
    else o.detail += fmt::format("; runtime {:.1f} s", secs);
    failed += o.pass ? 0 : 1;
    fmt::print("{} {:2d} {}: {}\n", o.pass ? "PASS" : "FAIL", id, name, o.detail);
    std::fflush(stdout);
  };

  run(1, "eigen-oracle equivalence", 10.0, eigen_oracle);
  run(2, "homogeneous closed form", 30.0, homogeneous_closed_form);
  run(3, "eigenvalue structure", 120.0, eigen_structure);
  run(4, "eps-convergence", 0.0, eps_convergence);
  run(5, "stationary dichotomy", 0.0, stationary_dichotomy);

  FrontRuns F;
  bool have_front = false;
  std::string front_error;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto P = fixture::cosine(64);
      F.main = continue_front(P, 1.5 * min_speed(P, 0.0).c_star);
      have_front = true;
    } catch (const std::exception& e) {
      front_error = e.what();
    }
    F.main_seconds = seconds_since(t0);
  }
  auto with_front = [&](auto f) {
    return [&, f]() -> Outcome {
      if (!have_front) {
        Outcome o;
        o.check(false, "continuation failed: " + front_error);
        return o;
      }
      return f(F);
    };
  };
  run(6, "front construction", 0.0, with_front(front_construction));
  run(7, "energy identity", 0.0, energy_identity);
  run(8, "exponential decay", 0.0, with_front(exponential_decay));
  run(9, "minimal-speed consistency", 0.0, minimal_speed_consistency);
  run(10, "existence trichotomy", 0.0, existence_trichotomy);

  fmt::print("{} of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}

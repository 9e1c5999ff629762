#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "perifront/error.hpp"
#include "perifront/spectral.hpp"

namespace perifront {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Quadrature {
  double value = 0.0;
  bool divergent = false;
  std::vector<double> sequence;
};

// Midpoint sums on the staggered grids x = (j + 1/2)/n, n = M0, 2 M0, ..., 16 M0.
// The points never coincide with the nodes x_j = j/M, where a sampled maximum sits.
Quadrature staggered_quadrature(const std::function<double(double)>& g, std::size_t M0,
                                double saturation, double divergence_ratio) {
  Quadrature q;
  for (std::size_t n = M0; n <= 16 * M0; n *= 2) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = g((static_cast<double>(j) + 0.5) / static_cast<double>(n));
      s += v;
    }
    s /= static_cast<double>(n);
    q.sequence.push_back(s);
    if (!(s <= saturation)) {
      q.value = kInf;
      q.divergent = true;
      return q;
    }
  }
  const auto& S = q.sequence;
  const std::size_t k = S.size();
  const double d1 = S[k - 1] - S[k - 2];
  const double d0 = S[k - 2] - S[k - 3];
  if (d0 > 0.0 && d1 > 0.0) {
    const double r = d1 / d0;
    if (r >= divergence_ratio) {
      q.value = kInf;
      q.divergent = true;
      return q;
    }
    q.value = S[k - 1] + d1 * r / (1.0 - r);
  } else {
    q.value = S[k - 1];
  }
  return q;
}

// Floor of the m-fold self-convolution of J_lambda on the best integer cell.
double self_convolution_floor(const KernelSpec& J, double lambda, Direction e, int m,
                              std::size_t per_unit) {
  const auto n = per_unit;
  const double dz = 1.0 / static_cast<double>(n);
  std::vector<double> base(2 * n + 1);
  for (std::size_t i = 0; i <= 2 * n; ++i) {
    const double z = -1.0 + static_cast<double>(i) * dz;
    base[i] = J(z) * std::exp(-lambda * z * sign(e));
  }
  std::vector<double> cur = base;  // support [-k, k] with 2kn + 1 nodes
  for (int k = 2; k <= m; ++k) {
    std::vector<double> next(cur.size() + base.size() - 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (cur[i] == 0.0) continue;
      for (std::size_t j = 0; j < base.size(); ++j) next[i + j] += cur[i] * base[j] * dz;
    }
    cur.swap(next);
  }
  double best = 0.0;
  for (int c = -m; c < m; ++c) {
    const auto lo = static_cast<std::size_t>((c + m)) * n;
    double mn = kInf;
    for (std::size_t i = lo; i <= lo + n; ++i) mn = std::min(mn, cur[i]);
    best = std::max(best, mn);
  }
  return best;
}

}  // namespace

CriteriaEvidence existence_criteria(const Problem& problem, double lambda,
                                    const CriteriaOptions& opt) {
  require(opt.quadrature_M >= 8, "criteria quadrature grid too coarse");
  require(opt.max_m >= 2, "criteria need max_m >= 2");
  const Medium& med = problem.nl.a_medium();
  auto a = [&med](double x) { return med(x) - 1.0; };
  CriteriaEvidence ev;

  // A over the nodes, every staggered grid, and a dense scan.
  double A = problem.nl.a().max() - 1.0;
  const std::size_t dense = 32 * opt.quadrature_M;
  for (std::size_t j = 0; j < dense; ++j) A = std::max(A, a((static_cast<double>(j) + 0.5) / dense));
  for (std::size_t j = 0; j < dense; ++j) A = std::max(A, a(static_cast<double>(j) / dense));
  ev.A = A;

  auto inv_gap = [&](double x) {
    const double g = A - a(x);
    return g > 0.0 ? 1.0 / g : kInf;
  };
  auto qi = staggered_quadrature(inv_gap, opt.quadrature_M, opt.saturation, opt.divergence_ratio);
  ev.I = qi.value;
  ev.I_saturated = qi.divergent;
  ev.I_sequence = qi.sequence;

  // sup of the tilted periodization, same tilt convention as the operator.
  {
    const std::size_t n = 1 << 16;
    double mc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double z = static_cast<double>(j) / n;
      double s = 0.0;
      for (int k = -1; k <= 1; ++k) {
        const double y = z - k;
        s += problem.kernel(y) * std::exp(-lambda * y * sign(problem.e));
      }
      mc = std::max(mc, s);
    }
    ev.M_const = mc;
  }
  ev.M_const_times_I = ev.M_const * ev.I;

  // Constructive branch.
  double amin = kInf;
  for (std::size_t j = 0; j < dense; ++j) amin = std::min(amin, a(static_cast<double>(j) / dense));
  const double shift = std::max(0.0, -amin) + 1e-3 * std::max(1.0, A - amin);
  ev.shift = shift;
  const double bmax = A + shift;
  for (int m = 2; m <= opt.max_m && !ev.constructive_holds; ++m) {
    const double d = self_convolution_floor(problem.kernel, lambda, problem.e, m, 256);
    if (d <= 0.0) continue;
    const double bm = std::pow(bmax, m);
    for (double es = 1e-1; es >= 1e-8 * 0.999; es /= 10.0) {
      auto g = [&](double x) { return 1.0 / (bm - std::pow(a(x) + shift, m) + es); };
      auto q = staggered_quadrature(g, opt.quadrature_M, opt.saturation, opt.divergence_ratio);
      const double value = d * q.value;
      if (value > ev.constructive_value || ev.m == 0) {
        ev.m = m;
        ev.d = d;
        ev.eps_s = es;
        ev.constructive_value = value;
      }
      if (value > 1.0) {
        ev.constructive_holds = true;
        break;
      }
    }
  }

  if (ev.I_saturated) {
    ev.verdict = Trichotomy::Exists;
    ev.reason = "integral of 1/(A - a) diverges";
  } else if (ev.M_const_times_I < 1.0) {
    ev.verdict = Trichotomy::NotExists;
    ev.reason = "M_const * I < 1";
  } else if (ev.constructive_holds) {
    ev.verdict = Trichotomy::Exists;
    ev.reason = "d * integral of 1/(max b^m - b^m + eps_s) > 1";
  } else {
    ev.verdict = Trichotomy::Inconclusive;
    ev.reason = "neither bound decides";
  }
  return ev;
}

}  // namespace perifront

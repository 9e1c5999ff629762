#include "perifront/front.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

#include "fft.hpp"
#include "perifront/error.hpp"

namespace perifront {

FrontState front_state(const Problem& problem, double eps, const StationaryOptions& options) {
  FrontState st;
  st.eps = eps;
  auto stat = solve_stationary(problem, eps, StartFrom::Above, options);
  st.p = std::move(stat.p);
  EigenOptions eo = options.eig;
  eo.adjoint = false;
  eo.classify = false;
  auto eig = principal_eig(problem, 0.0, eps, eo);
  st.mu0 = eig.mu;
  st.phi = std::move(eig.phi);
  double bphi = 0.0, order = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < st.phi.size(); ++j) {
    bphi = std::max(bphi, problem.nl.b()[j] * st.phi[j]);
    order = std::min(order, st.p[j] / st.phi[j]);
  }
  st.sigma_sub = -st.mu0 / (2.0 * bphi);
  st.sigma_order = order;
  st.sigma_max = std::min(st.sigma_sub, st.sigma_order);
  return st;
}

// ------------------------------------------------------------------ grid

std::size_t FrontGrid::row_of(double s_value) const {
  const double t = (s_value + r) * static_cast<double>(M);
  const double k = std::round(t);
  if (std::abs(t - k) > 1e-9 || k < 0.0 || k >= static_cast<double>(rows()))
    fail(ErrorCode::InvalidInput, "s = " + std::to_string(s_value) + " is not a grid row");
  return static_cast<std::size_t>(k);
}

double FrontGrid::row_max(std::size_t i) const {
  auto rw = row(i);
  return *std::max_element(rw.begin(), rw.end());
}

namespace {

std::size_t window_cells(double len, std::size_t M, const char* what) {
  const double t = len * static_cast<double>(M);
  if (!(len > 0.0) || std::abs(t - std::round(t)) > 1e-9)
    fail(ErrorCode::InvalidInput, std::string(what) + " must be a positive multiple of 1/M");
  return static_cast<std::size_t>(std::round(t));
}

}  // namespace

FrontGrid FrontGrid::make(std::size_t M, double r, double R, const PeriodicField& lower,
                          const PeriodicField& upper) {
  check_grid_size(M);
  if (lower.size() != M || upper.size() != M)
    fail(ErrorCode::GridMismatch, "boundary fields do not match the front grid");
  const std::size_t N = window_cells(r, M, "r") + window_cells(R, M, "R");
  FrontGrid g;
  g.M = M;
  g.r = r;
  g.R = R;
  g.lower = lower;
  g.upper = upper;
  g.psi.resize((N + 1) * M);
  for (std::size_t i = 0; i < N; ++i) std::copy(lower.values().begin(), lower.values().end(), g.row(i).begin());
  std::copy(upper.values().begin(), upper.values().end(), g.row(N).begin());
  return g;
}

// -------------------------------------------------------------- operator

std::vector<double> apply_M(const Problem& problem, const FrontGrid& g) {
  const std::size_t M = g.M;
  if (problem.M() != M) fail(ErrorCode::GridMismatch, "front grid and medium grid differ");
  const std::size_t rows = g.rows();
  auto w = problem.kernel.line_weights(M);
  for (double& v : w) v /= static_cast<double>(M);
  const int es = sign(g.e);
  if (es < 0) std::reverse(w.begin(), w.end());

  // psi(s_i - q e/M, x_j - q/M) stays on the line j - e i = const (mod M), so
  // M is a (2M+1)-tap filter along each of the M lines.
  std::vector<double> out(g.psi.size(), 0.0);
  const std::size_t L = rows + 2 * M;
  std::vector<double> line(L), acc(rows);
  for (std::size_t m = 0; m < M; ++m) {
    // Column of line m at row t: (m + e t) mod M, stepped incrementally.
    const std::size_t step = es > 0 ? 1 : M - 1;
    std::size_t j = m;  // t = -M
    for (std::size_t k = 0; k < L; ++k, j = j + step >= M ? j + step - M : j + step) {
      if (k < M)
        line[k] = g.lower[j];
      else if (k < M + rows)
        line[k] = g.psi[(k - M) * M + j];
      else
        line[k] = g.upper[j];
    }
    // Tap q shifts by q - M rows: source index k = i + M - (q - M). Register
    // blocks of 32 outputs accumulate over all taps.
    constexpr std::size_t block = 32;
    const std::size_t taps = 2 * M + 1;
    std::size_t i0 = 0;
    for (; i0 + block <= rows; i0 += block) {
      double a[block] = {};
      const double* base = line.data() + 2 * M + i0;
      for (std::size_t q = 0; q < taps; ++q) {
        const double wq = w[q];
        const double* src = base - q;
        for (std::size_t l = 0; l < block; ++l) a[l] += wq * src[l];
      }
      std::copy(a, a + block, acc.data() + i0);
    }
    for (; i0 < rows; ++i0) {
      double a = 0.0;
      for (std::size_t q = 0; q < taps; ++q) a += w[q] * line[2 * M + i0 - q];
      acc[i0] = a;
    }
    j = m;
    for (std::size_t i = 0; i < rows; ++i, j = j + step >= M ? j + step - M : j + step)
      out[i * M + j] = acc[i];
  }
  return out;
}

bool FrontStencil::is_m_matrix() const noexcept {
  const bool signs = s_minus <= 0.0 && s_plus <= 0.0 && x_minus <= 0.0 && x_plus <= 0.0;
  return signs && diag > -(s_minus + s_plus + x_minus + x_plus);
}

FrontStencil front_stencil(double c, double eps, double kappa, std::size_t M, double A) {
  require(kappa >= 0.0 && eps >= 0.0, "viscosities must be nonnegative");
  require(c > 0.0, "front speed must be positive");
  const double h = 1.0 / static_cast<double>(M);
  FrontStencil st;
  st.s_minus = -kappa / (h * h) - c / h;
  st.s_plus = -kappa / (h * h);
  st.x_minus = st.x_plus = -eps / (h * h);
  st.diag = (A + 1.0) + 2.0 * kappa / (h * h) + c / h + 2.0 * eps / (h * h);
  return st;
}

// --------------------------------------------------------- linear solver

struct FrontLinearSolver::Impl {
  std::size_t M, rows, K, n;
  FrontStencil st;
  detail::RealFFT fft;
  std::vector<double> cp, inv_den;  // [i][k], i over interior rows
  mutable std::vector<std::complex<double>> spec;
  mutable std::vector<double> buf;

  Impl(std::size_t M_, std::size_t rows_, const FrontStencil& s, std::span<const double> shift)
      : M(M_), rows(rows_), K(M_ / 2 + 1), n(rows_ - 2), st(s), fft(M_),
        cp(n * K), inv_den(n * K), spec(n * K), buf(M_) {
    for (std::size_t k = 0; k < K; ++k) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(M);
      const double beta = st.diag + (st.x_minus + st.x_plus) * std::cos(theta);
      double den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double b = shift.empty() ? beta : beta + shift[i + 1];
        den = i == 0 ? b : b - st.s_minus * cp[(i - 1) * K + k];
        inv_den[i * K + k] = 1.0 / den;
        cp[i * K + k] = st.s_plus / den;
      }
    }
  }
};

FrontLinearSolver::FrontLinearSolver(std::size_t M, std::size_t rows, const FrontStencil& stencil,
                                     std::span<const double> row_shift) {
  check_grid_size(M);
  require(rows >= 3, "front window needs at least one interior row");
  require(row_shift.empty() || row_shift.size() == rows, "row shift needs one entry per row");
  impl_ = std::make_unique<Impl>(M, rows, stencil, row_shift);
}
FrontLinearSolver::~FrontLinearSolver() = default;
FrontLinearSolver::FrontLinearSolver(FrontLinearSolver&&) noexcept = default;
FrontLinearSolver& FrontLinearSolver::operator=(FrontLinearSolver&&) noexcept = default;

void FrontLinearSolver::solve(std::span<const double> rhs, std::span<double> psi) const {
  auto& I = *impl_;
  const std::size_t M = I.M, K = I.K, n = I.n;
  if (rhs.size() != I.rows * M || psi.size() != I.rows * M)
    fail(ErrorCode::GridMismatch, "front linear solve operands have the wrong size");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row = i + 1;
    for (std::size_t j = 0; j < M; ++j) I.buf[j] = rhs[row * M + j];
    if (row == 1)
      for (std::size_t j = 0; j < M; ++j) I.buf[j] -= I.st.s_minus * psi[j];
    if (row == I.rows - 2)
      for (std::size_t j = 0; j < M; ++j) I.buf[j] -= I.st.s_plus * psi[(I.rows - 1) * M + j];
    I.fft.forward(I.buf.data(), I.spec.data() + i * K);
  }
  auto* S = I.spec.data();
  for (std::size_t k = 0; k < K; ++k) S[k] *= I.inv_den[k];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t k = 0; k < K; ++k)
      S[i * K + k] = (S[i * K + k] - I.st.s_minus * S[(i - 1) * K + k]) * I.inv_den[i * K + k];
  for (std::size_t i = n - 1; i-- > 0;)
    for (std::size_t k = 0; k < K; ++k) S[i * K + k] -= I.cp[i * K + k] * S[(i + 1) * K + k];
  const double scale = 1.0 / static_cast<double>(M);
  for (std::size_t i = 0; i < n; ++i) {
    I.fft.backward(S + i * K, I.buf.data());
    double* out = psi.data() + (i + 1) * M;
    for (std::size_t j = 0; j < M; ++j) out[j] = I.buf[j] * scale;
  }
}

// ------------------------------------------------------------ iteration

namespace {

// L psi - rhs on interior rows, sup norm.
struct StepResidual {
  double abs = 0.0;
  /// Largest residual relative to the local value; psi > 0 on the interior when sigma > 0.
  double rel = 0.0;
};

StepResidual step_residual(const FrontStencil& st, const FrontGrid& g, const std::vector<double>& rhs) {
  const std::size_t M = g.M, rows = g.rows();
  StepResidual res;
  for (std::size_t i = 1; i + 1 < rows; ++i) {
    const double* u = g.psi.data() + i * M;
    const double* um = u - M;
    const double* up = u + M;
    const double* b = rhs.data() + i * M;
    for (std::size_t j = 0; j < M; ++j) {
      const double l = u[j == 0 ? M - 1 : j - 1], r = u[j + 1 == M ? 0 : j + 1];
      const double v = st.diag * u[j] + st.s_minus * um[j] + st.s_plus * up[j] +
                       st.x_minus * l + st.x_plus * r - b[j];
      res.abs = std::max(res.abs, std::abs(v));
      if (u[j] > 0.0) res.rel = std::max(res.rel, std::abs(v) / u[j]);
    }
  }
  return res;
}

void reaction_rhs(const Problem& problem, const FrontGrid& g, double A, std::vector<double>& Mpsi) {
  const auto& nl = problem.nl;
  const std::size_t M = g.M;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < M; ++j) {
      const double u = g.psi[i * M + j];
      Mpsi[i * M + j] += nl.f(j, u) + A * u;
    }
}

void clamp_interior(const FrontGrid& g, const PeriodicField& p, std::vector<double>& psi) {
  const std::size_t M = g.M;
  for (std::size_t i = 1; i + 1 < g.rows(); ++i)
    for (std::size_t j = 0; j < M; ++j) psi[i * M + j] = std::clamp(psi[i * M + j], 0.0, p[j]);
}

// out = P v on interior rows; boundary rows of out are left untouched.
void stencil_apply(const FrontStencil& st, std::size_t M, std::size_t rows,
                   const std::vector<double>& v, std::vector<double>& out) {
  for (std::size_t i = 1; i + 1 < rows; ++i) {
    const double* u = v.data() + i * M;
    double* o = out.data() + i * M;
    for (std::size_t j = 0; j < M; ++j) {
      const double l = u[j == 0 ? M - 1 : j - 1], r = u[j + 1 == M ? 0 : j + 1];
      o[j] = st.diag * u[j] + st.s_minus * u[j - M] + st.s_plus * u[j + M] + st.x_minus * l +
             st.x_plus * r;
    }
  }
}

// Row weights 1 / (sup of the row)^2 so the exponentially small tail is
// resolved in relative terms.
std::vector<double> row_weights(const FrontGrid& g) {
  const std::size_t M = g.M;
  std::vector<double> w(g.psi.size(), 0.0);
  for (std::size_t i = 1; i + 1 < g.rows(); ++i) {
    const double m = g.row_max(i);
    const double v = m > 0.0 ? 1.0 / (m * m) : 0.0;
    std::fill(w.begin() + static_cast<std::ptrdiff_t>(i * M),
              w.begin() + static_cast<std::ptrdiff_t>((i + 1) * M), v);
  }
  return w;
}

double wdot(const std::vector<double>& w, const std::vector<double>& u, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * u[i] * v[i];
  return s;
}

// Restarted GMRES for (I - P^{-1} N) x = b in the w-weighted inner product.
template <class Op>
std::vector<double> gmres(const Op& op, const std::vector<double>& b, const std::vector<double>& w,
                          double rtol, std::size_t restart, std::size_t max_matvec) {
  const std::size_t n = b.size();
  std::vector<double> x(n, 0.0);
  const double bnorm = std::sqrt(wdot(w, b, b));
  if (bnorm == 0.0) return x;
  std::size_t matvecs = 0;
  std::vector<double> r = b;
  while (matvecs < max_matvec) {
    const double beta = std::sqrt(wdot(w, r, r));
    if (beta <= rtol * bnorm) break;
    std::vector<std::vector<double>> V;
    V.reserve(restart + 1);
    V.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(restart + 1),
                                              static_cast<Eigen::Index>(restart));
    std::vector<double> cs, sn;
    Eigen::VectorXd gvec = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(restart + 1));
    gvec(0) = beta;
    std::size_t k = 0;
    for (; k < restart && matvecs < max_matvec; ++k) {
      auto v = op(V[k]);
      ++matvecs;
      for (std::size_t l = 0; l <= k; ++l) {
        const double hlk = wdot(w, v, V[l]);
        H(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = hlk;
        for (std::size_t i = 0; i < n; ++i) v[i] -= hlk * V[l][i];
      }
      const double hn = std::sqrt(wdot(w, v, v));
      H(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k)) = hn;
      for (std::size_t l = 0; l < k; ++l) {
        const auto L = static_cast<Eigen::Index>(l), K = static_cast<Eigen::Index>(k);
        const double t = cs[l] * H(L, K) + sn[l] * H(L + 1, K);
        H(L + 1, K) = -sn[l] * H(L, K) + cs[l] * H(L + 1, K);
        H(L, K) = t;
      }
      const auto K = static_cast<Eigen::Index>(k);
      const double den = std::hypot(H(K, K), H(K + 1, K));
      cs.push_back(den > 0.0 ? H(K, K) / den : 1.0);
      sn.push_back(den > 0.0 ? H(K + 1, K) / den : 0.0);
      H(K, K) = den;
      H(K + 1, K) = 0.0;
      gvec(K + 1) = -sn[k] * gvec(K);
      gvec(K) = cs[k] * gvec(K);
      const bool last = std::abs(gvec(K + 1)) <= rtol * bnorm || hn == 0.0;
      if (!last) {
        V.emplace_back(n);
        for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = v[i] / hn;
      } else {
        ++k;
        break;
      }
    }
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::VectorXd y =
        H.topLeftCorner(kk, kk).triangularView<Eigen::Upper>().solve(gvec.head(kk));
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t i = 0; i < n; ++i) x[i] += y(static_cast<Eigen::Index>(l)) * V[l][i];
    r = op(x);
    ++matvecs;
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  }
  return x;
}

}  // namespace

std::vector<double> front_residual(const Problem& problem, const FrontGrid& g) {
  const double A = 0.0;
  const FrontStencil st = front_stencil(g.c, g.eps, g.kappa, g.M, A);
  auto rhs = apply_M(problem, g);
  reaction_rhs(problem, g, A, rhs);
  const std::size_t M = g.M, rows = g.rows();
  std::vector<double> res(g.psi.size(), 0.0);
  for (std::size_t i = 1; i + 1 < rows; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      const double* u = g.psi.data() + i * M;
      const double l = u[j == 0 ? M - 1 : j - 1], r = u[j + 1 == M ? 0 : j + 1];
      res[i * M + j] = st.diag * u[j] + st.s_minus * u[j - M] + st.s_plus * u[j + M] +
                       st.x_minus * l + st.x_plus * r - rhs[i * M + j];
    }
  return res;
}

TruncatedResult solve_truncated(const Problem& problem, const FrontState& state, double c,
                                double kappa, double r, double R, double sigma,
                                const TruncatedOptions& opt, const FrontGrid* start) {
  const std::size_t M = problem.M();
  if (state.p.size() != M) fail(ErrorCode::GridMismatch, "front state and medium grids differ");
  if (!(sigma >= 0.0) || sigma > state.sigma_max * (1.0 + 1e-12))
    fail(ErrorCode::SigmaOutOfRange, "sigma = " + std::to_string(sigma) + " outside [0, " +
                                         std::to_string(state.sigma_max) + "]");
  PeriodicField lower = state.phi;
  for (double& v : lower.values()) v *= sigma;

  FrontGrid g = FrontGrid::make(M, r, R, lower, state.p);
  g.c = c;
  g.eps = state.eps;
  g.kappa = kappa;
  g.sigma = sigma;
  g.e = problem.e;
  const std::size_t rows = g.rows();
  if (start != nullptr) {
    if (start->M != M || start->rows() != rows)
      fail(ErrorCode::GridMismatch, "warm start has a different window");
    for (std::size_t i = 1; i + 1 < rows; ++i)
      for (std::size_t j = 0; j < M; ++j)
        g.at(i, j) = std::clamp(start->at(i, j), 0.0, state.p[j]);
  }

  const double A = problem.nl.shift_constant(state.p.max());
  const FrontStencil st = front_stencil(c, state.eps, kappa, M, A);
  if (!st.is_m_matrix()) fail(ErrorCode::MonotonicityLost, "front stencil is not an M-matrix");
  const FrontLinearSolver solver(M, rows, st);

  TruncatedResult out;
  const std::size_t n = g.psi.size();
  FrontGrid lin = g;  // same shape, zero extension: M acting on perturbations
  std::fill(lin.lower.values().begin(), lin.lower.values().end(), 0.0);
  std::fill(lin.upper.values().begin(), lin.upper.values().end(), 0.0);
  std::vector<double> next(n);

  auto residual_of = [&](const FrontGrid& grid, std::vector<double>& rhs) {
    rhs = apply_M(problem, grid);
    reaction_rhs(problem, grid, A, rhs);
    return step_residual(st, grid, rhs);
  };

  auto merit = [&](const StepResidual& q) { return std::max(q.abs / opt.tol, q.rel / opt.rtol); };
  std::vector<double> rhs;
  auto res = residual_of(g, rhs);
  std::size_t solves = 0, cooldown = 0, penalty = 10;
  for (std::size_t it = 0;; ++it) {
    if (res.abs <= opt.tol && res.rel <= opt.rtol) {
      out.residual = res.abs;
      out.iterations = solves;
      break;
    }
    if (solves >= opt.max_iter)
      fail(ErrorCode::NoConvergence, "truncated front iteration stalled at residual " +
                                         std::to_string(res.abs) + " (relative " +
                                         std::to_string(res.rel) + ") after " +
                                         std::to_string(it) + " steps");
    next = g.psi;
    solver.solve(rhs, next);
    ++solves;
    clamp_interior(g, state.p, next);
    if (opt.newton_switch <= 0.0 || std::max(res.abs, res.rel) > opt.newton_switch ||
        cooldown > 0) {
      if (cooldown > 0) --cooldown;
      g.psi.swap(next);
      res = residual_of(g, rhs);
      continue;
    }

    // Newton step for P_A psi = N(psi), left-preconditioned by the transport
    // operator with the row-averaged reaction slope on the diagonal.
    std::vector<double> slope(n, 0.0), shift(rows, 0.0);
    for (std::size_t i = 1; i + 1 < rows; ++i) {
      double mean = 0.0;
      for (std::size_t j = 0; j < M; ++j) {
        const double fu = problem.nl.f_u(j, g.psi[i * M + j]);
        slope[i * M + j] = fu + A;
        mean += fu;
      }
      shift[i] = std::max(0.0, -mean / static_cast<double>(M));
    }
    const FrontLinearSolver pre(M, rows, front_stencil(c, state.eps, kappa, M, -1.0), shift);
    auto precondition = [&](std::vector<double>& v) {
      std::vector<double> z(n, 0.0);
      pre.solve(v, z);
      ++solves;
      v.swap(z);
    };
    std::vector<double> b(n, 0.0);
    stencil_apply(st, M, rows, g.psi, b);
    for (std::size_t i = M; i + M < n; ++i) b[i] = rhs[i] - b[i];
    precondition(b);
    const auto w = row_weights(g);
    auto op = [&](const std::vector<double>& v) {
      lin.psi = v;
      auto Nv = apply_M(problem, lin);
      std::vector<double> Jv(n, 0.0);
      stencil_apply(st, M, rows, v, Jv);
      for (std::size_t i = M; i + M < n; ++i) Jv[i] -= Nv[i] + slope[i] * v[i];
      precondition(Jv);
      return Jv;
    };
    const auto d = gmres(op, b, w, opt.gmres_rtol, opt.gmres_restart, opt.gmres_max_matvec);

    // Backtrack on the equation residual; fall back to the monotone step.
    const std::vector<double> base = g.psi;
    bool accepted = false;
    for (double t = 1.0; t >= 1.0 / 16.0; t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) g.psi[i] = base[i] + t * d[i];
      clamp_interior(g, state.p, g.psi);
      std::vector<double> trial_rhs;
      const auto trial = residual_of(g, trial_rhs);
      if (merit(trial) < merit(res)) {
        res = trial;
        rhs.swap(trial_rhs);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      g.psi.swap(next);
      res = residual_of(g, rhs);
      cooldown = penalty;
      penalty *= 2;
    }
  }

  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < rows; ++i)
    for (std::size_t j = 0; j < M; ++j) worst = std::max(worst, g.at(i, j) - g.at(i + 1, j));
  if (worst > opt.monotone_tol)
    fail(ErrorCode::MonotonicityLost,
         "psi decreases along s by " + std::to_string(worst) + " (refine h_s or increase kappa)");
  out.front = std::move(g);
  return out;
}

// -------------------------------------------------------------- shooting

ShootResult shoot_sigma(const Problem& problem, const FrontState& state, const SpeedResult& speed,
                        double c, double kappa, double r, double R, const ShootOptions& opt,
                        const FrontGrid* warm) {
  if (c < speed.c_star - 1e-9 * std::max(1.0, speed.c_star))
    fail(ErrorCode::SubcriticalSpeed, "no pulsating front below c* = " + std::to_string(speed.c_star) +
                                          " (c = " + std::to_string(c) + ")");
  const double kc = std::max(0.0, kappa_bound(c, speed, problem.M()));
  if (kappa > kc * (1.0 + 1e-12) + 1e-15)
    fail(ErrorCode::InvalidInput, "kappa = " + std::to_string(kappa) + " exceeds kappa(c) = " +
                                      std::to_string(kc));
  require(opt.k_norm > 1.0, "k_norm must exceed 1");
  const std::size_t M = problem.M();
  const std::size_t i0 = window_cells(r, M, "r");
  window_cells(R, M, "R");

  ShootResult out;
  out.target = state.p.min() / opt.k_norm;
  const double log_target = std::log(out.target);
  const double t_max = std::log(state.sigma_max);

  // F(t) = log max_x psi_{exp t}(0, x) - log target is increasing in t.
  struct Shot {
    double t;
    double F;
    TruncatedResult sol;
  };
  std::optional<Shot> lo, hi;

  // Changing sigma mostly translates the front: log psi shifts by lambda(c) per unit s.
  const double lc = lambda_of_c(problem, std::max(c, speed.c_star), speed);
  auto translated = [&](const Shot& from, double t) {
    FrontGrid g0 = from.sol.front;
    const auto rows = static_cast<std::ptrdiff_t>(g0.rows());
    const auto k = static_cast<std::ptrdiff_t>(std::lround((t - from.t) / lc * static_cast<double>(M)));
    const double sigma = std::exp(t);
    for (std::ptrdiff_t i = 1; i + 1 < rows; ++i) {
      const std::ptrdiff_t src = std::clamp<std::ptrdiff_t>(i + k, 0, rows - 1);
      for (std::size_t j = 0; j < M; ++j) {
        const double v = src == 0 ? sigma * state.phi[j] : from.sol.front.at(static_cast<std::size_t>(src), j);
        g0.at(static_cast<std::size_t>(i), j) = std::max(v, sigma * state.phi[j]);
      }
    }
    return g0;
  };

  auto shoot = [&](double t) {
    std::optional<FrontGrid> start;
    const Shot* near = nullptr;
    for (const auto* cand : {lo ? &*lo : nullptr, hi ? &*hi : nullptr})
      if (cand && (!near || std::abs(cand->t - t) < std::abs(near->t - t))) near = cand;
    if (near) start = translated(*near, t);
    auto sol = solve_truncated(problem, state, c, kappa, r, R, std::exp(t), opt.solve,
                               start ? &*start : nullptr);
    ++out.shots;
    out.iterations += sol.iterations;
    const double F = std::log(sol.front.row_max(i0)) - log_target;
    Shot s{t, F, std::move(sol)};
    if (F < 0.0) {
      if (!lo || t > lo->t) lo = std::move(s);
    } else if (!hi || t < hi->t) {
      hi = std::move(s);
    }
    return F;
  };
  auto best = [&]() -> const Shot* {
    if (lo && hi) return std::abs(lo->F) <= std::abs(hi->F) ? &*lo : &*hi;
    return lo ? &*lo : &*hi;
  };
  auto done = [&] { return std::abs(best()->F) <= opt.target_rtol || out.shots >= opt.max_shots; };

  // First shot: the previous profile, or the cold subsolution sigma phi.
  {
    double t0;
    if (warm != nullptr && warm->sigma > 0.0) {
      t0 = std::min(t_max, std::log(warm->sigma));
    } else {
      // Linear tail psi ~ sigma exp(lambda(c) (s + r)).
      t0 = std::min(t_max, log_target - lc * r);
    }
    auto sol = solve_truncated(problem, state, c, kappa, r, R, std::exp(t0), opt.solve, warm);
    ++out.shots;
    out.iterations += sol.iterations;
    const double F = std::log(sol.front.row_max(i0)) - log_target;
    Shot s{t0, F, std::move(sol)};
    if (F < 0.0)
      lo = std::move(s);
    else
      hi = std::move(s);
  }

  // Safeguarded secant in log-log: the tail scales linearly with sigma, so the
  // slope is near 1 until the max saturates.
  double t_prev = 0.0, F_prev = 0.0;
  bool have_prev = false;
  double t_cur = best()->t, F_cur = best()->F;
  int flat = 0;
  while (!done()) {
    double slope = 1.0;
    if (have_prev && t_cur != t_prev) {
      const double raw = (F_cur - F_prev) / (t_cur - t_prev);
      flat = !(lo && hi) && raw < 1e-2 ? flat + 1 : 0;
      if (flat >= 3)
        fail(ErrorCode::BracketFailure, "max psi(0, .) does not respond to sigma; c is at or below "
                                        "the minimal speed of the grid");
      slope = std::clamp(raw, 0.25, 4.0);
    }
    double t = t_cur - F_cur / slope;
    if (lo && hi) {
      if (!(t > lo->t && t < hi->t)) t = 0.5 * (lo->t + hi->t);
      if (hi->t - lo->t < 1e-14 * std::max(1.0, std::abs(hi->t))) break;
    } else if (lo) {
      if (lo->t >= t_max)
        fail(ErrorCode::BracketFailure, "target level not reached at sigma_max; enlarge R");
      t = std::min(t, t_max);
    }
    t_prev = t_cur;
    F_prev = F_cur;
    have_prev = true;
    t_cur = t;
    F_cur = shoot(t);
  }
  const Shot* b = best();
  if (std::abs(b->F) > opt.target_rtol)
    fail(ErrorCode::NoConvergence, "sigma shooting missed the target: relative error " +
                                       std::to_string(std::expm1(std::abs(b->F))));
  out.sigma = std::exp(b->t);
  out.achieved = std::exp(b->F) * out.target;
  out.solution = b->sol;
  return out;
}

}  // namespace perifront

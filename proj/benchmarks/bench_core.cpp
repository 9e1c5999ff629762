#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "perifront/front.hpp"
#include "perifront/grid.hpp"
#include "perifront/model.hpp"
#include "perifront/spectral.hpp"
#include "perifront/stationary.hpp"

using namespace perifront;

namespace {

Problem cosine(std::size_t M) {
  return {KernelSpec::bump(), Nonlinearity::logistic(Medium::fourier(1.0, {0.5}), Medium::constant(1.0), M),
          Direction::Right};
}

PeriodicField wave(std::size_t M) {
  return PeriodicField::sample(M, [](double x) { return 1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * x); });
}

void BM_ConvolveDirect(benchmark::State& st) {
  const auto M = static_cast<std::size_t>(st.range(0));
  const auto K = periodize_tilted(KernelSpec::bump(), 1.0, Direction::Right, M);
  const auto u = wave(M);
  for (auto _ : st) benchmark::DoNotOptimize(cyclic_convolve_direct(K, u));
  st.SetComplexityN(st.range(0));
}

void BM_ConvolveFft(benchmark::State& st) {
  const auto M = static_cast<std::size_t>(st.range(0));
  const auto K = periodize_tilted(KernelSpec::bump(), 1.0, Direction::Right, M);
  const CyclicConvolver conv(K);
  const auto u = wave(M);
  for (auto _ : st) benchmark::DoNotOptimize(conv.apply(u));
  st.SetComplexityN(st.range(0));
}

void BM_PrincipalEig(benchmark::State& st) {
  const auto P = cosine(static_cast<std::size_t>(st.range(0)));
  EigenOptions opt;
  opt.classify = false;
  opt.adjoint = false;
  for (auto _ : st) benchmark::DoNotOptimize(principal_eig(P, 1.0, 0.0, opt).mu);
}

void BM_ApplyM(benchmark::State& st) {
  const auto M = static_cast<std::size_t>(st.range(0));
  const auto P = cosine(M);
  const auto p = solve_stationary(P, 0.0, StartFrom::Above).p;
  auto g = FrontGrid::make(M, 10.0, 10.0, PeriodicField::constant(M, 1e-6), p);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < M; ++j) g.at(i, j) = p[j] / (1.0 + std::exp(-g.s(i)));
  for (auto _ : st) benchmark::DoNotOptimize(apply_M(P, g));
  st.counters["rows"] = static_cast<double>(g.rows());
}

void BM_FrontLinearSolve(benchmark::State& st) {
  const auto M = static_cast<std::size_t>(st.range(0));
  const std::size_t rows = 20 * M + 1;
  const auto stencil = front_stencil(1.0, 1e-2, 1e-2, M, 3.0);
  const FrontLinearSolver solver(M, rows, stencil);
  std::vector<double> rhs(rows * M, 1.0), psi(rows * M, 0.0);
  for (auto _ : st) {
    solver.solve(rhs, psi);
    benchmark::DoNotOptimize(psi.data());
  }
}

}  // namespace

BENCHMARK(BM_ConvolveDirect)->RangeMultiplier(2)->Range(64, 2048)->Complexity();
BENCHMARK(BM_ConvolveFft)->RangeMultiplier(2)->Range(64, 2048)->Complexity();
BENCHMARK(BM_PrincipalEig)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyM)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FrontLinearSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <memory>

#include <benchmark/benchmark.h>

#include "qbsde/bsde.hpp"

namespace {

using namespace qbsde;

BsdeProblem lognormal() {
  BsdeProblem p;
  p.generator = builtin::delta_over_y(0.5);
  p.transform = build_transform(p.generator, 1.0);
  p.terminal = terminal::exponential(0.5);
  p.forward = ForwardModel::brownian();
  return p;
}

void BM_Simulate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(ForwardModel::brownian(), 0, 0, 1, 20, n, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n) * 20);
}
BENCHMARK(BM_Simulate)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_QuadraturePoint(benchmark::State& state) {
  const QuadratureValue v(lognormal(), ExactLaw::brownian, static_cast<int>(state.range(0)));
  double x = -1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(v.Y(0.3, x));
    x = x < 1 ? x + 1e-3 : -1;
  }
}
BENCHMARK(BM_QuadraturePoint)->Arg(32)->Arg(64);

void BM_SolveQuadraturePaths(benchmark::State& state) {
  const BsdeProblem p = lognormal();
  auto b = std::make_shared<const PathBundle>(simulate(p.forward, 0, 0, 1, 20, 2000, 1));
  for (auto _ : state) benchmark::DoNotOptimize(solve_quadrature(p, ExactLaw::brownian, {}, b));
}
BENCHMARK(BM_SolveQuadraturePaths)->Unit(benchmark::kMillisecond);

void BM_SolveRegression(benchmark::State& state) {
  const BsdeProblem p = lognormal();
  auto b = std::make_shared<const PathBundle>(simulate(p.forward, 0, 0, 1, 10, 20000, 1));
  RegressionOptions o;
  o.degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_regression(p, b, o));
}
// Higher degrees push this fit out of V = (-1/2, inf); see the f = 0 case.
BENCHMARK(BM_SolveRegression)->Arg(2)->Unit(benchmark::kMillisecond);

// f = 0 has V = R, so any degree is admissible: isolates the fit cost.
void BM_SolveRegressionByDegree(benchmark::State& state) {
  BsdeProblem p;
  p.generator = builtin::constant(0.0);
  p.transform = build_transform(p.generator, 0.0);
  p.terminal = terminal::exponential(0.5);
  p.forward = ForwardModel::brownian();
  auto b = std::make_shared<const PathBundle>(simulate(p.forward, 0, 0, 1, 10, 20000, 1));
  RegressionOptions o;
  o.degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_regression(p, b, o));
}
BENCHMARK(BM_SolveRegressionByDegree)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

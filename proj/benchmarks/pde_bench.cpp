#include <benchmark/benchmark.h>

#include "qbsde/pde.hpp"

namespace {

using namespace qbsde;

PdeProblem constant_half(int n) {
  PdeProblem p;
  p.generator = builtin::constant(0.5);
  p.transform = build_transform(p.generator, 0.0);
  p.terminal = terminal::identity();
  p.forward = ForwardModel::brownian();
  p.n_t = n;
  p.n_x = n + 1;
  p.assumptions = {true, true, true, false};
  return p;
}

void BM_FdOracle(benchmark::State& state) {
  const PdeProblem p = constant_half(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_fd_oracle(p));
}
BENCHMARK(BM_FdOracle)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_FeynmanKacQuadrature(benchmark::State& state) {
  const PdeProblem p = constant_half(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_feynman_kac(p));
}
BENCHMARK(BM_FeynmanKacQuadrature)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

#include <benchmark/benchmark.h>

#include "qbsde/generator.hpp"
#include "qbsde/transform.hpp"

namespace {

using namespace qbsde;

void BM_BuildTabulated(benchmark::State& state) {
  const Generator g = builtin::abs_log_over_y();
  TransformOptions o;
  o.grid_nodes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_transform(g, 1.0, o));
}
BENCHMARK(BM_BuildTabulated)->Arg(512)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_BuildBoundedRange(benchmark::State& state) {
  const Generator g = expression_generator("-1/((y-1)*(y-6))", OpenInterval(1, 6));
  for (auto _ : state) benchmark::DoNotOptimize(build_transform(g, 3.5));
}
BENCHMARK(BM_BuildBoundedRange)->Unit(benchmark::kMillisecond);

void BM_EvalU(benchmark::State& state) {
  const Transform t = build_transform(builtin::abs_log_over_y(), 1.0);
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.u(x));
    x = x < 5 ? x + 1e-3 : 0.3;
  }
}
BENCHMARK(BM_EvalU);

void BM_EvalUInv(benchmark::State& state) {
  const Transform t = build_transform(builtin::abs_log_over_y(), 1.0);
  double y = -0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.u_inv(y));
    y = y < 5 ? y + 1e-3 : -0.5;
  }
}
BENCHMARK(BM_EvalUInv);

}  // namespace

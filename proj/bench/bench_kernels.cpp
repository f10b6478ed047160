#include <benchmark/benchmark.h>

#include "spiraldim/curves.hpp"
#include "spiraldim/fractal.hpp"

using namespace spiraldim;

namespace {

const Curve& spiral() {
  static const Curve c = [] {
    curves::PowerSpiralSpec s;
    s.alpha = 0.5;
    return curves::gen_power_spiral(s, 0.02, {5'000'000, 1e-4});
  }();
  return c;
}

const std::vector<double>& scales() {
  static const std::vector<double> e = fractal::ladder_for_curve(spiral()).epsilons;
  return e;
}

void BM_BoxCountsParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(fractal::kernels::box_counts(spiral(), scales(), {}));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(spiral().size() * scales().size()));
}

void BM_BoxCountsReference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(fractal::reference::box_counts(spiral(), scales(), {}));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(spiral().size() * scales().size()));
}

void BM_NeighbourhoodParallel(benchmark::State& st) {
  const double eps = scales()[scales().size() / 2];
  for (auto _ : st)
    benchmark::DoNotOptimize(fractal::kernels::neighbourhood_pixels(spiral(), eps, static_cast<int>(st.range(0))));
}

void BM_NeighbourhoodReference(benchmark::State& st) {
  const double eps = scales()[scales().size() / 2];
  for (auto _ : st)
    benchmark::DoNotOptimize(
        fractal::reference::neighbourhood_pixels(spiral(), eps, static_cast<int>(st.range(0))));
}

}  // namespace

BENCHMARK(BM_BoxCountsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoxCountsReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NeighbourhoodParallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NeighbourhoodReference)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

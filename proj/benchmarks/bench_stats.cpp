#include <benchmark/benchmark.h>

#include <random>

#include "panelist/anova.hpp"
#include "panelist/distributions.hpp"
#include "panelist/normality.hpp"

using namespace panelist;

namespace {

CellScores cells_of(int n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(3.0, 1.0);
  CellScores c;
  for (auto& cell : c) {
    for (int i = 0; i < n; ++i) cell.push_back(d(rng));
  }
  return c;
}

void BM_TwoWayAnova(benchmark::State& state) {
  const auto cells = cells_of(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(two_way_anova(cells));
}
BENCHMARK(BM_TwoWayAnova)->Arg(10)->Arg(40)->Arg(400);

void BM_FCdf(benchmark::State& state) {
  const double d2 = static_cast<double>(state.range(0));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f_cdf(x, 1, d2));
    x = x < 20 ? x * 1.1 : 0.1;
  }
}
BENCHMARK(BM_FCdf)->Arg(4)->Arg(36)->Arg(1000);

void BM_ShapiroWilk(benchmark::State& state) {
  const auto cells = cells_of(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(shapiro_wilk(cells[0]));
}
BENCHMARK(BM_ShapiroWilk)->Arg(10)->Arg(50)->Arg(500);

}  // namespace

#include <benchmark/benchmark.h>

#include <vector>

#include "nebv/harness.hpp"
#include "nebv/nebv.hpp"
#include "nebv/quantile.hpp"
#include "nebv/random.hpp"

using namespace nebv;

namespace {

std::vector<double> sample_variances(std::size_t p) {
  Rng rng(1, 0, Stream::kTest);
  std::vector<double> s2(p);
  for (auto& s : s2) s = sample_scaled_chisq(1.0 / rng.uniform(0.5, 2.0), DegreesOfFreedom(8), rng);
  return s2;
}

void BM_NebvEstimate(benchmark::State& state) {
  const auto s2 = sample_variances(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nebv_estimate(s2, DegreesOfFreedom(8)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NebvEstimate)->RangeMultiplier(10)->Range(100, 1000000)->Complexity(benchmark::oNLogN);

void BM_StudentTQuantile(benchmark::State& state) {
  double q = 0.05 / 6000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(student_t_quantile(q, DegreesOfFreedom(8)));
    q = q * 1.0000001;
  }
}
BENCHMARK(BM_StudentTQuantile);

void BM_OneReplication(benchmark::State& state) {
  Scenario s;
  s.p = 3000;
  s.prior = PriorSpec::log_normal(0.0, 0.25);
  s.x_grid = {0.5};
  s.reps = 1;
  s.seed = 1;
  RunOptions opt;
  opt.keep_records = false;
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(s, opt));
}
BENCHMARK(BM_OneReplication)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

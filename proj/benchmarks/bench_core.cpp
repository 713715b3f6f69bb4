#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "twomode/gaussian.hpp"
#include "twomode/gaussianity.hpp"
#include "twomode/photon_statistics.hpp"
#include "twomode/pipeline.hpp"
#include "twomode/reconstruction.hpp"

using namespace twomode;

namespace {

const CovarianceMatrix& model_cm() {
  static const auto cm = cm_from_model({.zeta = 0.6, .beta = 0.05, .nbar1 = 0.3, .nbar2 = 0.3});
  return cm;
}

void BM_Diagnose(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(diagnose(model_cm()));
}
BENCHMARK(BM_Diagnose);

void BM_ShapiroWilk(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto& x : v) x = n01(rng);
  for (auto _ : state) benchmark::DoNotOptimize(shapiro_wilk(v));
}
BENCHMARK(BM_ShapiroWilk)->Arg(500)->Arg(5000);

void BM_GaussianityReport(benchmark::State& state) {
  MeasurementConfig mc;
  mc.mode = Mode::c;
  mc.seed = 2;
  const auto trace = sample_trace(model_cm(), mc);
  for (auto _ : state) benchmark::DoNotOptimize(gaussianity_report(trace, PhaseBinning{}));
}
BENCHMARK(BM_GaussianityReport)->Unit(benchmark::kMillisecond);

void BM_EstimateMode(benchmark::State& state) {
  MeasurementConfig mc;
  mc.mode = Mode::a;
  mc.seed = 3;
  const auto trace = sample_trace(model_cm(), mc);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_mode(trace, 0.87, mc.electronic_noise_var, true));
}
BENCHMARK(BM_EstimateMode)->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& state) {
  SynthesisConfig sc;
  sc.seed = 4;
  const auto set = synthesize(model_cm(), sc);
  for (auto _ : state) benchmark::DoNotOptimize(analyze(set, AnalysisConfig{}));
}
BENCHMARK(BM_Analyze)->Unit(benchmark::kMillisecond);

void BM_JointPnm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(joint_pnm(model_cm(), n, n));
}
BENCHMARK(BM_JointPnm)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

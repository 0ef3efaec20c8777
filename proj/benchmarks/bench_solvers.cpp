#include <benchmark/benchmark.h>

#include <vector>

#include "iontherm/experiments.hpp"
#include "iontherm/langevin_oracle.hpp"

using namespace iontherm;

namespace {

ScenarioConfig end_driven(int n, TrapKind kind = TrapKind::uniform) {
  ScenarioConfig s;
  s.chain.kind = kind;
  s.chain.n = n;
  s.chain.omega_x = 10.0;
  s.attachments = {{1, 0.1, 2.0}, {n, 0.1, 10.0}};
  return s;
}

}  // namespace

static void BM_Decompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainModel m = build_model(end_driven(n));
  const DriftMatrix drift = build_drift_matrix(m.coupling, m.profile);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(drift));
}
BENCHMARK(BM_Decompose)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_SteadyProfile(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainModel m = build_model(end_driven(n));
  for (auto _ : state) benchmark::DoNotOptimize(steady_profile(m));
}
BENCHMARK(BM_SteadyProfile)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_BuildModel(benchmark::State& state) {
  const ScenarioConfig s = end_driven(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_model(s));
}
BENCHMARK(BM_BuildModel)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_VarianceAt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainModel m = build_model(end_driven(n));
  const InitialMoments init = thermal_initial(std::vector<double>(n, 5.0), m.coupling);
  for (auto _ : state) benchmark::DoNotOptimize(variance_at(m.decomp, init, m.strengths, 10.0));
}
BENCHMARK(BM_VarianceAt)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_PropagatorAt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainModel m = build_model(end_driven(n));
  const InitialMoments init = thermal_initial(std::vector<double>(n, 5.0), m.coupling);
  const MomentPropagator prop(m.decomp, init, m.strengths);
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prop.at(t));
    t *= 1.001;
  }
}
BENCHMARK(BM_PropagatorAt)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_SolveEquilibrium(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double omega_z = calibrate_axial_frequency(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_equilibrium(n, omega_z));
}
BENCHMARK(BM_SolveEquilibrium)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_CalibrateAxial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_axial_frequency(n));
}
BENCHMARK(BM_CalibrateAxial)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_LyapunovOracle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainModel m = build_model(end_driven(n));
  const DriftMatrix drift = build_drift_matrix(m.coupling, m.profile);
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_steady_covariance(drift, m.strengths));
}
BENCHMARK(BM_LyapunovOracle)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

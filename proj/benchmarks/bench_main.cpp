#include <benchmark/benchmark.h>

#include "cvsteady/analytic.hpp"
#include "cvsteady/gaussian.hpp"
#include "cvsteady/labframe.hpp"
#include "cvsteady/langevin.hpp"

using namespace cvsteady;

namespace {

const SystemParams kSys = SystemParams::symmetric(1.0, 0.7, 0.5);
const BathSpec kBath(0.1, 0.3, 0.0);

void BM_SolveLyapunov(benchmark::State& state) {
  const Mat4 A = build_drift_rotating(kSys);
  const DerivedBath b = derive_bath_params(kBath);
  const Mat4 D = build_diffusion_rotating(kSys, b, b);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov(A, D));
}
BENCHMARK(BM_SolveLyapunov);

void BM_SymplecticEigenvalues(benchmark::State& state) {
  const Mat4 V = partial_transpose(rotating_steady_state(kSys, kBath, kBath).matrix());
  for (auto _ : state) benchmark::DoNotOptimize(symplectic_eigenvalues(V));
}
BENCHMARK(BM_SymplecticEigenvalues);

void BM_SymplecticInvariants(benchmark::State& state) {
  const Mat4 V = partial_transpose(rotating_steady_state(kSys, kBath, kBath).matrix());
  for (auto _ : state) benchmark::DoNotOptimize(symplectic_eigenvalues_invariants(V));
}
BENCHMARK(BM_SymplecticInvariants);

void BM_SteadyStatePipeline(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(log_negativity(rotating_steady_state(kSys, kBath, kBath)));
}
BENCHMARK(BM_SteadyStatePipeline);

void BM_AnalyticTc(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(analytic::critical_temperature(0.5, 0.7, 0.2, 1.0));
}
BENCHMARK(BM_AnalyticTc);

void BM_PeriodicSteadyState(benchmark::State& state) {
  const labframe::LabFrameProblem p(kSys, kBath, kBath);
  labframe::FloquetOptions o;
  o.method = state.range(0) == 0 ? labframe::Method::Relaxation : labframe::Method::FixedPoint;
  for (auto _ : state) benchmark::DoNotOptimize(labframe::find_periodic_steady_state(p, o));
}
BENCHMARK(BM_PeriodicSteadyState)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EnsembleSteps(benchmark::State& state) {
  const DerivedBath b = derive_bath_params(kBath);
  const langevin::NoiseModel model{b, b, 1, 0.0};
  langevin::EnsembleOptions o;
  o.n_traj = static_cast<std::size_t>(state.range(0));
  std::size_t steps = 0;
  for (auto _ : state) {
    const auto est = langevin::run_ensemble(kSys, model, o);
    steps += est.steps * est.n_traj;
    benchmark::DoNotOptimize(est);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_EnsembleSteps)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_NoiseDraw(benchmark::State& state) {
  const DerivedBath b = derive_bath_params(kBath);
  langevin::NoiseGenerator gen(kSys, {b, b, 1, 0.0}, 0);
  for (auto _ : state) benchmark::DoNotOptimize(gen.next());
}
BENCHMARK(BM_NoiseDraw);

}  // namespace
BENCHMARK_MAIN();

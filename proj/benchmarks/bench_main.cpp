#include <benchmark/benchmark.h>

#include "pemwe/config.hpp"
#include "pemwe/fast_solver.hpp"
#include "pemwe/membrane.hpp"
#include "pemwe/multiscale.hpp"
#include "pemwe/reference.hpp"

namespace {

using namespace pemwe;

SimulationSetup setup() { return load_setup(PEMWE_DEFAULT_CONFIG_PATH); }

// 2 h horizon with dK = 600 s, dissolution constants x1e3.
SimulationSetup desk(ProfileShape shape) {
  SimulationSetup s = setup();
  s.profile.shape = shape;
  s.multiscale.dK = 600.0;
  s.multiscale.horizon = 7200.0;
  s.params.k_diss1 *= 1e3;
  s.params.k_diss2 *= 1e3;
  return s;
}

void BM_MembraneStep(benchmark::State& st) {
  const auto s = setup();
  const auto system = MembraneSystem::assemble(s.params, s.constants,
                                               static_cast<std::size_t>(st.range(0)));
  MembraneWorkspace ws;
  std::vector<double> field(system.nodes(), 0.0);
  for (auto _ : st) {
    step_membrane(field, s.multiscale.dk, 1.0, 0.5, system, ws);
    benchmark::DoNotOptimize(field.data());
  }
}
BENCHMARK(BM_MembraneStep)->Arg(16)->Arg(64)->Arg(256);

void BM_FastStep(benchmark::State& st) {
  const auto s = setup();
  const auto system = MembraneSystem::assemble(s.params, s.constants, s.multiscale.n_elements);
  FastSolver solver(s.params, s.constants, system, s.multiscale.dk,
                    {s.multiscale.newton_tol, s.multiscale.newton_max_iter});
  FastState state = initial_fast_state(system.nodes());
  bool high = false;
  for (auto _ : st) {
    high = !high;
    solver.step(state, high ? s.profile.e_max : s.profile.e_min);
    benchmark::DoNotOptimize(state.theta1);
  }
}
BENCHMARK(BM_FastStep);

void BM_OnePeriod(benchmark::State& st) {
  const auto s = setup();
  const auto system = MembraneSystem::assemble(s.params, s.constants, s.multiscale.n_elements);
  FastSolver solver(s.params, s.constants, system, s.multiscale.dk,
                    {s.multiscale.newton_tol, s.multiscale.newton_max_iter});
  FastState state = initial_fast_state(system.nodes());
  PeriodTrajectory out;
  for (auto _ : st) {
    run_one_period(solver, state, s.profile, s.multiscale.steps_per_period(), out);
    benchmark::DoNotOptimize(out.theta1.data());
  }
}
BENCHMARK(BM_OnePeriod)->Unit(benchmark::kMillisecond);

void BM_AverageSlowRhs(benchmark::State& st) {
  const auto s = setup();
  const auto system = MembraneSystem::assemble(s.params, s.constants, s.multiscale.n_elements);
  FastSolver solver(s.params, s.constants, system, s.multiscale.dk,
                    {s.multiscale.newton_tol, s.multiscale.newton_max_iter});
  const auto run = run_one_period(solver, initial_fast_state(system.nodes()), s.profile,
                                  s.multiscale.steps_per_period());
  for (auto _ : st) {
    benchmark::DoNotOptimize(average_slow_rhs(run.trajectory, s.n_ir0, s.params, s.constants));
  }
}
BENCHMARK(BM_AverageSlowRhs)->Unit(benchmark::kMicrosecond);

void BM_DeskMultiscale(benchmark::State& st) {
  const auto s = desk(ProfileShape::square);
  for (auto _ : st) {
    auto traj = run_multiscale(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0});
    benchmark::DoNotOptimize(traj.steps.data());
  }
}
BENCHMARK(BM_DeskMultiscale)->Unit(benchmark::kMillisecond);

void BM_DeskFullyResolved(benchmark::State& st) {
  const auto s = desk(ProfileShape::square);
  for (auto _ : st) {
    auto traj = run_fully_resolved(s.multiscale, s.profile, s.params, s.constants, {s.n_ir0});
    benchmark::DoNotOptimize(traj.n_ir.data());
  }
}
BENCHMARK(BM_DeskFullyResolved)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

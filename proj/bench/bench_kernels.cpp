#include <benchmark/benchmark.h>

#include "conemech/scenario_io.hpp"

using namespace conemech;

namespace {

ScenarioFile load(const char* name) {
  return load_scenario(std::string(CONEMECH_SCENARIO_DIR) + "/" + name + ".scn");
}

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_NaiveCone(benchmark::State& st) {
  const ScenarioFile f = load("fig5");
  ConeOptions o;
  o.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(naive_motion_cone(f.scenario, f.scenario.pose, o));
}

void BM_RobustCone(benchmark::State& st) {
  ScenarioFile f = load("fig6");
  f.box.entries.push_back({"surfaces.mu[1]", 0.01});
  ConeOptions o;
  o.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(robust_cone(f.scenario, f.scenario.pose, f.box, o));
}

void BM_PlanTrajectory(benchmark::State& st) {
  const ScenarioFile f = load("fig6");
  const PlanOptions o = f.plan_options(exec_of(st));
  for (auto _ : st) {
    benchmark::DoNotOptimize(plan_trajectory(f.scenario, f.box, deg2rad(85), o));
  }
}

void BM_Sweep(benchmark::State& st) {
  const ScenarioFile f = load("table1");
  const Exec ex = exec_of(st);
  const PlanFactory fac = [&](const Scenario& s, const ParameterBox& b) {
    return plan_trajectory(s, b, deg2rad(*f.planner.phi_goal_deg), f.plan_options(ex));
  };
  const auto grid = grid_cells(f.sweep);
  for (auto _ : st) benchmark::DoNotOptimize(perturbation_sweep(f.scenario, f.box, fac, grid, ex));
}

}  // namespace

BENCHMARK(BM_NaiveCone)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RobustCone)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PlanTrajectory)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <filesystem>

#include "bcnav/session.hpp"

using namespace bcnav;

namespace {

Scenario scenario(const char* name) { return load_scenario(std::filesystem::path(BCNAV_SCENARIO_DIR) / name); }

// One control cycle from the start pose: scan, ground, layers, plan, follow.
void BM_ControlCycle(benchmark::State& st, const char* file) {
  const Scenario s = scenario(file);
  NavigationSession session(s);
  const ConstraintSet constraints = session.constraints();
  for (auto _ : st) {
    ControlLoop loop(s.world, s.start_pose(), s.goal, s.config, s.seed);
    benchmark::DoNotOptimize(loop.cycle(constraints, 0.0));
  }
}
BENCHMARK_CAPTURE(BM_ControlCycle, empty, "empty_straight.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ControlCycle, left_pass, "left_pass.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ControlCycle, curtain_door, "curtain_door.json")->Unit(benchmark::kMillisecond);

void BM_FullRun(benchmark::State& st) {
  const Scenario s = scenario("keep_right_corridor.json");
  for (auto _ : st) benchmark::DoNotOptimize(run_scenario(s));
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

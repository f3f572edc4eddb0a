#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "bcnav/perception.hpp"
#include "bcnav/scenario.hpp"

using namespace bcnav;

namespace {

void BM_Dbscan(benchmark::State& st) {
  std::mt19937 rng(1);
  std::normal_distribution<double> blob(0.0, 0.3);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<Vec2> pts;
  for (int k = 0; k < st.range(0); ++k) {
    if (k % 4 == 0) pts.push_back({u(rng), u(rng)});
    else pts.push_back({(k % 3) * 2.0 + blob(rng), blob(rng)});
  }
  for (auto _ : st) benchmark::DoNotOptimize(dbscan_labels(pts, 0.3, 3));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Dbscan)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_SimulateScan(benchmark::State& st) {
  const Scenario s = load_scenario(std::filesystem::path(BCNAV_SCENARIO_DIR) / "curtain_door.json");
  SensorConfig cfg;
  cfg.n_rays = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_scan(s.world, s.start_pose(), cfg));
}
BENCHMARK(BM_SimulateScan)->Arg(360)->Arg(720);

}  // namespace

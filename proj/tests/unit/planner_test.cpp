#include <gtest/gtest.h>

#include <random>

#include "bcnav/errors.hpp"
#include "bcnav/planner.hpp"
#include "instances.hpp"
#include "oracles.hpp"

namespace bcnav {
namespace {

TEST(Astar, StraightOnEmptyGrid) {
  CostGrid g(GridSpec{}, kFree);
  auto p = astar_plan(g, {{0.0, 0.0}, {2.0, 0.0}, 0.1});
  EXPECT_NEAR(p.cost, 2.0, 1e-9);
  EXPECT_NEAR(p.length_m, 2.0, 1e-9);
  for (const auto& c : p.cells) EXPECT_EQ(c.j, p.cells.front().j);
}

TEST(Astar, ThroughTheOnlyGap) {
  const GridSpec spec{1.0, 5, 5, {0, 0}};
  CostGrid g(spec, kFree);
  for (int i = 0; i < 5; ++i) g.at({i, 2}) = kLethal;
  g.at({3, 2}) = kFree;
  auto p = astar_plan(g, {{0.5, 0.5}, {0.5, 4.5}, 0.1});
  EXPECT_NE(std::find(p.cells.begin(), p.cells.end(), CellIndex{3, 2}), p.cells.end());
  auto want = oracle::dijkstra(g, {0, 0}, {0, 4});
  ASSERT_TRUE(want);
  EXPECT_EQ(oracle::exact_path_cost(g, p.cells), want);
}

TEST(Astar, Errors) {
  const GridSpec spec{1.0, 5, 5, {0, 0}};
  CostGrid g(spec, kFree);
  EXPECT_THROW(astar_plan(g, {{-1, 0.5}, {0.5, 4.5}, 0.1}), InputError);
  g.at({0, 0}) = kLethal;
  EXPECT_THROW(astar_plan(g, {{0.5, 0.5}, {0.5, 4.5}, 0.1}), InputError);
  g.at({0, 0}) = kFree;
  for (int i = 0; i < 5; ++i) g.at({i, 2}) = kLethal;
  EXPECT_THROW(astar_plan(g, {{0.5, 0.5}, {0.5, 4.5}, 0.1}), NoPathError);
}

TEST(Astar, NoCornerCutting) {
  const GridSpec spec{1.0, 2, 2, {0, 0}};
  CostGrid g(spec, kFree);
  g.at({1, 0}) = kLethal;
  g.at({0, 1}) = kLethal;
  EXPECT_THROW(astar_plan(g, {{0.5, 0.5}, {1.5, 1.5}, 0.1}), NoPathError);
  PlannerParams p;
  p.corner_cutting = true;
  EXPECT_EQ(astar_plan(g, {{0.5, 0.5}, {1.5, 1.5}, 0.1}, p).cells.size(), 2u);
}

TEST(AstarProperty, MatchesDijkstraOnRandomGrids) {
  std::mt19937 rng(1234);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto prob = instances::random_grid(rng, 30, 30);
    auto want = oracle::dijkstra(prob.spat, prob.start, prob.goal);
    if (!want) {
      EXPECT_THROW(astar_plan(prob.spat, prob.request()), NoPathError);
      continue;
    }
    auto p = astar_plan(prob.spat, prob.request());
    ++solved;
    EXPECT_EQ(oracle::exact_path_cost(prob.spat, p.cells), want) << "trial " << trial;
    for (const auto& c : p.cells) EXPECT_NE(prob.spat.at(c), kLethal);
    for (std::size_t k = 1; k < p.cells.size(); ++k) {
      EXPECT_LE(std::abs(p.cells[k].i - p.cells[k - 1].i), 1);
      EXPECT_LE(std::abs(p.cells[k].j - p.cells[k - 1].j), 1);
    }
    EXPECT_NEAR(p.cost, path_cost(prob.spat, p.cells), 1e-9);
  }
  EXPECT_GT(solved, 100);
}

TEST(AstarProperty, FourConnectedMatchesDijkstra) {
  std::mt19937 rng(77);
  PlannerParams params;
  params.connectivity = 4;
  for (int trial = 0; trial < 50; ++trial) {
    auto prob = instances::random_grid(rng, 20, 20);
    auto want = oracle::dijkstra(prob.spat, prob.start, prob.goal, 4);
    if (!want) continue;
    auto p = astar_plan(prob.spat, prob.request(), params);
    EXPECT_EQ(oracle::exact_path_cost(prob.spat, p.cells), want);
  }
}

TEST(AstarProperty, ScalingKeepsArgmin) {
  // Costs scaled by 2 (kept below 255) leave every optimal path optimal.
  std::mt19937 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    auto prob = instances::random_grid(rng, 20, 20);
    CostGrid scaled = prob.spat;
    for (auto& c : scaled.cells) {
      if (c != kLethal) c = static_cast<std::uint8_t>(std::min(c / 2, 126));
    }
    CostGrid doubled = scaled;
    for (auto& c : doubled.cells) {
      if (c != kLethal) c = static_cast<std::uint8_t>(c * 2);
    }
    auto want = oracle::dijkstra(scaled, prob.start, prob.goal);
    if (!want) continue;
    auto a = astar_plan(scaled, prob.request());
    auto b = astar_plan(doubled, prob.request());
    const auto ca = oracle::exact_path_cost(scaled, a.cells);
    const auto cb = oracle::exact_path_cost(scaled, b.cells);
    EXPECT_EQ(ca, want);
    EXPECT_EQ(cb, want) << "path optimal for doubled costs is not optimal for the originals";
  }
}

TEST(AstarOracle, ExhaustiveLeftPass) {
  for (double alpha : {1.0, 3.0}) {
    auto prob = instances::left_pass_15(alpha);
    auto p = astar_plan(prob.spat, prob.request());
    auto best = oracle::enumerate_min_cost(prob.spat, prob.start, prob.goal);
    ASSERT_TRUE(best);
    EXPECT_EQ(oracle::exact_path_cost(prob.spat, p.cells), best);

    std::vector<char> right_only(prob.spat.spec.size(), 1);
    for (int j = 6; j <= 8; ++j)
      for (int i = 0; i <= 8; ++i) right_only[prob.spat.spec.index({i, j})] = 0;
    auto right = oracle::enumerate_min_cost(prob.spat, prob.start, prob.goal, &right_only);
    ASSERT_TRUE(right);
    EXPECT_TRUE(*best < *right);
    for (const auto& c : p.cells) {
      if (c.j >= 6 && c.j <= 8) { EXPECT_LT(c.i, 6); }
    }
  }
}

// 5 m x 5 m, obstacle centred at (2.5, 2.5), travel along +y.
struct SideCase {
  CostGrid spat;
  CostGrid field;
  BevBox obstacle;
};

SideCase side_case(Direction d, double alpha) {
  const GridSpec spec{0.05, 100, 100, {0.0, 0.0}};
  const BevBox obstacle{2.0, 2.2, 3.0, 2.8, 1, "car"};
  CostGrid trav(spec, kFree);
  auto r = box_cells(spec, obstacle.rect());
  for (int j = r->j0; j <= r->j1; ++j)
    for (int i = r->i0; i <= r->i1; ++i) trav.at({i, j}) = kLethal;
  DirectionalParams p;
  p.alpha = alpha;
  auto field = build_directional(obstacle, d, Traversability::NonTraversable, p, spec, LateralAxis::PlusX);
  return {fuse_spatial(trav, field), field, obstacle};
}

TEST(PlannerProperty, SideOfObstacle) {
  for (double alpha : {0.5, 1.0, 3.0, 5.0}) {
    for (Direction d : {Direction::Left, Direction::Right}) {
      auto sc = side_case(d, alpha);
      auto p = astar_plan(sc.spat, {{2.5, 0.3}, {2.5, 4.7}, 0.05});
      double sum = 0.0;
      int n = 0;
      for (const auto& c : p.cells) {
        const Vec2 x = sc.spat.spec.center_of(c);
        if (x.y < sc.obstacle.min_y || x.y > sc.obstacle.max_y) continue;
        sum += x.x;
        ++n;
      }
      ASSERT_GT(n, 0);
      const double mean = sum / n;
      if (d == Direction::Left) { EXPECT_LT(mean, 2.5) << alpha; }
      if (d == Direction::Right) { EXPECT_GT(mean, 2.5) << alpha; }
    }
  }
}

TEST(PlannerProperty, LowQuartileShareGrowsWithAlpha) {
  double prev = -1.0;
  for (double alpha : {0.5, 1.0, 3.0, 5.0}) {
    auto sc = side_case(Direction::Left, alpha);
    auto p = astar_plan(sc.spat, {{2.5, 0.3}, {2.5, 4.7}, 0.05});
    int in_band = 0, low = 0;
    for (const auto& c : p.cells) {
      const int v = sc.field.at(c);
      if (v == 0) continue;
      ++in_band;
      if (v <= 255 / 4) ++low;
    }
    ASSERT_GT(in_band, 0);
    const double share = static_cast<double>(low) / in_band;
    EXPECT_GE(share, prev) << "alpha " << alpha;
    prev = share;
  }
}

TEST(Inflate, LethalGrowsButKeepsRobotClear) {
  const GridSpec spec{0.05, 40, 40, {0, 0}};
  CostGrid g(spec, kFree);
  g.at({20, 20}) = kLethal;
  auto out = inflate_lethal(g, 0.1);
  EXPECT_EQ(out.at({22, 20}), kLethal);
  EXPECT_EQ(out.at({23, 20}), kFree);
  EXPECT_EQ(out.at({21, 21}), kLethal);
  auto kept = inflate_lethal(g, 0.1, nullptr, spec.center_of({22, 20}));
  EXPECT_EQ(kept.at({22, 20}), kFree);
  EXPECT_EQ(kept.at({20, 20}), kLethal);
}

TEST(SpeedLimit, Mapping) {
  const GridSpec spec{0.05, 3, 1, {0, 0}};
  KinematicGrid kin(spec);
  kin.cells[1] = {0, true};
  kin.cells[2] = {255, true};
  RobotKinematics k;
  EXPECT_DOUBLE_EQ(speed_limit_at(kin, {0, 0}, k), k.v_default);
  EXPECT_DOUBLE_EQ(speed_limit_at(kin, {1, 0}, k), k.v_min);
  EXPECT_DOUBLE_EQ(speed_limit_at(kin, {2, 0}, k), k.v_max);
  kin.cells[1] = {127, true};
  EXPECT_NEAR(speed_limit_at(kin, {1, 0}, k), 0.5 * (k.v_min + k.v_max), 0.01);
}

TEST(SpeedLimit, MonotoneInValue) {
  const GridSpec spec{0.05, 1, 1, {0, 0}};
  KinematicGrid kin(spec);
  RobotKinematics k;
  double prev = -1.0;
  for (int v = 0; v <= 255; ++v) {
    kin.cells[0] = {static_cast<std::uint8_t>(v), true};
    const double s = speed_limit_at(kin, {0, 0}, k);
    EXPECT_GE(s, prev);
    prev = s;
  }
}

Path straight_path(const GridSpec& spec, int i0, int i1, int j) {
  Path p;
  for (int i = i0; i <= i1; ++i) p.cells.push_back({i, j});
  p.length_m = (i1 - i0) * spec.resolution;
  return p;
}

TEST(Follow, StraightTwoMeters) {
  const GridSpec spec{0.05, 60, 3, {0, 0}};
  KinematicGrid kin(spec);
  RobotKinematics k;
  auto traj = follow_path(straight_path(spec, 0, 40, 1), kin, k);
  // 1 s to reach 0.5 m/s covers 0.25 m; the remaining 1.75 m takes 3.5 s.
  EXPECT_NEAR(traj.back().t, 4.5, 0.2 + 1e-9);
  EXPECT_NEAR(traj.back().pose.x, spec.center_of({40, 1}).x, 1e-9);
  for (const auto& p : traj) {
    EXPECT_GE(p.speed, 0.0);
    EXPECT_LE(p.speed, k.v_max);
  }
}

TEST(Follow, SlowBoxRespected) {
  const GridSpec spec{0.05, 80, 3, {0, 0}};
  KinematicGrid kin(spec);
  for (int i = 30; i <= 50; ++i)
    for (int j = 0; j < 3; ++j) kin.at({i, j}) = {0, true};
  RobotKinematics k;
  auto traj = follow_path(straight_path(spec, 0, 79, 1), kin, k);
  const double lo = spec.center_of({30, 0}).x - spec.resolution / 2;
  const double hi = spec.center_of({50, 0}).x + spec.resolution / 2;
  int inside = 0;
  for (const auto& p : traj) {
    if (p.pose.x >= lo && p.pose.x <= hi) {
      ++inside;
      EXPECT_LE(p.speed, k.v_min + k.accel * k.control_period + 1e-9);
    }
  }
  EXPECT_GT(inside, 0);
}

TEST(Follow, ZeroLengthPath) {
  const GridSpec spec{0.05, 5, 5, {0, 0}};
  KinematicGrid kin(spec);
  Path p;
  p.cells = {{2, 2}};
  auto traj = follow_path(p, kin, {});
  ASSERT_EQ(traj.size(), 1u);
  EXPECT_DOUBLE_EQ(traj[0].speed, 0.0);
  EXPECT_EQ(traj[0].pose.position(), spec.center_of({2, 2}));
}

TEST(Follow, TurnsInPlaceAtSharpCorners) {
  const GridSpec spec{0.05, 40, 40, {0, 0}};
  KinematicGrid kin(spec);
  Path p;
  for (int i = 0; i <= 10; ++i) p.cells.push_back({i, 0});
  for (int j = 1; j <= 10; ++j) p.cells.push_back({10, j});
  for (int i = 9; i >= 0; --i) p.cells.push_back({i, 10});
  auto traj = follow_path(p, kin, {});
  int stopped = 0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) stopped += traj[k].speed == 0.0;
  EXPECT_GT(stopped, 0);
  EXPECT_NEAR(traj.back().pose.x, spec.center_of({0, 10}).x, 1e-9);
}

TEST(PathJson, Points) {
  std::vector<Vec2> pts{{0, 1}, {2, 3}};
  EXPECT_EQ(path_to_json(pts).dump(), "[[0.0,1.0],[2.0,3.0]]");
}

}  // namespace
}  // namespace bcnav

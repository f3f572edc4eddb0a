#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "bcnav/costmap.hpp"
#include "bcnav/errors.hpp"

namespace bcnav {
namespace {

const GridSpec kDefaultGrid{};  // 0.05 m, 200 x 200, origin (-5, -5)

GridSpec small_grid(int w = 30, int h = 20) { return {0.05, w, h, {0.0, 0.0}}; }

// Box whose cells span columns [i0, i1] and rows [j0, j1] of small_grid.
BevBox cell_box(int i0, int j0, int i1, int j1) {
  return {i0 * 0.05 + 0.01, j0 * 0.05 + 0.01, i1 * 0.05 + 0.04, j1 * 0.05 + 0.04, 1, "obj"};
}

TEST(Grid, DefaultsAndIndexing) {
  EXPECT_EQ(kDefaultGrid.width, 200);
  EXPECT_EQ(kDefaultGrid.height, 200);
  EXPECT_DOUBLE_EQ(kDefaultGrid.resolution, 0.05);
  EXPECT_EQ(kDefaultGrid.cell_of({1.0, 0.0}), (CellIndex{120, 100}));
  EXPECT_EQ(kDefaultGrid.cell_at(kDefaultGrid.index({7, 9})), (CellIndex{7, 9}));
  EXPECT_THROW((GridSpec{0.0, 10, 10, {}}).validate(), InputError);
  EXPECT_THROW((GridSpec{0.1, 0, 10, {}}).validate(), InputError);
}

TEST(Geometric, NoObstaclesIsUniformFree) {
  auto g = build_geometric({}, kDefaultGrid);
  EXPECT_TRUE(std::all_of(g.cells.begin(), g.cells.end(), [](auto c) { return c == 100; }));
}

TEST(Geometric, HandProjection) {
  std::vector<ScanPoint> pts{{1.0, 0.0, 0.3, {}}};
  auto g = build_geometric(pts, kDefaultGrid);
  EXPECT_EQ(g.at({120, 100}), 255);
  EXPECT_EQ(std::count(g.cells.begin(), g.cells.end(), 255), 1);
}

TEST(Geometric, SameCellTwiceAndOutsideIgnored) {
  std::vector<ScanPoint> pts{{1.0, 0.0, 0.3, {}}, {1.01, 0.01, 0.3, {}}, {50.0, 0.0, 0.3, {}}};
  auto g = build_geometric(pts, kDefaultGrid);
  EXPECT_EQ(std::count(g.cells.begin(), g.cells.end(), 255), 1);
}

TEST(Infer, FreeOccupiedAndWeighted) {
  auto spec = small_grid();
  CostGrid geo(spec, 100);
  const auto b = cell_box(0, 0, 9, 0);  // 10 cells
  EXPECT_EQ(infer_traversability(geo, b, 150), Traversability::Traversable);
  CostGrid full(spec, 255);
  EXPECT_EQ(infer_traversability(full, b, 150), Traversability::NonTraversable);
  for (int i = 0; i < 4; ++i) geo.at({i, 0}) = 255;
  EXPECT_DOUBLE_EQ(mean_cost(geo, b), 162.0);
  EXPECT_EQ(infer_traversability(geo, b, 162), Traversability::Traversable);
  EXPECT_EQ(infer_traversability(geo, b, 161), Traversability::NonTraversable);
}

TEST(Infer, BoxOutsideGridIsInputError) {
  CostGrid geo(small_grid(), 100);
  EXPECT_THROW(infer_traversability(geo, BevBox{10, 10, 11, 11, 1, "x"}, 150), InputError);
}

TEST(Infer, ObservedCellsOnly) {
  auto spec = small_grid();
  CostGrid geo(spec, 100);
  geo.at({0, 0}) = 255;
  ObservationGrid seen(spec);
  seen.observed[spec.index({0, 0})] = 1;
  const auto b = cell_box(0, 0, 9, 0);
  EXPECT_EQ(infer_traversability(geo, b, 150), Traversability::Traversable);
  EXPECT_EQ(infer_traversability(geo, b, 150, &seen), Traversability::NonTraversable);
}

TEST(Semantic, Examples) {
  auto spec = small_grid();
  auto none = build_semantic({}, spec);
  EXPECT_TRUE(std::all_of(none.cells.begin(), none.cells.end(), [](auto c) { return c == 0; }));

  std::vector<std::pair<BevBox, Traversability>> one{{cell_box(2, 2, 4, 4), Traversability::Traversable}};
  auto g1 = build_semantic(one, spec);
  EXPECT_EQ(g1.at({3, 3}), 1);
  EXPECT_EQ(g1.at({5, 3}), 0);
  EXPECT_EQ(std::count(g1.cells.begin(), g1.cells.end(), 1), 9);

  std::vector<std::pair<BevBox, Traversability>> both{{cell_box(2, 2, 4, 4), Traversability::Traversable},
                                                      {cell_box(4, 4, 6, 6), Traversability::NonTraversable}};
  auto g2 = build_semantic(both, spec);
  EXPECT_EQ(g2.at({4, 4}), 2);
  EXPECT_EQ(g2.at({2, 2}), 1);
  std::reverse(both.begin(), both.end());
  EXPECT_EQ(build_semantic(both, spec), g2);
}

TEST(Interpolate, WorkedExamples) {
  const auto left = boundary_costs(Direction::Left, 0, 255);
  EXPECT_EQ(interpolate_directional(0, 0, 10, 20, left, 1.0), 0);
  EXPECT_EQ(interpolate_directional(20, 0, 10, 20, left, 1.0), 255);
  EXPECT_EQ(interpolate_directional(10, 0, 10, 20, left, 1.0), 127);
  EXPECT_EQ(interpolate_directional(5, 0, 10, 20, left, 1.0), 63);
  EXPECT_EQ(interpolate_directional(5, 0, 10, 20, left, 3.0), 15);
  const auto mid = boundary_costs(Direction::Middle, 0, 255);
  EXPECT_EQ(interpolate_directional(10, 0, 10, 20, mid, 3.0), 0);
  EXPECT_EQ(interpolate_directional(0, 0, 10, 20, mid, 3.0), 255);
  EXPECT_THROW(boundary_costs(Direction::Unset, 0, 255), InputError);
}

TEST(Interpolate, DegenerateSpans) {
  const auto left = boundary_costs(Direction::Left, 0, 255);
  EXPECT_EQ(interpolate_directional(4, 4, 4, 4, left, 3.0), 127);
  // c1 == c2: constant over the first segment.
  const std::array<double, 3> flat{50, 50, 200};
  for (int u = 0; u <= 10; ++u) EXPECT_EQ(interpolate_directional(u, 0, 10, 20, flat, 2.0), 50);
}

TEST(InterpolateProperty, MonotoneOnEachSegment) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> a(0.1, 8.0);
  std::uniform_int_distribution<int> cm(0, 120), cx(130, 255), span(1, 60);
  for (int trial = 0; trial < 400; ++trial) {
    const double alpha = a(rng);
    const int lo = cm(rng), hi = cx(rng), w = span(rng);
    for (Direction d : {Direction::Left, Direction::Right, Direction::Middle}) {
      const auto c = boundary_costs(d, lo, hi);
      const double u1 = 0, u3 = 2 * w, u2 = w;
      for (int seg = 0; seg < 2; ++seg) {
        const double from = c[seg], to = c[seg + 1];
        int prev = interpolate_directional(seg * w, u1, u2, u3, c, alpha);
        for (int u = seg * w + 1; u <= (seg + 1) * w; ++u) {
          const int v = interpolate_directional(u, u1, u2, u3, c, alpha);
          if (to >= from) { EXPECT_GE(v, prev); }
          if (to <= from) { EXPECT_LE(v, prev); }
          prev = v;
        }
      }
      EXPECT_EQ(interpolate_directional(u2, u1, u2, u3, c, alpha), static_cast<int>(std::floor(c[1])));
      EXPECT_EQ(interpolate_directional(u3, u1, u2, u3, c, alpha), static_cast<int>(std::floor(c[2])));
      EXPECT_EQ(interpolate_directional(u1, u1, u2, u3, c, alpha), static_cast<int>(std::floor(c[0])));
    }
  }
}

TEST(InterpolateProperty, LargerAlphaLowersRisingInterior) {
  // Floored values can tie, so the integer ordering is non-strict; the
  // unfloored ramp c1 + (c2 - c1) s^alpha is strictly lower for s in (0, 1).
  const auto left = boundary_costs(Direction::Left, 0, 255);
  const std::vector<double> alphas{0.5, 1.0, 3.0, 5.0};
  for (int u = 1; u < 40; ++u) {
    if (u == 20) continue;
    for (std::size_t k = 1; k < alphas.size(); ++k) {
      EXPECT_LE(interpolate_directional(u, 0, 20, 40, left, alphas[k]),
                interpolate_directional(u, 0, 20, 40, left, alphas[k - 1]));
    }
    const double s = (u < 20 ? u : u - 20) / 20.0;
    for (std::size_t k = 1; k < alphas.size(); ++k) EXPECT_LT(std::pow(s, alphas[k]), std::pow(s, alphas[k - 1]));
  }
}

TEST(Directional, LeftBoxColumns) {
  auto spec = small_grid(40, 10);
  DirectionalParams p;
  p.alpha = 1.0;
  auto g = build_directional(cell_box(0, 0, 20, 3), Direction::Left, Traversability::Unset, p, spec);
  EXPECT_EQ(g.at({0, 0}), 1);  // floor(0) clamped up
  EXPECT_EQ(g.at({5, 1}), 63);
  EXPECT_EQ(g.at({10, 2}), 127);
  EXPECT_EQ(g.at({20, 3}), 255);
  EXPECT_EQ(g.at({21, 0}), 0);
  EXPECT_EQ(g.at({5, 4}), 0);
  p.alpha = 3.0;
  EXPECT_EQ(build_directional(cell_box(0, 0, 20, 3), Direction::Left, Traversability::Unset, p, spec).at({5, 0}), 15);
}

TEST(Directional, MiddleAtMidpointIsClamped) {
  auto spec = small_grid(40, 10);
  auto g = build_directional(cell_box(0, 0, 20, 3), Direction::Middle, Traversability::Unset, {}, spec);
  EXPECT_EQ(g.at({10, 0}), 1);
  EXPECT_EQ(g.at({0, 0}), 255);
  EXPECT_EQ(g.at({20, 0}), 255);
}

TEST(Directional, ZeroWidthBoxIsConstantMid) {
  auto spec = small_grid(40, 10);
  auto g = build_directional(cell_box(7, 0, 7, 5), Direction::Left, Traversability::Unset, {}, spec);
  for (int j = 0; j <= 5; ++j) EXPECT_EQ(g.at({7, j}), 127);
}

TEST(Directional, NonTraversableInflatesByMargin) {
  auto spec = small_grid(40, 40);
  DirectionalParams p;
  p.margin_d = 0.25;  // five cells
  auto plain = build_directional(cell_box(15, 15, 20, 20), Direction::Left, Traversability::Traversable, p, spec);
  auto infl = build_directional(cell_box(15, 15, 20, 20), Direction::Left, Traversability::NonTraversable, p, spec);
  EXPECT_EQ(std::count_if(plain.cells.begin(), plain.cells.end(), [](auto c) { return c > 0; }), 36);
  EXPECT_EQ(std::count_if(infl.cells.begin(), infl.cells.end(), [](auto c) { return c > 0; }), 16 * 16);
  EXPECT_GT(infl.at({10, 10}), 0);
}

TEST(Directional, AxisFollowsHeading) {
  // Facing +y the right-hand side is +x; facing -x it is +y.
  EXPECT_EQ(lateral_axis_for(std::numbers::pi / 2), LateralAxis::PlusX);
  EXPECT_EQ(lateral_axis_for(std::numbers::pi), LateralAxis::PlusY);
  EXPECT_EQ(lateral_axis_for(0.0), LateralAxis::MinusY);
  EXPECT_EQ(lateral_axis_for(-std::numbers::pi / 2), LateralAxis::MinusX);

  auto spec = small_grid(40, 40);
  auto g = build_directional(cell_box(0, 0, 20, 20), Direction::Left, Traversability::Unset, {}, spec,
                             LateralAxis::PlusY);
  EXPECT_EQ(g.at({5, 0}), 1);
  EXPECT_EQ(g.at({5, 20}), 255);
  auto m = build_directional(cell_box(0, 0, 20, 20), Direction::Left, Traversability::Unset, {}, spec,
                             LateralAxis::MinusX);
  EXPECT_EQ(m.at({20, 5}), 1);
  EXPECT_EQ(m.at({0, 5}), 255);
}

TEST(DirectionalProperty, LeftComplementsRight) {
  // Boundary costs are swapped, so the two profiles sum to c_max before flooring.
  auto spec = small_grid(60, 4);
  for (double alpha : {1.0, 0.5, 3.0, 5.0}) {
    DirectionalParams p;
    p.alpha = alpha;
    for (int w : {2, 10, 20, 40}) {
      auto l = build_directional(cell_box(0, 0, w, 0), Direction::Left, Traversability::Unset, p, spec);
      auto r = build_directional(cell_box(0, 0, w, 0), Direction::Right, Traversability::Unset, p, spec);
      for (int i = 0; i <= w; ++i) {
        const int sum = l.at({i, 0}) + r.at({i, 0});
        EXPECT_GE(sum, 254) << "alpha " << alpha << " w " << w << " i " << i;
        EXPECT_LE(sum, 256) << "alpha " << alpha << " w " << w << " i " << i;
      }
    }
  }
}

TEST(Velocity, Examples) {
  auto spec = small_grid();
  std::vector<std::pair<BevBox, Velocity>> slow{{cell_box(1, 1, 3, 3), Velocity::Slow}};
  auto g = build_velocity(slow, 0, 255, spec);
  EXPECT_EQ(g.at({2, 2}), (KinCell{0, true}));
  EXPECT_EQ(g.at({5, 5}), (KinCell{0, false}));

  std::vector<std::pair<BevBox, Velocity>> fast{{cell_box(1, 1, 3, 3), Velocity::Fast}};
  EXPECT_EQ(build_velocity(fast, 0, 255, spec).at({2, 2}), (KinCell{255, true}));

  std::vector<std::pair<BevBox, Velocity>> normal{{cell_box(1, 1, 3, 3), Velocity::Normal}};
  EXPECT_EQ(build_velocity(normal, 0, 255, spec).at({2, 2}), (KinCell{127, true}));

  std::vector<std::pair<BevBox, Velocity>> both{{cell_box(1, 1, 3, 3), Velocity::Fast},
                                                {cell_box(3, 3, 5, 5), Velocity::Slow}};
  auto o = build_velocity(both, 0, 255, spec);
  EXPECT_EQ(o.at({3, 3}), (KinCell{0, true}));
  EXPECT_EQ(o.at({1, 1}), (KinCell{255, true}));
}

TEST(Fusion, TraversabilityExamples) {
  auto spec = small_grid(3, 1);
  CostGrid geo(spec), sem(spec);
  geo.cells = {100, 255, 100};
  sem.cells = {0, 1, 2};
  auto i = fuse_traversability(geo, sem);
  EXPECT_EQ(i.cells, (std::vector<std::uint8_t>{100, 100, 255}));
  EXPECT_THROW(fuse_traversability(geo, CostGrid(small_grid(4, 1))), InputError);
}

TEST(FusionProperty, BranchTableOnRandomGrids) {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> s(0, 2), g(0, 1);
  auto spec = small_grid(16, 16);
  for (int trial = 0; trial < 100; ++trial) {
    CostGrid geo(spec), sem(spec);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      geo.cells[k] = g(rng) ? 255 : 100;
      sem.cells[k] = static_cast<std::uint8_t>(s(rng));
    }
    auto out = fuse_traversability(geo, sem);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const int want = sem.cells[k] == 0 ? geo.cells[k] : (sem.cells[k] == 1 ? 100 : 255);
      ASSERT_EQ(out.cells[k], want);
    }
  }
}

TEST(Fusion, SpatialExamples) {
  auto spec = small_grid(3, 1);
  CostGrid i(spec), d(spec);
  i.cells = {255, 100, 100};
  d.cells = {5, 63, 0};
  EXPECT_EQ(fuse_spatial(i, d).cells, (std::vector<std::uint8_t>{255, 63, 100}));
}

TEST(Fusion, CombineDirectional) {
  auto spec = small_grid(3, 1);
  EXPECT_EQ(combine_directional({}, spec), CostGrid(spec, 0));
  CostGrid a(spec), b(spec);
  a.cells = {63, 0, 10};
  b.cells = {200, 7, 0};
  std::vector<CostGrid> one{a};
  EXPECT_EQ(combine_directional(one, spec), a);
  std::vector<CostGrid> two{a, b};
  EXPECT_EQ(combine_directional(two, spec).cells, (std::vector<std::uint8_t>{200, 7, 10}));
}

TEST(Builders, Deterministic) {
  auto spec = small_grid(40, 40);
  std::vector<ScanPoint> pts{{0.3, 0.4, 0.3, {}}, {1.2, 0.9, 0.3, {}}};
  EXPECT_EQ(build_geometric(pts, spec), build_geometric(pts, spec));
  const auto b = cell_box(3, 3, 17, 12);
  EXPECT_EQ(build_directional(b, Direction::Right, Traversability::NonTraversable, {}, spec),
            build_directional(b, Direction::Right, Traversability::NonTraversable, {}, spec));
}

TEST(GridIo, PgmRoundTrip) {
  auto spec = small_grid(7, 5);
  CostGrid g(spec);
  for (std::size_t k = 0; k < g.cells.size(); ++k) g.cells[k] = static_cast<std::uint8_t>(k * 7);
  auto path = std::filesystem::temp_directory_path() / "bcnav_grid_test.pgm";
  write_pgm(path, g);
  EXPECT_EQ(read_pgm(path, spec), g);
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  in >> magic;
  EXPECT_EQ(magic, "P5");
  std::filesystem::remove(path);

  auto meta = grid_metadata(spec);
  EXPECT_EQ(meta["width"], 7);
  EXPECT_EQ(grid_spec_from_json(meta), spec);
}

TEST(GridIo, KinematicUnsetWrittenAsZero) {
  auto spec = small_grid(2, 1);
  KinematicGrid k(spec);
  k.cells[0] = {200, true};
  k.cells[1] = {90, false};
  EXPECT_EQ(kin_mask(k), (std::vector<std::uint8_t>{255, 0}));
  auto path = std::filesystem::temp_directory_path() / "bcnav_kin_test.pgm";
  write_pgm(path, k);
  EXPECT_EQ(read_pgm(path, spec).cells, (std::vector<std::uint8_t>{200, 0}));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace bcnav

#include <gtest/gtest.h>

#include <numbers>

#include "bcnav/geometry.hpp"

namespace bcnav {
namespace {

const Polygon kSquare{{0, 0}, {2, 0}, {2, 2}, {0, 2}};

TEST(Geometry, WrapAngle) {
  EXPECT_NEAR(std::abs(wrap_angle(3 * std::numbers::pi)), std::numbers::pi, 1e-12);
  EXPECT_NEAR(wrap_angle(std::numbers::pi), -std::numbers::pi, 1e-12);
  EXPECT_NEAR(wrap_angle(-0.5), -0.5, 1e-12);
  EXPECT_NEAR(wrap_angle(2 * std::numbers::pi + 0.25), 0.25, 1e-12);
}

TEST(Geometry, SnapToAxis) {
  EXPECT_DOUBLE_EQ(snap_to_axis(0.3), 0.0);
  EXPECT_NEAR(snap_to_axis(1.4), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(std::abs(snap_to_axis(3.0)), std::numbers::pi, 1e-12);
}

TEST(Geometry, RightOfHeading) {
  auto r = right_of(std::numbers::pi / 2);  // facing +y
  EXPECT_NEAR(r.x, 1.0, 1e-12);
  EXPECT_NEAR(r.y, 0.0, 1e-12);
}

TEST(Geometry, FrameRoundTrip) {
  Pose2 f{1.0, -2.0, 0.7};
  Vec2 p{0.3, 4.1};
  auto back = to_local(f, to_world(f, p));
  EXPECT_NEAR(back.x, p.x, 1e-12);
  EXPECT_NEAR(back.y, p.y, 1e-12);
}

TEST(Geometry, PointInPolygon) {
  EXPECT_TRUE(point_in_polygon(kSquare, {1, 1}));
  EXPECT_FALSE(point_in_polygon(kSquare, {3, 1}));
}

TEST(Geometry, SimplePolygon) {
  EXPECT_TRUE(is_simple_polygon(kSquare));
  Polygon bowtie{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  EXPECT_FALSE(is_simple_polygon(bowtie));
  Polygon two{{0, 0}, {1, 1}};
  EXPECT_FALSE(is_simple_polygon(two));
}

TEST(Geometry, RaySegment) {
  auto t = ray_segment_intersection({0, 0}, {1, 0}, {2, -1}, {2, 1});
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 2.0, 1e-12);
  EXPECT_FALSE(ray_segment_intersection({0, 0}, {-1, 0}, {2, -1}, {2, 1}));
}

TEST(Geometry, RayPolygonCrossingsSorted) {
  auto xs = ray_polygon_crossings({-1, 1}, {1, 0}, kSquare);
  ASSERT_EQ(xs.size(), 2u);
  EXPECT_NEAR(xs[0], 1.0, 1e-12);
  EXPECT_NEAR(xs[1], 3.0, 1e-12);
}

TEST(Geometry, ClipSegment) {
  auto iv = clip_segment({-1, 1}, {3, 1}, Rect{0, 0, 2, 2});
  ASSERT_TRUE(iv);
  EXPECT_NEAR(iv->first, 0.25, 1e-12);
  EXPECT_NEAR(iv->second, 0.75, 1e-12);
  EXPECT_FALSE(clip_segment({-1, 5}, {3, 5}, Rect{0, 0, 2, 2}));
}

TEST(Geometry, LengthInsidePolygon) {
  EXPECT_NEAR(length_inside_polygon({-1, 1}, {3, 1}, kSquare), 2.0, 1e-12);
  EXPECT_NEAR(length_inside_polygon({-1, 5}, {3, 5}, kSquare), 0.0, 1e-12);
}

TEST(Geometry, DistanceToBoundary) {
  EXPECT_NEAR(distance_to_boundary(kSquare, {1, 0.5}), 0.5, 1e-12);
  EXPECT_NEAR(distance_to_segment({0, 1}, {-1, 0}, {1, 0}), 1.0, 1e-12);
}

TEST(Geometry, BoundsAndLength) {
  std::vector<Vec2> pts{{1, 1}, {3, 2}, {0, 5}};
  EXPECT_EQ(bounds_of(pts), (Rect{0, 1, 3, 5}));
  std::vector<Vec2> line{{0, 0}, {3, 4}, {3, 5}};
  EXPECT_NEAR(polyline_length(line), 6.0, 1e-12);
}

}  // namespace
}  // namespace bcnav

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace bcnav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Planar pose; heading in radians, counter-clockwise from +x.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  constexpr Vec2 position() const { return {x, y}; }
  constexpr bool operator==(const Pose2&) const = default;
};

/// Axis-aligned rectangle in meters.
struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  constexpr double width() const { return max_x - min_x; }
  constexpr double height() const { return max_y - min_y; }
  constexpr Vec2 center() const { return {(min_x + max_x) / 2.0, (min_y + max_y) / 2.0}; }
  constexpr bool contains(Vec2 p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  constexpr Rect inflated(double m) const { return {min_x - m, min_y - m, max_x + m, max_y + m}; }
  constexpr bool operator==(const Rect&) const = default;
};

using Polygon = std::vector<Vec2>;

double wrap_angle(double a);

/// Heading rounded to the nearest multiple of pi/2.
double snap_to_axis(double heading);

/// Unit vector pointing to the right-hand side of `heading`.
inline Vec2 right_of(double heading) { return {std::sin(heading), -std::cos(heading)}; }

Vec2 to_world(const Pose2& frame, Vec2 local);
Vec2 to_local(const Pose2& frame, Vec2 world);

Rect bounds_of(std::span<const Vec2> pts);

bool point_in_polygon(std::span<const Vec2> poly, Vec2 p);

/// True when no two non-adjacent edges intersect and there are >= 3 vertices.
bool is_simple_polygon(std::span<const Vec2> poly);

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);
double distance_to_boundary(std::span<const Vec2> poly, Vec2 p);

/// Parameter t >= 0 along the ray origin + t*dir where it meets segment [a,b].
std::optional<double> ray_segment_intersection(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b);

/// Every boundary crossing of the ray with the polygon, ascending.
std::vector<double> ray_polygon_crossings(Vec2 origin, Vec2 dir, std::span<const Vec2> poly);

/// Liang-Barsky clip of segment a->b against r; returns the parameter interval
/// [t0, t1] within [0, 1] that lies inside, if any.
std::optional<std::pair<double, double>> clip_segment(Vec2 a, Vec2 b, const Rect& r);

/// Length of the part of segment a->b that lies inside the polygon.
double length_inside_polygon(Vec2 a, Vec2 b, std::span<const Vec2> poly);

double polyline_length(std::span<const Vec2> pts);

}  // namespace bcnav

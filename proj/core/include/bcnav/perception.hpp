#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcnav/geometry.hpp"

namespace bcnav {

enum class HeightClass { Low, RobotHeight, Tall };

std::string_view to_string(HeightClass h);
std::optional<HeightClass> height_class_from_string(std::string_view s);

struct SemanticObject {
  int id = 0;
  std::string label;
  Polygon footprint;  // world frame, meters
  HeightClass height_class = HeightClass::RobotHeight;
  bool physically_solid = true;
};

/// Ground-truth scene. Objects with height_class Low never block rays; every
/// other object and every static obstacle does, whether or not it is solid.
struct WorldModel {
  Rect bounds;
  std::vector<SemanticObject> objects;
  std::vector<Polygon> static_obstacles;

  /// Throws InputError when an invariant does not hold.
  void validate() const;
  const SemanticObject* find(int id) const;
};

WorldModel world_from_json(const nlohmann::json& j, const std::string& pointer = "");
nlohmann::json to_json(const WorldModel& w);

/// Robot-frame LiDAR return: x forward, y left, z up.
struct ScanPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::optional<int> hit_object;  // label-oracle channel; empty for static obstacles

  bool operator==(const ScanPoint&) const = default;
};

struct SensorConfig {
  int n_rays = 720;
  double max_range = 10.0;
  double noise_sigma = 0.0;   // range noise, meters
  double dropout_rate = 0.0;  // probability a return is dropped
  std::uint64_t seed = 0;
  double obstacle_z = 0.3;    // height of returns on blocking surfaces
  double ground_z = 0.0;      // height of returns on Low objects
  double overhead_z = 1.5;    // extra return emitted on Tall objects
};

/// One ray per bearing, bearings evenly spaced over a full turn starting at -pi.
/// Each ray returns its first blocking hit, plus a ground return at every
/// boundary crossing of a Low object in front of that hit. Throws InputError
/// when the pose lies outside the world bounds.
std::vector<ScanPoint> simulate_scan(const WorldModel& world, const Pose2& robot_pose, const SensorConfig& cfg);

void write_scan_csv(const std::filesystem::path& path, std::span<const ScanPoint> scan);

/// Per-point semantic label source standing in for an open-vocabulary
/// segmenter. With probability `mislabel_rate` a point reports the next label
/// (cyclically) in the sorted label universe, which includes "" for
/// background returns.
class LabelOracle {
 public:
  LabelOracle(const WorldModel& world, double mislabel_rate, std::uint64_t seed);

  std::vector<std::string> observe(std::span<const ScanPoint> scan) const;
  const std::vector<std::string>& universe() const { return universe_; }
  /// Smallest object id carrying `label`, or -1.
  int object_id_for(std::string_view label) const;

 private:
  std::map<int, std::string> labels_;
  std::vector<std::string> universe_;
  double mislabel_rate_;
  std::uint64_t seed_;
};

/// Exact match, or the requested label is a plural of the observed one.
bool label_matches(std::string_view requested, std::string_view observed);

struct ObjectPointSet {
  int object_id = -1;
  std::string label;
  std::vector<ScanPoint> points;
  double frame_time = 0.0;
  Pose2 sensor_pose;  // pose of the frame the points are expressed in
};

struct BevBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
  int object_id = -1;
  std::string label;

  Rect rect() const { return {min_x, min_y, max_x, max_y}; }
  BevBox inflated(double margin) const {
    return {min_x - margin, min_y - margin, max_x + margin, max_y + margin, object_id, label};
  }
  bool operator==(const BevBox&) const = default;
};

ObjectPointSet ground_object(std::span<const ScanPoint> scan, std::string_view label, const LabelOracle& oracle);

/// Cluster labels (-1 = noise). Neighbourhoods are closed discs of radius eps
/// and include the point itself.
std::vector<int> dbscan_labels(std::span<const Vec2> pts, double eps, int min_pts);

/// Union of all DBSCAN clusters over (x, y). Throws InputError unless eps > 0
/// and min_pts >= 1.
ObjectPointSet dbscan_filter(const ObjectPointSet& points, double eps, int min_pts);

/// Union of the window's point sets expressed in `current_pose`'s frame, with
/// points closer than `dedup_radius` merged. Output does not depend on the
/// order of `history`. Throws InputError on an empty window or mixed ids.
ObjectPointSet aggregate_window(std::span<const ObjectPointSet> history, const Pose2& current_pose,
                                double dedup_radius);

/// Throws InputError on an empty set.
BevBox bev_bbox(const ObjectPointSet& points);

/// Points with z strictly inside (z_min, h_max); z <= z_min is the ground band.
std::vector<ScanPoint> extract_obstacle_points(std::span<const ScanPoint> scan, double z_min, double h_max);

/// Rolling per-label history of refined frames.
class ObjectTracker {
 public:
  explicit ObjectTracker(std::size_t window) : window_(window == 0 ? 1 : window) {}

  void observe(const std::string& label, ObjectPointSet frame);
  /// Aggregate over the stored window; nullopt when nothing was seen.
  std::optional<ObjectPointSet> aggregate(const std::string& label, const Pose2& frame, double dedup_radius) const;
  void clear() { history_.clear(); }

 private:
  std::size_t window_;
  std::map<std::string, std::deque<ObjectPointSet>> history_;
};

}  // namespace bcnav

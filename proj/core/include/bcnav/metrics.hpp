#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcnav/constraints.hpp"
#include "bcnav/perception.hpp"
#include "bcnav/planner.hpp"

namespace bcnav {

/// Where one field of one constraint is judged, for one object instance.
struct ActivationRegion {
  std::string label;
  int object_id = -1;
  ConstraintField field = ConstraintField::Direction;
  ActiveConstraint constraint;
  Rect region;      // inflated box
  Rect object_box;  // uninflated AABB; centroid and lateral width for the side predicate
  Polygon footprint;
  double active_from = 0.0;  // segments starting in [active_from, active_until) are judged
  double active_until = std::numeric_limits<double>::infinity();

  bool operator==(const ActivationRegion&) const = default;
};

struct ConstraintEvent {
  double t = 0.0;
  std::string text;
  Scope scope = Scope::Offline;
  std::vector<ConstraintTuple> tuples;
  std::vector<std::string> diagnostics;
};

struct RunRecord {
  std::vector<TrajectoryPoint> trajectory;
  Vec2 goal;
  double goal_tolerance = 0.2;
  bool reached = false;
  std::string failure_reason;
  double shortest_feasible_length = 0.0;
  ConstraintSet constraints;
  WorldModel world;
  std::vector<ActivationRegion> activation_regions;
  std::vector<ConstraintEvent> events;
  RobotKinematics kinematics;
  double speed_tolerance = 0.05;
  double approach_lookback = 1.0;  // m of travel behind the entry point that defines the approach heading
  std::uint64_t seed = 0;
};

struct RegionStats {
  double in_length = 0.0;
  double compliant_length = 0.0;
  double mean_speed = 0.0;  // length-weighted over in-region travel
  double max_speed = 0.0;
};

/// Length of trajectory travel inside `region` and how much of it satisfies
/// the region's predicate. A segment is travelled at the speed recorded at
/// its end point. Side is judged from the approach heading at entry (over the
/// last `approach_lookback` meters of travel), snapped to the nearest grid
/// axis and held until the robot leaves the region.
RegionStats region_stats(const RunRecord& run, const ActivationRegion& region);

/// Compliant in-region length over total in-region length; 1 with no in-region travel.
double bfa(const RunRecord& run);
bool evaluate_success(const RunRecord& run);
double executed_length(const RunRecord& run);
double spl(std::span<const RunRecord> runs);
double sr(std::span<const RunRecord> runs);
/// Throws InputError when either sequence is empty.
double discrete_frechet(std::span<const Vec2> a, std::span<const Vec2> b);
std::vector<Vec2> trajectory_xy(const RunRecord& run);

struct RunMetrics {
  std::string name;
  bool success = false;
  bool reached = false;
  std::string failure_reason;
  double executed_length = 0.0;
  double shortest_length = 0.0;
  double spl_term = 0.0;
  double bfa = 1.0;
  std::optional<double> fd;
};

struct MetricsSummary {
  double sr = 0.0;
  double spl = 0.0;
  std::optional<double> fd;  // mean over runs with a reference
  double bfa = 1.0;          // mean over runs
  std::vector<RunMetrics> per_run;
};

RunMetrics run_metrics(const RunRecord& run, const std::string& name = "",
                       std::optional<std::span<const Vec2>> reference = std::nullopt);
MetricsSummary summarize(std::span<const RunMetrics> runs);
nlohmann::json to_json(const MetricsSummary& m);
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& label, const MetricsSummary& m);

}  // namespace bcnav

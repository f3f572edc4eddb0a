#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcnav/constraints.hpp"
#include "bcnav/costmap.hpp"
#include "bcnav/metrics.hpp"
#include "bcnav/perception.hpp"
#include "bcnav/planner.hpp"

namespace bcnav {

struct NavConfig {
  GridSpec grid;
  DirectionalParams directional;
  double tau_sem = 150.0;
  double velocity_margin = 1.0;  // velocity boxes reach this far beyond the object
  SensorConfig sensor;
  double mislabel_rate = 0.0;
  double z_min = 0.05;
  double h_max = 0.8;
  double dbscan_eps = 0.3;
  int dbscan_min_pts = 3;
  int window = 5;
  double dedup_radius = 0.05;
  PlannerParams planner;
  RobotKinematics kinematics;
  double timeout = 120.0;
  double speed_tolerance = 0.05;
  double snapshot_interval = 0.0;  // seconds between exported layer snapshots; 0 = start and end only

  void validate() const;
};

nlohmann::json to_json(const NavConfig& c);

struct LayerSet {
  CostGrid geo;
  CostGrid sem;
  CostGrid dir;
  CostGrid traversability;  // geo corrected by sem
  CostGrid spat;
  CostGrid plan;  // spat after footprint inflation; what A* sees
  KinematicGrid kin;
};

struct GroundedInstance {
  std::string key;  // label#object
  std::string label;
  int object_id = -1;
  BevBox box;  // world frame
  Traversability traversability = Traversability::Unset;
  bool inferred = false;
  LateralAxis axis = LateralAxis::PlusX;
};

struct CycleResult {
  double t = 0.0;
  LayerSet layers;
  std::vector<GroundedInstance> instances;
  bool replanned = false;
  std::string replan_reason;
  std::optional<std::string> failure;
  TrajectoryPoint next;  // pose after this cycle's motion
};

/// Closed-loop state for one run: perception history, frozen lateral axes,
/// the current plan and the follower.
class ControlLoop {
 public:
  ControlLoop(WorldModel world, Pose2 start, Vec2 goal, NavConfig cfg, std::uint64_t seed);

  /// One period at sim time t: scan, ground, build and fuse layers, replan if
  /// needed, then advance the follower to t + control_period.
  CycleResult cycle(const ConstraintSet& constraints, double t);

  const Pose2& pose() const { return follower_.pose(); }
  double speed() const { return follower_.speed(); }
  const Path& path() const { return path_; }
  std::vector<Vec2> remaining_path() const;
  const NavConfig& config() const { return cfg_; }
  const WorldModel& world() const { return world_; }

 private:
  std::vector<GroundedInstance> ground_all(const ConstraintSet& constraints, std::span<const ScanPoint> world_pts,
                                           const ObservationGrid& seen, const CostGrid& geo);
  std::optional<std::string> replan_reason(const ConstraintSet& constraints, const CostGrid& plan);

  WorldModel world_;
  Vec2 goal_;
  NavConfig cfg_;
  std::uint64_t seed_;
  std::uint64_t cycle_index_ = 0;
  PathFollower follower_;
  ObjectTracker tracker_;
  std::map<std::string, std::set<std::string>> keys_by_label_;
  std::map<std::string, LateralAxis> axes_;
  Path path_;
  std::vector<double> plan_cum_;  // cumulative edge cost along path_ at plan time
  std::size_t progress_ = 0;
  std::optional<ConstraintSet> planned_for_;
};

/// Regions where each active field is judged, built from the ground-truth
/// boxes of every object whose label matches.
std::vector<ActivationRegion> activation_regions(const WorldModel& world, const ConstraintSet& constraints,
                                                 const NavConfig& cfg, double active_from = 0.0);

/// Ground-truth occupancy: static obstacles and solid object footprints.
CostGrid ground_truth_grid(const WorldModel& world, const GridSpec& spec);

/// Shortest feasible length on the inflated ground-truth grid; 0 when disconnected.
double shortest_feasible_length(const WorldModel& world, Vec2 start, Vec2 goal, const NavConfig& cfg);

}  // namespace bcnav

#pragma once

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcnav/costmap.hpp"
#include "bcnav/geometry.hpp"

namespace bcnav {

struct PlannerParams {
  double lambda = 1.0;  // heuristic weight; 1 keeps A* optimal
  double replan_ratio = 1.2;
  int connectivity = 8;  // 4 or 8
  bool corner_cutting = false;
  bool footprint_inflation = true;

  void validate() const;
};

struct PlanRequest {
  Vec2 start;
  Vec2 goal;
  double goal_tolerance = 0.2;
};

struct Path {
  std::vector<CellIndex> cells;
  double length_m = 0.0;
  double cost = 0.0;  // accumulated edge cost

  bool empty() const { return cells.empty(); }
  std::vector<Vec2> points(const GridSpec& spec) const;
  bool operator==(const Path&) const = default;
};

/// Cost of stepping into `to` from an adjacent cell: step length in meters
/// times cost / 100, so a free cell costs exactly its metric length.
double edge_cost(const GridSpec& spec, CellIndex from, CellIndex to, std::uint8_t cost);

/// A* from the start cell to the goal cell. Cells of cost 255 are impassable.
/// Ties on f are broken by h, then by row-major index. Throws InputError when
/// start or goal is off-grid or lethal, NoPathError when they are disconnected.
Path astar_plan(const CostGrid& spat, const PlanRequest& req, const PlannerParams& params = {});

/// Accumulated edge cost of a cell sequence under `spat`; +inf if any step is
/// not a legal move or enters a lethal cell.
double path_cost(const CostGrid& spat, std::span<const CellIndex> cells, const PlannerParams& params = {});

/// Marks cells within `radius` of a lethal source cell as lethal. Sources are
/// the 255 cells of `sources` (or of `grid` when null). Cells within `radius`
/// of `keep_clear` keep their value unless they are sources themselves.
CostGrid inflate_lethal(const CostGrid& grid, double radius, const CostGrid* sources = nullptr,
                        std::optional<Vec2> keep_clear = std::nullopt);

struct RobotKinematics {
  double v_min = 0.1;
  double v_default = 0.5;
  double v_max = 1.0;
  double accel = 0.5;          // m/s^2
  double radius = 0.25;        // m
  double control_period = 0.2; // s
  double turn_rate = 1.5;      // rad/s while turning in place
  double turn_threshold = 1.05;  // rad; sharper corners are taken in place

  void validate() const;
};

struct TrajectoryPoint {
  double t = 0.0;
  Pose2 pose;
  double speed = 0.0;
  bool operator==(const TrajectoryPoint&) const = default;
};

/// v_default on unset cells, else v_min + value/255 * (v_max - v_min).
double speed_limit_at(const KinematicGrid& kin, CellIndex cell, const RobotKinematics& k);

/// Waypoint tracker that advances one control period per step.
class PathFollower {
 public:
  PathFollower(const RobotKinematics& k, Pose2 pose, double speed = 0.0) : k_(k), pose_(pose), speed_(speed) {}

  /// Replaces the tracked polyline; its first vertex is taken to be the current position.
  void set_path(std::vector<Vec2> points);
  /// Advance by one control period.
  TrajectoryPoint step(const KinematicGrid& kin, double t_next);
  bool finished() const { return next_ >= path_.size(); }
  const Pose2& pose() const { return pose_; }
  double speed() const { return speed_; }
  void stop() { speed_ = 0.0; }
  std::span<const Vec2> remaining() const;

 private:
  double lookahead_limit(const KinematicGrid& kin, double distance) const;

  RobotKinematics k_;
  Pose2 pose_;
  double speed_;
  std::vector<Vec2> path_;
  std::size_t next_ = 0;  // index of the next vertex to reach
};

/// Open-loop execution of a whole path from rest, starting at t = 0 with the
/// robot on the first cell center facing the first segment.
std::vector<TrajectoryPoint> follow_path(const Path& path, const KinematicGrid& kin, const RobotKinematics& k);

nlohmann::json path_to_json(std::span<const Vec2> points);

}  // namespace bcnav

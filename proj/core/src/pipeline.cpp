#include "bcnav/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcnav/errors.hpp"
#include "bcnav/rng.hpp"

namespace bcnav {

void NavConfig::validate() const {
  grid.validate();
  directional.validate();
  if (!(tau_sem > 100.0 && tau_sem < 255.0)) throw InputError("tau must lie strictly between 100 and 255");
  if (!(velocity_margin >= 0.0)) throw InputError("velocity_margin must be non-negative");
  if (sensor.n_rays <= 0 || !(sensor.max_range > 0.0)) throw InputError("sensor needs n_rays > 0 and max_range > 0");
  if (!(sensor.noise_sigma >= 0.0)) throw InputError("noise_sigma must be non-negative");
  if (!(sensor.dropout_rate >= 0.0 && sensor.dropout_rate <= 1.0)) throw InputError("dropout_rate must lie in [0, 1]");
  if (!(mislabel_rate >= 0.0 && mislabel_rate <= 1.0)) throw InputError("mislabel_rate must lie in [0, 1]");
  if (!(z_min < h_max)) throw InputError("z_min must be below h_max");
  if (!(dbscan_eps > 0.0) || dbscan_min_pts < 1) throw InputError("dbscan needs eps > 0 and min_pts >= 1");
  if (window < 1) throw InputError("window must be at least 1");
  if (!(dedup_radius >= 0.0)) throw InputError("dedup_radius must be non-negative");
  planner.validate();
  kinematics.validate();
  if (!(timeout > 0.0)) throw InputError("timeout must be positive");
  if (!(speed_tolerance >= 0.0)) throw InputError("speed_tolerance must be non-negative");
  if (!(snapshot_interval >= 0.0)) throw InputError("snapshot_interval must be non-negative");
}

ControlLoop::ControlLoop(WorldModel world, Pose2 start, Vec2 goal, NavConfig cfg, std::uint64_t seed)
    : world_(std::move(world)),
      goal_(goal),
      cfg_(std::move(cfg)),
      seed_(seed),
      follower_(cfg_.kinematics, start),
      tracker_(static_cast<std::size_t>(cfg_.window)) {
  cfg_.validate();
  world_.validate();
}

std::vector<Vec2> ControlLoop::remaining_path() const {
  auto r = follower_.remaining();
  std::vector<Vec2> out{follower_.pose().position()};
  out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<GroundedInstance> ControlLoop::ground_all(const ConstraintSet& constraints,
                                                      std::span<const ScanPoint> world_pts,
                                                      const ObservationGrid& seen, const CostGrid& geo) {
  std::vector<GroundedInstance> out;
  const LabelOracle oracle(world_, cfg_.mislabel_rate, mix_seed(seed_, 2 * cycle_index_ + 1));
  for (const auto& label : constraints.labels()) {
    const ObjectPointSet grounded = ground_object(world_pts, label, oracle);
    // The oracle channel separates instances the way per-instance masks would.
    std::map<int, std::vector<ScanPoint>> groups;
    for (const auto& p : grounded.points) groups[p.hit_object.value_or(-1)].push_back(p);
    auto& keys = keys_by_label_[label];
    for (const auto& [id, pts] : groups) keys.insert(label + "#" + std::to_string(id));

    const ActiveConstraint ac = constraints.active(label);
    for (const auto& key : keys) {
      const int id = std::stoi(key.substr(key.rfind('#') + 1));
      ObjectPointSet frame;
      frame.object_id = id;
      frame.label = label;
      frame.frame_time = static_cast<double>(cycle_index_) * cfg_.kinematics.control_period;
      if (auto it = groups.find(id); it != groups.end()) frame.points = it->second;
      tracker_.observe(key, dbscan_filter(frame, cfg_.dbscan_eps, cfg_.dbscan_min_pts));

      const auto agg = tracker_.aggregate(key, Pose2{}, cfg_.dedup_radius);
      if (!agg) continue;
      GroundedInstance inst;
      inst.key = key;
      inst.label = label;
      inst.object_id = id;
      inst.box = bev_bbox(*agg);
      if (!box_cells(cfg_.grid, inst.box.rect())) continue;
      if (!axes_.contains(key)) axes_[key] = lateral_axis_for(follower_.pose().heading);
      inst.axis = axes_[key];
      if (ac.traversability != Traversability::Unset) {
        inst.traversability = ac.traversability;
      } else {
        inst.traversability = infer_traversability(geo, inst.box, cfg_.tau_sem, &seen);
        inst.inferred = true;
      }
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::optional<std::string> ControlLoop::replan_reason(const ConstraintSet& constraints, const CostGrid& plan) {
  if (path_.empty()) return "initial plan";
  if (!planned_for_ || *planned_for_ != constraints) return "constraints changed";
  const std::span<const CellIndex> rest = std::span<const CellIndex>(path_.cells).subspan(progress_);
  const double now = path_cost(plan, rest, cfg_.planner);
  if (!std::isfinite(now)) return "path blocked";
  const double then = plan_cum_.back() - plan_cum_[progress_];
  if (then > 0.0 && now > cfg_.planner.replan_ratio * then) return "cost ratio exceeded";
  return std::nullopt;
}

CycleResult ControlLoop::cycle(const ConstraintSet& constraints, double t) {
  CycleResult r;
  r.t = t;
  const Pose2 pose = follower_.pose();
  const double dt = cfg_.kinematics.control_period;
  const GridSpec& spec = cfg_.grid;

  SensorConfig sc = cfg_.sensor;
  sc.seed = mix_seed(seed_, 2 * cycle_index_);
  const auto scan = simulate_scan(world_, pose, sc);
  std::vector<ScanPoint> world_pts;
  std::vector<Vec2> returns;
  world_pts.reserve(scan.size());
  returns.reserve(scan.size());
  for (const auto& p : scan) {
    const Vec2 w = to_world(pose, {p.x, p.y});
    world_pts.push_back({w.x, w.y, p.z, p.hit_object});
    returns.push_back(w);
  }

  LayerSet& L = r.layers;
  L.geo = build_geometric(extract_obstacle_points(world_pts, cfg_.z_min, cfg_.h_max), spec);
  const ObservationGrid seen = build_observation(spec, pose.position(), returns);
  r.instances = ground_all(constraints, world_pts, seen, L.geo);

  std::vector<std::pair<BevBox, Traversability>> sem_boxes;
  std::vector<CostGrid> dir_layers;
  std::vector<std::pair<BevBox, Velocity>> vel_boxes;
  for (const auto& inst : r.instances) {
    const ActiveConstraint ac = constraints.active(inst.label);
    // An inferred "traversable" never overrides what the LiDAR sees.
    if (!inst.inferred || inst.traversability == Traversability::NonTraversable)
      sem_boxes.emplace_back(inst.box, inst.traversability);
    if (ac.direction != Direction::Unset)
      dir_layers.push_back(build_directional(inst.box, ac.direction, inst.traversability, cfg_.directional, spec, inst.axis));
    if (ac.velocity != Velocity::Unset) vel_boxes.emplace_back(inst.box.inflated(cfg_.velocity_margin), ac.velocity);
  }
  L.sem = build_semantic(sem_boxes, spec);
  L.dir = combine_directional(dir_layers, spec);
  L.kin = build_velocity(vel_boxes, cfg_.directional.c_min, cfg_.directional.c_max, spec);
  L.traversability = fuse_traversability(L.geo, L.sem);
  L.spat = fuse_spatial(L.traversability, L.dir);
  L.plan = cfg_.planner.footprint_inflation
               ? inflate_lethal(L.spat, cfg_.kinematics.radius, &L.traversability, pose.position())
               : L.spat;
  const CellIndex here = spec.cell_of(pose.position());
  if (spec.contains(here) && L.plan.at(here) == kLethal) L.plan.at(here) = kLethal - 1;

  if (auto reason = replan_reason(constraints, L.plan)) {
    try {
      path_ = astar_plan(L.plan, {pose.position(), goal_, 0.0}, cfg_.planner);
      plan_cum_.assign(1, 0.0);
      for (std::size_t k = 1; k < path_.cells.size(); ++k)
        plan_cum_.push_back(plan_cum_.back() +
                            edge_cost(spec, path_.cells[k - 1], path_.cells[k], L.plan.at(path_.cells[k])));
      progress_ = 0;
      planned_for_ = constraints;
      follower_.set_path(path_.points(spec));
      r.replanned = true;
      r.replan_reason = *reason;
    } catch (const NoPathError& e) {
      r.failure = std::string("no path: ") + e.what();
    } catch (const InputError& e) {
      r.failure = std::string("no path: ") + e.what();
    }
  }
  ++cycle_index_;

  if (r.failure) {
    follower_.stop();
    path_ = {};
    r.next = {t + dt, follower_.pose(), 0.0};
    return r;
  }
  r.next = follower_.step(L.kin, t + dt);

  const Vec2 now = follower_.pose().position();
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = progress_;
  for (std::size_t k = progress_; k < path_.cells.size(); ++k) {
    const double d = distance(spec.center_of(path_.cells[k]), now);
    if (d < best) {
      best = d;
      best_k = k;
    }
  }
  progress_ = best_k;
  return r;
}

CostGrid ground_truth_grid(const WorldModel& world, const GridSpec& spec) {
  CostGrid g(spec, kFree);
  std::vector<const Polygon*> polys;
  for (const auto& p : world.static_obstacles) polys.push_back(&p);
  for (const auto& o : world.objects) {
    if (o.physically_solid) polys.push_back(&o.footprint);
  }
  for (const Polygon* poly : polys) {
    const auto range = box_cells(spec, bounds_of(*poly));
    if (!range) continue;
    for (int j = range->j0; j <= range->j1; ++j) {
      for (int i = range->i0; i <= range->i1; ++i) {
        if (point_in_polygon(*poly, spec.center_of({i, j}))) g.at({i, j}) = kLethal;
      }
    }
    // Thin walls may miss every cell center; mark the cells their edges pass through.
    for (std::size_t k = 0; k < poly->size(); ++k) {
      const Vec2 a = (*poly)[k];
      const Vec2 b = (*poly)[(k + 1) % poly->size()];
      const int n = static_cast<int>(std::ceil(distance(a, b) / (spec.resolution * 0.5))) + 1;
      for (int s = 0; s <= n; ++s) {
        const CellIndex c = spec.cell_of(a + (b - a) * (static_cast<double>(s) / n));
        if (spec.contains(c)) g.at(c) = kLethal;
      }
    }
  }
  return g;
}

double shortest_feasible_length(const WorldModel& world, Vec2 start, Vec2 goal, const NavConfig& cfg) {
  CostGrid g = ground_truth_grid(world, cfg.grid);
  if (cfg.planner.footprint_inflation) g = inflate_lethal(g, cfg.kinematics.radius, nullptr, start);
  const CellIndex s = cfg.grid.cell_of(start);
  if (cfg.grid.contains(s) && g.at(s) == kLethal) g.at(s) = kLethal - 1;
  try {
    return astar_plan(g, {start, goal, 0.0}, cfg.planner).length_m;
  } catch (const NoPathError&) {
    return 0.0;
  } catch (const InputError&) {
    return 0.0;
  }
}

std::vector<ActivationRegion> activation_regions(const WorldModel& world, const ConstraintSet& constraints,
                                                 const NavConfig& cfg, double active_from) {
  std::vector<ActivationRegion> out;
  for (const auto& ac : constraints.active_all()) {
    for (const auto& obj : world.objects) {
      if (!label_matches(ac.label, obj.label)) continue;
      const Rect box = bounds_of(obj.footprint);
      auto add = [&](ConstraintField field, Rect region) {
        ActivationRegion r;
        r.label = ac.label;
        r.object_id = obj.id;
        r.field = field;
        r.constraint = ac;
        r.region = region;
        r.object_box = box;
        r.footprint = obj.footprint;
        r.active_from = active_from;
        out.push_back(std::move(r));
      };
      if (ac.direction != Direction::Unset) {
        const bool blocked = ac.traversability == Traversability::NonTraversable ||
                             (ac.traversability == Traversability::Unset && obj.physically_solid);
        add(ConstraintField::Direction, blocked ? box.inflated(cfg.directional.margin_d) : box);
      }
      if (ac.velocity != Velocity::Unset) add(ConstraintField::Velocity, box.inflated(cfg.velocity_margin));
      if (ac.traversability == Traversability::NonTraversable)
        add(ConstraintField::Traversability, box.inflated(cfg.directional.margin_d));
      else if (ac.traversability == Traversability::Traversable)
        add(ConstraintField::Traversability, box);
    }
  }
  return out;
}

}  // namespace bcnav

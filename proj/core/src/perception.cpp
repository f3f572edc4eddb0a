#include "bcnav/perception.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <tuple>
#include <unordered_map>

#include "bcnav/errors.hpp"
#include "bcnav/rng.hpp"

namespace bcnav {

std::string_view to_string(HeightClass h) {
  switch (h) {
    case HeightClass::Low: return "low";
    case HeightClass::RobotHeight: return "robot_height";
    case HeightClass::Tall: return "tall";
  }
  return "robot_height";
}

std::optional<HeightClass> height_class_from_string(std::string_view s) {
  if (s == "low") return HeightClass::Low;
  if (s == "robot_height") return HeightClass::RobotHeight;
  if (s == "tall") return HeightClass::Tall;
  return std::nullopt;
}

void WorldModel::validate() const {
  if (!(bounds.max_x > bounds.min_x && bounds.max_y > bounds.min_y)) throw InputError("world bounds are empty");
  auto inside = [&](const Polygon& poly) {
    return std::all_of(poly.begin(), poly.end(), [&](Vec2 p) { return bounds.contains(p); });
  };
  std::set<int> ids;
  for (const auto& o : objects) {
    if (!ids.insert(o.id).second) throw InputError("duplicate object id " + std::to_string(o.id));
    if (!is_simple_polygon(o.footprint))
      throw InputError("object " + std::to_string(o.id) + " footprint is not a simple polygon");
    if (!inside(o.footprint)) throw InputError("object " + std::to_string(o.id) + " lies outside the world bounds");
  }
  for (std::size_t i = 0; i < static_obstacles.size(); ++i) {
    if (!is_simple_polygon(static_obstacles[i]))
      throw InputError("static obstacle " + std::to_string(i) + " is not a simple polygon");
    if (!inside(static_obstacles[i]))
      throw InputError("static obstacle " + std::to_string(i) + " lies outside the world bounds");
  }
}

const SemanticObject* WorldModel::find(int id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

namespace {

double number_at(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_number()) throw ParseError(pointer, "expected a number");
  return j.get<double>();
}

Polygon polygon_from_json(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_array()) throw ParseError(pointer, "expected an array of [x, y] vertices");
  Polygon poly;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = pointer + "/" + std::to_string(i);
    if (!j[i].is_array() || j[i].size() != 2) throw ParseError(p, "expected [x, y]");
    poly.push_back({number_at(j[i][0], p + "/0"), number_at(j[i][1], p + "/1")});
  }
  if (poly.size() < 3) throw ParseError(pointer, "polygon needs at least 3 vertices");
  return poly;
}

nlohmann::json polygon_to_json(const Polygon& poly) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Vec2& p : poly) arr.push_back({p.x, p.y});
  return arr;
}

}  // namespace

WorldModel world_from_json(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_object()) throw ParseError(pointer, "expected a world object");
  WorldModel w;
  if (!j.contains("bounds")) throw ParseError(pointer + "/bounds", "missing");
  const auto& b = j["bounds"];
  if (b.is_array() && b.size() == 4) {
    w.bounds = {number_at(b[0], pointer + "/bounds/0"), number_at(b[1], pointer + "/bounds/1"),
                number_at(b[2], pointer + "/bounds/2"), number_at(b[3], pointer + "/bounds/3")};
  } else if (b.is_object()) {
    for (const char* k : {"min_x", "min_y", "max_x", "max_y"}) {
      if (!b.contains(k)) throw ParseError(pointer + "/bounds/" + k, "missing");
    }
    w.bounds = {number_at(b["min_x"], pointer + "/bounds/min_x"), number_at(b["min_y"], pointer + "/bounds/min_y"),
                number_at(b["max_x"], pointer + "/bounds/max_x"), number_at(b["max_y"], pointer + "/bounds/max_y")};
  } else {
    throw ParseError(pointer + "/bounds", "expected [min_x, min_y, max_x, max_y]");
  }

  if (j.contains("objects")) {
    const auto& objs = j["objects"];
    if (!objs.is_array()) throw ParseError(pointer + "/objects", "expected an array");
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const std::string p = pointer + "/objects/" + std::to_string(i);
      const auto& o = objs[i];
      if (!o.is_object()) throw ParseError(p, "expected an object");
      SemanticObject obj;
      if (!o.contains("id") || !o["id"].is_number_integer()) throw ParseError(p + "/id", "expected an integer id");
      obj.id = o["id"].get<int>();
      if (!o.contains("label") || !o["label"].is_string()) throw ParseError(p + "/label", "expected a string");
      obj.label = o["label"].get<std::string>();
      if (!o.contains("polygon")) throw ParseError(p + "/polygon", "missing");
      obj.footprint = polygon_from_json(o["polygon"], p + "/polygon");
      if (o.contains("height_class")) {
        if (!o["height_class"].is_string()) throw ParseError(p + "/height_class", "expected a string");
        auto h = height_class_from_string(o["height_class"].get<std::string>());
        if (!h) throw ParseError(p + "/height_class", "expected low, robot_height or tall");
        obj.height_class = *h;
      }
      if (o.contains("physically_solid")) {
        if (!o["physically_solid"].is_boolean()) throw ParseError(p + "/physically_solid", "expected a boolean");
        obj.physically_solid = o["physically_solid"].get<bool>();
      }
      w.objects.push_back(std::move(obj));
    }
  }
  if (j.contains("static_obstacles")) {
    const auto& obs = j["static_obstacles"];
    if (!obs.is_array()) throw ParseError(pointer + "/static_obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      w.static_obstacles.push_back(polygon_from_json(obs[i], pointer + "/static_obstacles/" + std::to_string(i)));
    }
  }
  try {
    w.validate();
  } catch (const InputError& e) {
    throw ParseError(pointer, e.what());
  }
  return w;
}

nlohmann::json to_json(const WorldModel& w) {
  nlohmann::json j;
  j["bounds"] = {w.bounds.min_x, w.bounds.min_y, w.bounds.max_x, w.bounds.max_y};
  j["objects"] = nlohmann::json::array();
  for (const auto& o : w.objects) {
    j["objects"].push_back({{"id", o.id},
                            {"label", o.label},
                            {"polygon", polygon_to_json(o.footprint)},
                            {"height_class", to_string(o.height_class)},
                            {"physically_solid", o.physically_solid}});
  }
  j["static_obstacles"] = nlohmann::json::array();
  for (const auto& p : w.static_obstacles) j["static_obstacles"].push_back(polygon_to_json(p));
  return j;
}

std::vector<ScanPoint> simulate_scan(const WorldModel& world, const Pose2& robot_pose, const SensorConfig& cfg) {
  if (!world.bounds.contains(robot_pose.position())) throw InputError("robot pose lies outside the world bounds");
  if (cfg.n_rays <= 0 || cfg.max_range <= 0.0) throw InputError("sensor needs n_rays > 0 and max_range > 0");

  constexpr double kSelfEps = 1e-9;
  Rng rng(cfg.seed);
  std::vector<ScanPoint> out;
  const Vec2 origin = robot_pose.position();

  struct Hit {
    double t;
    std::optional<int> id;
    double z;
  };

  for (int k = 0; k < cfg.n_rays; ++k) {
    const double bearing = -std::numbers::pi + 2.0 * std::numbers::pi * k / cfg.n_rays;
    const double angle = robot_pose.heading + bearing;
    const Vec2 dir{std::cos(angle), std::sin(angle)};

    double block_t = std::numeric_limits<double>::infinity();
    std::optional<int> block_id;
    bool block_tall = false;
    for (const auto& poly : world.static_obstacles) {
      for (double t : ray_polygon_crossings(origin, dir, poly)) {
        if (t > kSelfEps && t < block_t) {
          block_t = t;
          block_id.reset();
          block_tall = false;
        }
      }
    }
    for (const auto& obj : world.objects) {
      if (obj.height_class == HeightClass::Low) continue;
      for (double t : ray_polygon_crossings(origin, dir, obj.footprint)) {
        if (t > kSelfEps && t < block_t) {
          block_t = t;
          block_id = obj.id;
          block_tall = obj.height_class == HeightClass::Tall;
        }
      }
    }

    std::vector<Hit> hits;
    const double horizon = std::min(block_t, cfg.max_range);
    for (const auto& obj : world.objects) {
      if (obj.height_class != HeightClass::Low) continue;
      for (double t : ray_polygon_crossings(origin, dir, obj.footprint)) {
        if (t > kSelfEps && t <= horizon + 1e-9) hits.push_back({t, obj.id, cfg.ground_z});
      }
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      return a.t < b.t || (a.t == b.t && a.id < b.id);
    });
    if (block_t <= cfg.max_range) {
      hits.push_back({block_t, block_id, cfg.obstacle_z});
      if (block_tall) hits.push_back({block_t, block_id, cfg.overhead_z});
    }

    for (const Hit& h : hits) {
      double r = h.t;
      if (cfg.noise_sigma > 0.0) r = std::max(0.0, r + cfg.noise_sigma * rng.normal());
      if (cfg.dropout_rate > 0.0 && rng.uniform() < cfg.dropout_rate) continue;
      if (r > cfg.max_range) continue;
      out.push_back({r * std::cos(bearing), r * std::sin(bearing), h.z, h.id});
    }
  }
  return out;
}

void write_scan_csv(const std::filesystem::path& path, std::span<const ScanPoint> scan) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << "x,y,z,object_id\n";
  f.precision(17);
  for (const auto& p : scan) {
    f << p.x << ',' << p.y << ',' << p.z << ',';
    if (p.hit_object) f << *p.hit_object;
    f << '\n';
  }
}

LabelOracle::LabelOracle(const WorldModel& world, double mislabel_rate, std::uint64_t seed)
    : mislabel_rate_(mislabel_rate), seed_(seed) {
  std::set<std::string> uni{""};
  for (const auto& o : world.objects) {
    labels_[o.id] = o.label;
    uni.insert(o.label);
  }
  universe_.assign(uni.begin(), uni.end());
}

std::vector<std::string> LabelOracle::observe(std::span<const ScanPoint> scan) const {
  Rng rng(seed_);
  std::vector<std::string> out;
  out.reserve(scan.size());
  for (const auto& p : scan) {
    std::string truth;
    if (p.hit_object) {
      auto it = labels_.find(*p.hit_object);
      if (it != labels_.end()) truth = it->second;
    }
    if (mislabel_rate_ > 0.0 && rng.uniform() < mislabel_rate_) {
      const auto pos = std::lower_bound(universe_.begin(), universe_.end(), truth) - universe_.begin();
      truth = universe_[(pos + 1) % universe_.size()];
    }
    out.push_back(std::move(truth));
  }
  return out;
}

int LabelOracle::object_id_for(std::string_view label) const {
  for (const auto& [id, l] : labels_) {
    if (label_matches(label, l)) return id;
  }
  return -1;
}

bool label_matches(std::string_view requested, std::string_view observed) {
  if (requested.empty() || observed.empty()) return false;
  if (requested == observed) return true;
  if (requested.size() == observed.size() + 1 && requested.back() == 's' && requested.starts_with(observed))
    return true;
  return requested.size() == observed.size() + 2 && requested.ends_with("es") && requested.starts_with(observed);
}

ObjectPointSet ground_object(std::span<const ScanPoint> scan, std::string_view label, const LabelOracle& oracle) {
  ObjectPointSet out;
  out.label = std::string(label);
  out.object_id = oracle.object_id_for(label);
  if (scan.empty()) return out;
  const auto observed = oracle.observe(scan);
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (label_matches(label, observed[i])) out.points.push_back(scan[i]);
  }
  return out;
}

std::vector<int> dbscan_labels(std::span<const Vec2> pts, double eps, int min_pts) {
  const std::size_t n = pts.size();
  std::vector<int> label(n, -2);  // -2 unvisited, -1 noise
  if (n == 0) return {};

  auto key = [eps](Vec2 p) {
    return std::make_pair(static_cast<long long>(std::floor(p.x / eps)), static_cast<long long>(std::floor(p.y / eps)));
  };
  struct PairHash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
      return std::hash<long long>()(k.first * 73856093LL ^ k.second * 19349663LL);
    }
  };
  std::unordered_map<std::pair<long long, long long>, std::vector<std::size_t>, PairHash> grid;
  for (std::size_t i = 0; i < n; ++i) grid[key(pts[i])].push_back(i);

  const double eps2 = eps * eps;
  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> nb;
    const auto [cx, cy] = key(pts[i]);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          const Vec2 d = pts[j] - pts[i];
          if (dot(d, d) <= eps2) nb.push_back(j);
        }
      }
    }
    std::sort(nb.begin(), nb.end());
    return nb;
  };

  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != -2) continue;
    auto nb = neighbours(i);
    if (static_cast<int>(nb.size()) < min_pts) {
      label[i] = -1;
      continue;
    }
    label[i] = cluster;
    std::deque<std::size_t> queue(nb.begin(), nb.end());
    while (!queue.empty()) {
      const std::size_t j = queue.front();
      queue.pop_front();
      if (label[j] == -1) label[j] = cluster;  // border point
      if (label[j] != -2) continue;
      label[j] = cluster;
      auto nbj = neighbours(j);
      if (static_cast<int>(nbj.size()) >= min_pts) queue.insert(queue.end(), nbj.begin(), nbj.end());
    }
    ++cluster;
  }
  return label;
}

ObjectPointSet dbscan_filter(const ObjectPointSet& points, double eps, int min_pts) {
  if (!(eps > 0.0) || min_pts < 1) throw InputError("dbscan needs eps > 0 and min_pts >= 1");
  std::vector<Vec2> xy;
  xy.reserve(points.points.size());
  for (const auto& p : points.points) xy.push_back({p.x, p.y});
  const auto labels = dbscan_labels(xy, eps, min_pts);

  ObjectPointSet out = points;
  out.points.clear();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) out.points.push_back(points.points[i]);
  }
  return out;
}

ObjectPointSet aggregate_window(std::span<const ObjectPointSet> history, const Pose2& current_pose,
                                double dedup_radius) {
  if (history.empty()) throw InputError("aggregation window is empty");
  ObjectPointSet out;
  out.object_id = history.front().object_id;
  out.label = history.front().label;
  out.sensor_pose = current_pose;
  out.frame_time = -std::numeric_limits<double>::infinity();

  std::vector<ScanPoint> all;
  for (const auto& frame : history) {
    if (frame.object_id != out.object_id) throw InputError("aggregation window mixes object ids");
    out.frame_time = std::max(out.frame_time, frame.frame_time);
    for (const auto& p : frame.points) {
      const Vec2 local = to_local(current_pose, to_world(frame.sensor_pose, {p.x, p.y}));
      all.push_back({local.x, local.y, p.z, p.hit_object});
    }
  }

  // Canonical order makes the greedy merge independent of frame order.
  std::sort(all.begin(), all.end(), [](const ScanPoint& a, const ScanPoint& b) {
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
  });

  const double cell = dedup_radius > 0.0 ? dedup_radius : 1.0;
  auto key = [cell](double x, double y) {
    return std::make_pair(static_cast<long long>(std::floor(x / cell)), static_cast<long long>(std::floor(y / cell)));
  };
  std::map<std::pair<long long, long long>, std::vector<Vec2>> kept;
  for (const auto& p : all) {
    const auto [cx, cy] = key(p.x, p.y);
    bool duplicate = false;
    for (long long dx = -1; dx <= 1 && !duplicate; ++dx) {
      for (long long dy = -1; dy <= 1 && !duplicate; ++dy) {
        auto it = kept.find({cx + dx, cy + dy});
        if (it == kept.end()) continue;
        for (Vec2 q : it->second) {
          const double d = distance(q, {p.x, p.y});
          if (d == 0.0 || d < dedup_radius) {
            duplicate = true;
            break;
          }
        }
      }
    }
    if (duplicate) continue;
    kept[{cx, cy}].push_back({p.x, p.y});
    out.points.push_back(p);
  }

  // Extremal points always survive so the box of the union covers every frame's box.
  if (!all.empty()) {
    auto by_x = std::minmax_element(all.begin(), all.end(), [](auto& a, auto& b) { return a.x < b.x; });
    auto by_y = std::minmax_element(all.begin(), all.end(), [](auto& a, auto& b) { return a.y < b.y; });
    for (auto it : {by_x.first, by_x.second, by_y.first, by_y.second}) {
      if (std::find(out.points.begin(), out.points.end(), *it) == out.points.end()) out.points.push_back(*it);
    }
  }
  return out;
}

BevBox bev_bbox(const ObjectPointSet& points) {
  if (points.points.empty()) throw InputError("cannot box an empty point set");
  BevBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), points.object_id,
           points.label};
  for (const auto& p : points.points) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

std::vector<ScanPoint> extract_obstacle_points(std::span<const ScanPoint> scan, double z_min, double h_max) {
  if (!(z_min < h_max)) throw InputError("z_min must be below h_max");
  std::vector<ScanPoint> out;
  for (const auto& p : scan) {
    if (p.z > z_min && p.z < h_max) out.push_back(p);
  }
  return out;
}

void ObjectTracker::observe(const std::string& label, ObjectPointSet frame) {
  auto& h = history_[label];
  h.push_back(std::move(frame));
  while (h.size() > window_) h.pop_front();
}

std::optional<ObjectPointSet> ObjectTracker::aggregate(const std::string& label, const Pose2& frame,
                                                       double dedup_radius) const {
  auto it = history_.find(label);
  if (it == history_.end()) return std::nullopt;
  std::vector<ObjectPointSet> window(it->second.begin(), it->second.end());
  auto agg = aggregate_window(window, frame, dedup_radius);
  if (agg.points.empty()) return std::nullopt;
  return agg;
}

}  // namespace bcnav

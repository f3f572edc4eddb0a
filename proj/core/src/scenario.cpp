#include "bcnav/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "bcnav/errors.hpp"

namespace bcnav {

namespace {

using json = nlohmann::json;

double as_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw ParseError(ptr, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) throw ParseError(ptr, "expected an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& ptr) {
  if (!v.is_boolean()) throw ParseError(ptr, "expected true or false");
  return v.get<bool>();
}

Vec2 as_point(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.size() != 2) throw ParseError(ptr, "expected [x, y]");
  return {as_number(v[0], ptr + "/0"), as_number(v[1], ptr + "/1")};
}

struct Param {
  const char* name;
  std::function<void(NavConfig&, const json&, const std::string&)> set;
  std::function<json(const NavConfig&)> get;
};

#define NUM(key, field)                                                                         \
  Param {                                                                                       \
    key, [](NavConfig& c, const json& v, const std::string& p) { c.field = as_number(v, p); }, \
        [](const NavConfig& c) { return json(c.field); }                                        \
  }
#define INT(key, field)                                                                      \
  Param {                                                                                    \
    key, [](NavConfig& c, const json& v, const std::string& p) { c.field = as_int(v, p); }, \
        [](const NavConfig& c) { return json(c.field); }                                     \
  }
#define BOOL(key, field)                                                                      \
  Param {                                                                                     \
    key, [](NavConfig& c, const json& v, const std::string& p) { c.field = as_bool(v, p); }, \
        [](const NavConfig& c) { return json(c.field); }                                      \
  }

const std::vector<Param>& params() {
  static const std::vector<Param> table = {
      NUM("alpha", directional.alpha),
      INT("c_min", directional.c_min),
      INT("c_max", directional.c_max),
      NUM("margin_d", directional.margin_d),
      NUM("tau", tau_sem),
      NUM("velocity_margin", velocity_margin),
      NUM("resolution", grid.resolution),
      INT("grid_width", grid.width),
      INT("grid_height", grid.height),
      Param{"grid_origin",
            [](NavConfig& c, const json& v, const std::string& p) { c.grid.origin = as_point(v, p); },
            [](const NavConfig& c) { return json::array({c.grid.origin.x, c.grid.origin.y}); }},
      INT("n_rays", sensor.n_rays),
      NUM("max_range", sensor.max_range),
      NUM("noise_sigma", sensor.noise_sigma),
      NUM("dropout_rate", sensor.dropout_rate),
      NUM("mislabel_rate", mislabel_rate),
      NUM("z_min", z_min),
      NUM("h_max", h_max),
      NUM("eps", dbscan_eps),
      INT("min_pts", dbscan_min_pts),
      INT("window", window),
      NUM("dedup_radius", dedup_radius),
      NUM("lambda", planner.lambda),
      NUM("replan_ratio", planner.replan_ratio),
      INT("connectivity", planner.connectivity),
      BOOL("corner_cutting", planner.corner_cutting),
      BOOL("footprint_inflation", planner.footprint_inflation),
      NUM("v_min", kinematics.v_min),
      NUM("v_default", kinematics.v_default),
      NUM("v_max", kinematics.v_max),
      NUM("accel", kinematics.accel),
      NUM("radius", kinematics.radius),
      NUM("control_period", kinematics.control_period),
      NUM("turn_rate", kinematics.turn_rate),
      NUM("turn_threshold", kinematics.turn_threshold),
      NUM("timeout", timeout),
      NUM("speed_tolerance", speed_tolerance),
      NUM("snapshot_interval", snapshot_interval),
  };
  return table;
}

#undef NUM
#undef INT
#undef BOOL

std::string_view canonical(std::string_view key) {
  if (key == "T") return "window";
  if (key == "tau_sem") return "tau";
  return key;
}

std::vector<std::string> string_list(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw ParseError(ptr, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw ParseError(ptr + "/" + std::to_string(i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ParseError("", path.string() + ": " + e.what());
  }
}

}  // namespace

void set_param(NavConfig& cfg, std::string_view key, const json& value, const std::string& pointer) {
  const std::string_view k = canonical(key);
  for (const auto& p : params()) {
    if (k == p.name) {
      p.set(cfg, value, pointer);
      return;
    }
  }
  throw ParseError(pointer, "unknown parameter '" + std::string(key) + "'");
}

std::vector<std::string> param_names() {
  std::vector<std::string> out;
  for (const auto& p : params()) out.emplace_back(p.name);
  return out;
}

json to_json(const NavConfig& c) {
  json j = json::object();
  for (const auto& p : params()) j[p.name] = p.get(c);
  return j;
}

Pose2 Scenario::start_pose() const {
  const double h = start_heading ? *start_heading : std::atan2(goal.y - start.y, goal.x - start.x);
  return {start.x, start.y, h};
}

void Scenario::validate() const {
  if (start == goal) throw InputError("start and goal coincide");
  if (!(goal_tolerance > 0.0)) throw InputError("goal_tolerance must be positive");
  if (!world.bounds.contains(start)) throw InputError("start lies outside the world bounds");
  if (!world.bounds.contains(goal)) throw InputError("goal lies outside the world bounds");
  const Rect ext = config.grid.extent();
  if (!ext.contains(start) || !ext.contains(goal)) throw InputError("start or goal lies outside the grid");
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("", "expected a scenario object");
  Scenario s;
  if (!j.contains("version")) throw ParseError("/version", "missing");
  if (as_int(j["version"], "/version") != kScenarioVersion)
    throw ParseError("/version", "unsupported version (expected " + std::to_string(kScenarioVersion) + ")");
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ParseError("/name", "expected a string");
    s.name = j["name"].get<std::string>();
  }

  if (!j.contains("world")) throw ParseError("/world", "missing");
  if (j["world"].is_string()) {
    s.world_path = base_dir / j["world"].get<std::string>();
    if (!std::filesystem::exists(s.world_path)) throw ParseError("/world", "file not found: " + s.world_path.string());
    json w;
    try {
      w = read_json_file(s.world_path);
    } catch (const ParseError& e) {
      throw ParseError("/world", e.what());
    }
    try {
      s.world = world_from_json(w);
    } catch (const ParseError& e) {
      throw ParseError("/world" + e.pointer(), e.what());
    }
  } else {
    s.world = world_from_json(j["world"], "/world");
  }

  if (!j.contains("start")) throw ParseError("/start", "missing");
  s.start = as_point(j["start"], "/start");
  if (!j.contains("goal")) throw ParseError("/goal", "missing");
  s.goal = as_point(j["goal"], "/goal");
  if (j.contains("start_heading")) s.start_heading = as_number(j["start_heading"], "/start_heading");
  if (j.contains("goal_tolerance")) s.goal_tolerance = as_number(j["goal_tolerance"], "/goal_tolerance");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) throw ParseError("/seed", "expected an integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("offline_instructions"))
    s.offline_instructions = string_list(j["offline_instructions"], "/offline_instructions");

  if (j.contains("online")) {
    const auto& on = j["online"];
    if (!on.is_array()) throw ParseError("/online", "expected an array");
    for (std::size_t i = 0; i < on.size(); ++i) {
      const std::string p = "/online/" + std::to_string(i);
      if (!on[i].is_object()) throw ParseError(p, "expected {t, text}");
      if (!on[i].contains("t")) throw ParseError(p + "/t", "missing");
      if (!on[i].contains("text") || !on[i]["text"].is_string()) throw ParseError(p + "/text", "expected a string");
      const double t = as_number(on[i]["t"], p + "/t");
      if (t < 0.0) throw ParseError(p + "/t", "must be non-negative");
      s.scripted_online.push_back({t, on[i]["text"].get<std::string>()});
    }
    std::stable_sort(s.scripted_online.begin(), s.scripted_online.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
  }

  if (j.contains("reference_trajectory")) {
    const auto& r = j["reference_trajectory"];
    if (!r.is_array() || r.size() < 2) throw ParseError("/reference_trajectory", "expected at least 2 points");
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < r.size(); ++i) pts.push_back(as_point(r[i], "/reference_trajectory/" + std::to_string(i)));
    s.reference_trajectory = std::move(pts);
  }

  if (j.contains("params")) {
    const auto& p = j["params"];
    if (!p.is_object()) throw ParseError("/params", "expected an object");
    for (const auto& [key, value] : p.items()) set_param(s.config, key, value, "/params/" + key);
  }
  try {
    s.config.validate();
  } catch (const InputError& e) {
    throw ParseError("/params", e.what());
  }
  try {
    s.validate();
  } catch (const InputError& e) {
    throw ParseError("", e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("scenario not found: " + path.string());
  return scenario_from_json(read_json_file(path), path.parent_path());
}

void apply_override(Scenario& s, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ParseError("/params", "override must look like key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  const std::string ptr = "/params/" + key;
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    throw ParseError(ptr, "value '" + raw + "' is not a number, boolean or array");
  }
  if (key == "seed") {
    if (!value.is_number_integer()) throw ParseError(ptr, "expected an integer");
    s.seed = value.get<std::uint64_t>();
    return;
  }
  NavConfig cfg = s.config;
  set_param(cfg, key, value, ptr);
  try {
    cfg.validate();
  } catch (const InputError& e) {
    throw ParseError(ptr, e.what());
  }
  s.config = cfg;
}

json to_json(const Scenario& s) {
  json j;
  j["version"] = kScenarioVersion;
  j["name"] = s.name;
  j["world"] = to_json(s.world);
  j["start"] = {s.start.x, s.start.y};
  j["goal"] = {s.goal.x, s.goal.y};
  if (s.start_heading) j["start_heading"] = *s.start_heading;
  j["goal_tolerance"] = s.goal_tolerance;
  j["offline_instructions"] = s.offline_instructions;
  j["online"] = json::array();
  for (const auto& o : s.scripted_online) j["online"].push_back({{"t", o.t}, {"text", o.text}});
  if (s.reference_trajectory) {
    j["reference_trajectory"] = json::array();
    for (const auto& p : *s.reference_trajectory) j["reference_trajectory"].push_back({p.x, p.y});
  }
  j["seed"] = s.seed;
  j["params"] = to_json(s.config);
  return j;
}

}  // namespace bcnav

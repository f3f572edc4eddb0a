#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcnav/perception.hpp"
#include "bcnav/pipeline.hpp"

namespace bcnav {

inline constexpr int kScenarioVersion = 1;

struct ScheduledInstruction {
  double t = 0.0;
  std::string text;
  bool operator==(const ScheduledInstruction&) const = default;
};

struct Scenario {
  std::string name;
  WorldModel world;
  std::filesystem::path world_path;  // empty when the world is inline
  Vec2 start;
  Vec2 goal;
  std::optional<double> start_heading;  // defaults to facing the goal
  double goal_tolerance = 0.2;
  std::vector<std::string> offline_instructions;
  std::vector<ScheduledInstruction> scripted_online;
  std::optional<std::vector<Vec2>> reference_trajectory;
  std::uint64_t seed = 0;
  NavConfig config;

  Pose2 start_pose() const;
  /// Throws InputError on an inconsistent scenario.
  void validate() const;
};

/// Relative world paths resolve against `base_dir`. Throws ParseError with a
/// JSON pointer on any schema violation.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& s);

/// Sets one tunable by name ("alpha", "tau", "T", ...); throws ParseError at `pointer`.
void set_param(NavConfig& cfg, std::string_view key, const nlohmann::json& value, const std::string& pointer);
/// "key=value" with a JSON value; throws ParseError at /params/key.
void apply_override(Scenario& s, std::string_view assignment);
std::vector<std::string> param_names();

}  // namespace bcnav

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcnav/metrics.hpp"
#include "bcnav/scenario.hpp"
#include "bcnav/session.hpp"

namespace bcnav {

std::uint64_t fnv1a64(std::string_view bytes);
/// Hash of the resolved scenario (world, instructions, seed, parameters).
std::string config_hash(const Scenario& s);

nlohmann::json trajectory_json(const RunRecord& run);
nlohmann::json events_json(const RunRecord& run);

/// Writes trajectory.json, metrics.json, layers/NNNNN/layer.*.pgm with
/// grid.json per snapshot, and manifest.json listing every file. Returns the
/// written paths relative to out_dir. Throws IoError when out_dir is unwritable.
std::vector<std::string> export_run(const NavigationSession& session, const std::filesystem::path& out_dir);

/// Writes one layer set as layer.{geo|sem|dir|vel|spat|kin}.pgm plus grid.json.
std::vector<std::string> write_layers(const LayerSet& layers, double t, const std::filesystem::path& dir);

}  // namespace bcnav

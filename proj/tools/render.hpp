#pragma once

#include <filesystem>
#include <vector>

namespace bcnav::tools {

/// Writes composite.png (and one PNG per layer) into every layers/NNNNN
/// directory of a run. Returns the written files.
std::vector<std::filesystem::path> render_run(const std::filesystem::path& run_dir);

}  // namespace bcnav::tools

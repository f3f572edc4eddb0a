#include <fstream>
#include <sstream>

#include "bcnav/costmap.hpp"
#include "bcnav/errors.hpp"

namespace bcnav {

nlohmann::json grid_metadata(const GridSpec& spec) {
  return {{"resolution", spec.resolution},
          {"width", spec.width},
          {"height", spec.height},
          {"origin", {spec.origin.x, spec.origin.y}}};
}

GridSpec grid_spec_from_json(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_object()) throw ParseError(pointer, "expected a grid object");
  GridSpec s;
  if (j.contains("resolution")) {
    if (!j["resolution"].is_number()) throw ParseError(pointer + "/resolution", "expected a number");
    s.resolution = j["resolution"].get<double>();
  }
  for (const char* k : {"width", "height"}) {
    if (!j.contains(k)) continue;
    if (!j[k].is_number_integer()) throw ParseError(pointer + "/" + k, "expected an integer");
    (std::string_view(k) == "width" ? s.width : s.height) = j[k].get<int>();
  }
  if (j.contains("origin")) {
    const auto& o = j["origin"];
    if (!o.is_array() || o.size() != 2 || !o[0].is_number() || !o[1].is_number())
      throw ParseError(pointer + "/origin", "expected [x, y]");
    s.origin = {o[0].get<double>(), o[1].get<double>()};
  }
  try {
    s.validate();
  } catch (const InputError& e) {
    throw ParseError(pointer, e.what());
  }
  return s;
}

void write_pgm(const std::filesystem::path& path, const GridSpec& spec, std::span<const std::uint8_t> cells) {
  if (cells.size() != spec.size()) throw InputError("cell count does not match grid spec");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << "P5\n" << spec.width << ' ' << spec.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(cells.data()), static_cast<std::streamsize>(cells.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

void write_pgm(const std::filesystem::path& path, const CostGrid& grid) { write_pgm(path, grid.spec, grid.cells); }

void write_pgm(const std::filesystem::path& path, const KinematicGrid& grid) {
  std::vector<std::uint8_t> v(grid.cells.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = grid.cells[k].is_set ? grid.cells[k].value : 0;
  write_pgm(path, grid.spec, v);
}

std::vector<std::uint8_t> kin_mask(const KinematicGrid& grid) {
  std::vector<std::uint8_t> v(grid.cells.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = grid.cells[k].is_set ? 255 : 0;
  return v;
}

CostGrid read_pgm(const std::filesystem::path& path, const GridSpec& spec_hint) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  f >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255) throw IoError("not an 8-bit P5 file: " + path.string());
  f.get();
  GridSpec spec = spec_hint;
  spec.width = w;
  spec.height = h;
  CostGrid g(spec, 0);
  f.read(reinterpret_cast<char*>(g.cells.data()), static_cast<std::streamsize>(g.cells.size()));
  if (f.gcount() != static_cast<std::streamsize>(g.cells.size())) throw IoError("truncated PGM: " + path.string());
  return g;
}

}  // namespace bcnav

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcnav/constraints.hpp"
#include "bcnav/geometry.hpp"
#include "bcnav/perception.hpp"

namespace bcnav {

inline constexpr std::uint8_t kLethal = 255;
inline constexpr std::uint8_t kFree = 100;

/// Column i runs along +x, row j along +y.
struct CellIndex {
  int i = 0;
  int j = 0;
  constexpr bool operator==(const CellIndex&) const = default;
};

struct GridSpec {
  double resolution = 0.05;
  int width = 200;
  int height = 200;
  Vec2 origin{-5.0, -5.0};  // world position of the lower-left corner of cell (0, 0)

  bool operator==(const GridSpec&) const = default;

  /// Throws InputError unless resolution > 0 and the extent is non-empty.
  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool contains(CellIndex c) const { return c.i >= 0 && c.j >= 0 && c.i < width && c.j < height; }
  std::size_t index(CellIndex c) const { return static_cast<std::size_t>(c.j) * width + c.i; }
  CellIndex cell_at(std::size_t idx) const {
    return {static_cast<int>(idx % width), static_cast<int>(idx / width)};
  }
  /// Cell containing p; may lie outside the grid.
  CellIndex cell_of(Vec2 p) const;
  Vec2 center_of(CellIndex c) const {
    return {origin.x + (c.i + 0.5) * resolution, origin.y + (c.j + 0.5) * resolution};
  }
  Rect extent() const {
    return {origin.x, origin.y, origin.x + width * resolution, origin.y + height * resolution};
  }
};

/// Inclusive cell rectangle.
struct CellRange {
  int i0 = 0;
  int j0 = 0;
  int i1 = -1;
  int j1 = -1;
  bool operator==(const CellRange&) const = default;
  std::size_t count() const {
    return i1 < i0 || j1 < j0 ? 0 : static_cast<std::size_t>(i1 - i0 + 1) * (j1 - j0 + 1);
  }
};

/// Cells touched by r, clipped to the grid; nullopt when r misses it entirely.
std::optional<CellRange> box_cells(const GridSpec& spec, const Rect& r);

struct CostGrid {
  GridSpec spec;
  std::vector<std::uint8_t> cells;

  CostGrid() = default;
  explicit CostGrid(const GridSpec& s, std::uint8_t fill = 0) : spec(s), cells(s.size(), fill) {}

  std::uint8_t& at(CellIndex c) { return cells[spec.index(c)]; }
  std::uint8_t at(CellIndex c) const { return cells[spec.index(c)]; }
  bool operator==(const CostGrid&) const = default;
};

struct KinCell {
  std::uint8_t value = 0;
  bool is_set = false;
  bool operator==(const KinCell&) const = default;
};

struct KinematicGrid {
  GridSpec spec;
  std::vector<KinCell> cells;

  KinematicGrid() = default;
  explicit KinematicGrid(const GridSpec& s) : spec(s), cells(s.size()) {}

  const KinCell& at(CellIndex c) const { return cells[spec.index(c)]; }
  KinCell& at(CellIndex c) { return cells[spec.index(c)]; }
  bool operator==(const KinematicGrid&) const = default;
};

struct DirectionalParams {
  int c_min = 0;
  int c_max = 255;
  double alpha = 3.0;
  double margin_d = 0.35;

  /// Throws InputError unless 0 <= c_min < c_max <= 255, alpha > 0, margin_d >= 0.
  void validate() const;
};

/// Grid direction that plays the role of "to the robot's right" for a box.
enum class LateralAxis { PlusX, MinusX, PlusY, MinusY };

/// Axis nearest to the right-hand side of `heading`.
LateralAxis lateral_axis_for(double heading);

/// (c1, c2, c3) for a direction; throws InputError for Direction::Unset.
std::array<double, 3> boundary_costs(Direction d, int c_min, int c_max);

/// Piecewise power interpolation across [u1, u3] with knee at u2, floored, no
/// clamping. A zero-width span gives floor(c2); a zero-width segment is
/// constant at its start value.
int interpolate_directional(double u, double u1, double u2, double u3, const std::array<double, 3>& c,
                            double alpha);

/// Cells observed this cycle: on a ray between sensor and return, or holding a return.
struct ObservationGrid {
  GridSpec spec;
  std::vector<std::uint8_t> observed;

  explicit ObservationGrid(const GridSpec& s) : spec(s), observed(s.size(), 0) {}
  bool at(CellIndex c) const { return observed[spec.index(c)] != 0; }
};

ObservationGrid build_observation(const GridSpec& spec, Vec2 sensor, std::span<const Vec2> returns);

/// Occupancy: 255 where any point lands, 100 elsewhere. Points are in the grid frame.
CostGrid build_geometric(std::span<const ScanPoint> obstacles, const GridSpec& spec);

/// Mean geometric cost over the box cells compared against tau_sem. With an
/// observation mask the mean runs over observed box cells only, falling back
/// to every box cell when none was observed. Throws InputError when the box
/// misses the grid.
Traversability infer_traversability(const CostGrid& geo, const BevBox& box, double tau_sem,
                                    const ObservationGrid* observed = nullptr);
double mean_cost(const CostGrid& geo, const BevBox& box, const ObservationGrid* observed = nullptr);

/// 1 inside traversable boxes, 2 inside non-traversable ones (2 wins), else 0.
CostGrid build_semantic(std::span<const std::pair<BevBox, Traversability>> boxes, const GridSpec& spec);

/// Directional ramp across the box along `axis`; cells outside the box are 0
/// and cells inside are at least 1.
CostGrid build_directional(const BevBox& box, Direction direction, Traversability traversability,
                           const DirectionalParams& params, const GridSpec& spec,
                           LateralAxis axis = LateralAxis::PlusX);

/// slow -> c_min, normal -> floor((c_min + c_max) / 2), fast -> c_max; overlaps take the minimum.
KinematicGrid build_velocity(std::span<const std::pair<BevBox, Velocity>> boxes, int c_min, int c_max,
                             const GridSpec& spec);

CostGrid fuse_traversability(const CostGrid& geo, const CostGrid& sem);
CostGrid fuse_spatial(const CostGrid& traversability, const CostGrid& directional);
/// Cell-wise maximum; an empty list gives an all-zero grid over `spec`.
CostGrid combine_directional(std::span<const CostGrid> layers, const GridSpec& spec);

// grid_io
nlohmann::json grid_metadata(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j, const std::string& pointer = "");
/// Binary P5, row 0 = grid row j = 0.
void write_pgm(const std::filesystem::path& path, const GridSpec& spec, std::span<const std::uint8_t> cells);
void write_pgm(const std::filesystem::path& path, const CostGrid& grid);
/// Values of set cells; unset cells are written as 0.
void write_pgm(const std::filesystem::path& path, const KinematicGrid& grid);
std::vector<std::uint8_t> kin_mask(const KinematicGrid& grid);
/// Reads a P5 file written by write_pgm; throws IoError.
CostGrid read_pgm(const std::filesystem::path& path, const GridSpec& spec_hint = {});

}  // namespace bcnav

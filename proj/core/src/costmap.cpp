#include "bcnav/costmap.hpp"

#include <algorithm>
#include <cmath>

#include "bcnav/errors.hpp"

namespace bcnav {

void GridSpec::validate() const {
  if (!(resolution > 0.0)) throw InputError("grid resolution must be positive");
  if (width <= 0 || height <= 0) throw InputError("grid width and height must be positive");
}

CellIndex GridSpec::cell_of(Vec2 p) const {
  // The epsilon keeps exact multiples of the resolution (6.0 / 0.05) in the upper cell.
  return {static_cast<int>(std::floor((p.x - origin.x) / resolution + 1e-9)),
          static_cast<int>(std::floor((p.y - origin.y) / resolution + 1e-9))};
}

std::optional<CellRange> box_cells(const GridSpec& spec, const Rect& r) {
  const CellIndex lo = spec.cell_of({r.min_x, r.min_y});
  const CellIndex hi = spec.cell_of({r.max_x, r.max_y});
  CellRange out{std::max(lo.i, 0), std::max(lo.j, 0), std::min(hi.i, spec.width - 1),
                std::min(hi.j, spec.height - 1)};
  if (out.i1 < out.i0 || out.j1 < out.j0) return std::nullopt;
  return out;
}

void DirectionalParams::validate() const {
  if (c_min < 0 || c_max > 255 || !(c_min < c_max)) throw InputError("directional costs need 0 <= c_min < c_max <= 255");
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (!(margin_d >= 0.0)) throw InputError("margin_d must be non-negative");
}

LateralAxis lateral_axis_for(double heading) {
  const Vec2 r = right_of(heading);
  if (std::abs(r.x) >= std::abs(r.y)) return r.x >= 0.0 ? LateralAxis::PlusX : LateralAxis::MinusX;
  return r.y >= 0.0 ? LateralAxis::PlusY : LateralAxis::MinusY;
}

std::array<double, 3> boundary_costs(Direction d, int c_min, int c_max) {
  const double lo = c_min;
  const double hi = c_max;
  const double mid = 0.5 * (lo + hi);
  switch (d) {
    case Direction::Left: return {lo, mid, hi};
    case Direction::Right: return {hi, mid, lo};
    case Direction::Middle: return {hi, lo, hi};
    case Direction::Unset: break;
  }
  throw InputError("directional layer needs a direction");
}

int interpolate_directional(double u, double u1, double u2, double u3, const std::array<double, 3>& c,
                            double alpha) {
  if (u3 <= u1) return static_cast<int>(std::floor(c[1]));
  if (u <= u2) {
    if (u2 <= u1) return static_cast<int>(std::floor(c[0]));
    const double s = std::clamp((u - u1) / (u2 - u1), 0.0, 1.0);
    return static_cast<int>(std::floor(c[0] + (c[1] - c[0]) * std::pow(s, alpha)));
  }
  if (u3 <= u2) return static_cast<int>(std::floor(c[1]));
  const double s = std::clamp((u - u2) / (u3 - u2), 0.0, 1.0);
  return static_cast<int>(std::floor(c[1] + (c[2] - c[1]) * std::pow(s, alpha)));
}

ObservationGrid build_observation(const GridSpec& spec, Vec2 sensor, std::span<const Vec2> returns) {
  ObservationGrid g(spec);
  const double step = spec.resolution * 0.5;
  for (const Vec2& p : returns) {
    const Vec2 d = p - sensor;
    const double len = d.norm();
    const int n = static_cast<int>(std::ceil(len / step));
    for (int k = 0; k <= n; ++k) {
      const double t = n == 0 ? 1.0 : static_cast<double>(k) / n;
      const CellIndex c = spec.cell_of(sensor + d * t);
      if (spec.contains(c)) g.observed[spec.index(c)] = 1;
    }
  }
  return g;
}

CostGrid build_geometric(std::span<const ScanPoint> obstacles, const GridSpec& spec) {
  CostGrid g(spec, kFree);
  for (const auto& p : obstacles) {
    const CellIndex c = spec.cell_of({p.x, p.y});
    if (spec.contains(c)) g.at(c) = kLethal;
  }
  return g;
}

double mean_cost(const CostGrid& geo, const BevBox& box, const ObservationGrid* observed) {
  const auto range = box_cells(geo.spec, box.rect());
  if (!range) throw InputError("box lies outside the grid");
  if (observed && observed->spec != geo.spec) throw InputError("observation grid does not match");
  double all_sum = 0.0;
  double seen_sum = 0.0;
  std::size_t seen = 0;
  for (int j = range->j0; j <= range->j1; ++j) {
    for (int i = range->i0; i <= range->i1; ++i) {
      const double v = geo.at({i, j});
      all_sum += v;
      if (observed && observed->at({i, j})) {
        seen_sum += v;
        ++seen;
      }
    }
  }
  if (seen > 0) return seen_sum / static_cast<double>(seen);
  return all_sum / static_cast<double>(range->count());
}

Traversability infer_traversability(const CostGrid& geo, const BevBox& box, double tau_sem,
                                    const ObservationGrid* observed) {
  return mean_cost(geo, box, observed) > tau_sem ? Traversability::NonTraversable : Traversability::Traversable;
}

CostGrid build_semantic(std::span<const std::pair<BevBox, Traversability>> boxes, const GridSpec& spec) {
  CostGrid g(spec, 0);
  for (const auto& [box, t] : boxes) {
    if (t == Traversability::Unset) throw InputError("semantic layer needs resolved traversability");
    const auto range = box_cells(spec, box.rect());
    if (!range) continue;
    const std::uint8_t v = t == Traversability::Traversable ? 1 : 2;
    for (int j = range->j0; j <= range->j1; ++j) {
      for (int i = range->i0; i <= range->i1; ++i) {
        auto& cell = g.at({i, j});
        cell = std::max(cell, v);
      }
    }
  }
  return g;
}

namespace {

int lateral_u(LateralAxis axis, int i, int j) {
  switch (axis) {
    case LateralAxis::PlusX: return i;
    case LateralAxis::MinusX: return -i;
    case LateralAxis::PlusY: return j;
    case LateralAxis::MinusY: return -j;
  }
  return i;
}

}  // namespace

CostGrid build_directional(const BevBox& box, Direction direction, Traversability traversability,
                           const DirectionalParams& params, const GridSpec& spec, LateralAxis axis) {
  params.validate();
  const auto c = boundary_costs(direction, params.c_min, params.c_max);
  const BevBox b = traversability == Traversability::NonTraversable ? box.inflated(params.margin_d) : box;
  CostGrid g(spec, 0);
  const auto range = box_cells(spec, b.rect());
  if (!range) return g;

  const int ua = lateral_u(axis, range->i0, range->j0);
  const int ub = lateral_u(axis, range->i1, range->j1);
  const double u1 = std::min(ua, ub);
  const double u3 = std::max(ua, ub);
  const double u2 = 0.5 * (u1 + u3);
  for (int j = range->j0; j <= range->j1; ++j) {
    for (int i = range->i0; i <= range->i1; ++i) {
      const int v = interpolate_directional(lateral_u(axis, i, j), u1, u2, u3, c, params.alpha);
      g.at({i, j}) = static_cast<std::uint8_t>(std::clamp(v, 1, 255));
    }
  }
  return g;
}

KinematicGrid build_velocity(std::span<const std::pair<BevBox, Velocity>> boxes, int c_min, int c_max,
                             const GridSpec& spec) {
  if (c_min < 0 || c_max > 255 || c_min > c_max) throw InputError("velocity costs need 0 <= c_min <= c_max <= 255");
  KinematicGrid g(spec);
  for (const auto& [box, vel] : boxes) {
    int value = 0;
    switch (vel) {
      case Velocity::Slow: value = c_min; break;
      case Velocity::Normal: value = (c_min + c_max) / 2; break;
      case Velocity::Fast: value = c_max; break;
      case Velocity::Unset: throw InputError("velocity layer needs a velocity");
    }
    const auto range = box_cells(spec, box.rect());
    if (!range) continue;
    for (int j = range->j0; j <= range->j1; ++j) {
      for (int i = range->i0; i <= range->i1; ++i) {
        auto& cell = g.at({i, j});
        const auto v = static_cast<std::uint8_t>(value);
        cell.value = cell.is_set ? std::min(cell.value, v) : v;
        cell.is_set = true;
      }
    }
  }
  return g;
}

CostGrid fuse_traversability(const CostGrid& geo, const CostGrid& sem) {
  if (geo.spec != sem.spec) throw InputError("geometric and semantic grids differ in spec");
  CostGrid out(geo.spec, 0);
  for (std::size_t k = 0; k < geo.cells.size(); ++k) {
    const int s = sem.cells[k];
    if (s > 2) throw InputError("semantic cell outside {0, 1, 2}");
    const int g = geo.cells[k];
    // Each product below is even, so the halves are exact.
    const int v = g * (1 - s) * (2 - s) / 2 + 100 * s * (2 - s) + 255 * s * (s - 1) / 2;
    out.cells[k] = static_cast<std::uint8_t>(v);
  }
  return out;
}

CostGrid fuse_spatial(const CostGrid& traversability, const CostGrid& directional) {
  if (traversability.spec != directional.spec) throw InputError("traversability and directional grids differ in spec");
  CostGrid out(traversability.spec, 0);
  for (std::size_t k = 0; k < out.cells.size(); ++k) {
    const std::uint8_t i = traversability.cells[k];
    const std::uint8_t d = directional.cells[k];
    out.cells[k] = i == kLethal ? kLethal : (d > 0 ? d : i);
  }
  return out;
}

CostGrid combine_directional(std::span<const CostGrid> layers, const GridSpec& spec) {
  CostGrid out(spec, 0);
  for (const auto& l : layers) {
    if (l.spec != spec) throw InputError("directional layers differ in spec");
    for (std::size_t k = 0; k < out.cells.size(); ++k) out.cells[k] = std::max(out.cells[k], l.cells[k]);
  }
  return out;
}

}  // namespace bcnav

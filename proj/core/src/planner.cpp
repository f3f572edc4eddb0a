#include "bcnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "bcnav/errors.hpp"

namespace bcnav {

void PlannerParams::validate() const {
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(replan_ratio >= 1.0)) throw InputError("replan_ratio must be at least 1");
  if (connectivity != 4 && connectivity != 8) throw InputError("connectivity must be 4 or 8");
}

std::vector<Vec2> Path::points(const GridSpec& spec) const {
  std::vector<Vec2> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(spec.center_of(c));
  return out;
}

double edge_cost(const GridSpec& spec, CellIndex from, CellIndex to, std::uint8_t cost) {
  const bool diagonal = from.i != to.i && from.j != to.j;
  const double step = diagonal ? spec.resolution * std::numbers::sqrt2 : spec.resolution;
  return step * (cost / 100.0);
}

namespace {

constexpr int kDi[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDj[8] = {0, 0, 1, -1, 1, -1, 1, -1};

bool passable(const CostGrid& g, CellIndex c) { return g.spec.contains(c) && g.at(c) != kLethal; }

bool legal_move(const CostGrid& g, CellIndex a, CellIndex b, const PlannerParams& p) {
  const int di = b.i - a.i;
  const int dj = b.j - a.j;
  if ((di == 0 && dj == 0) || std::abs(di) > 1 || std::abs(dj) > 1) return false;
  if (!passable(g, b)) return false;
  if (di != 0 && dj != 0) {
    if (p.connectivity == 4) return false;
    if (!p.corner_cutting && (!passable(g, {a.i + di, a.j}) || !passable(g, {a.i, a.j + dj}))) return false;
  }
  return true;
}

struct QueueEntry {
  double f;
  double h;
  std::size_t idx;
  bool operator>(const QueueEntry& o) const {
    if (f != o.f) return f > o.f;
    if (h != o.h) return h > o.h;
    return idx > o.idx;
  }
};

}  // namespace

Path astar_plan(const CostGrid& spat, const PlanRequest& req, const PlannerParams& params) {
  params.validate();
  const GridSpec& spec = spat.spec;
  const CellIndex start = spec.cell_of(req.start);
  const CellIndex goal = spec.cell_of(req.goal);
  if (!spec.contains(start)) throw InputError("start lies outside the grid");
  if (!spec.contains(goal)) throw InputError("goal lies outside the grid");
  if (spat.at(start) == kLethal) throw InputError("start cell is lethal");
  if (spat.at(goal) == kLethal) throw InputError("goal cell is lethal");

  int min_cost = 255;
  for (auto c : spat.cells) {
    if (c != kLethal) min_cost = std::min<int>(min_cost, c);
  }
  const double h_scale = params.lambda * spec.resolution * (min_cost / 100.0);
  auto heuristic = [&](CellIndex c) { return h_scale * std::hypot(c.i - goal.i, c.j - goal.j); };

  const std::size_t n = spec.size();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, n);
  std::vector<char> closed(n, 0);
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;

  const std::size_t s_idx = spec.index(start);
  const std::size_t g_idx = spec.index(goal);
  g[s_idx] = 0.0;
  open.push({heuristic(start), heuristic(start), s_idx});
  const int nbrs = params.connectivity == 8 ? 8 : 4;

  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    if (closed[top.idx]) continue;
    closed[top.idx] = 1;
    if (top.idx == g_idx) break;
    const CellIndex cur = spec.cell_at(top.idx);
    for (int k = 0; k < nbrs; ++k) {
      const CellIndex nb{cur.i + kDi[k], cur.j + kDj[k]};
      if (!legal_move(spat, cur, nb, params)) continue;
      const std::size_t ni = spec.index(nb);
      if (closed[ni]) continue;
      const double cand = g[top.idx] + edge_cost(spec, cur, nb, spat.at(nb));
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = top.idx;
        const double h = heuristic(nb);
        open.push({cand + h, h, ni});
      }
    }
  }
  if (!closed[g_idx]) throw NoPathError("goal is not reachable from start");

  Path path;
  for (std::size_t v = g_idx; v != n; v = parent[v]) path.cells.push_back(spec.cell_at(v));
  std::reverse(path.cells.begin(), path.cells.end());
  path.cost = g[g_idx];
  for (std::size_t k = 1; k < path.cells.size(); ++k) {
    const auto a = path.cells[k - 1];
    const auto b = path.cells[k];
    path.length_m += (a.i != b.i && a.j != b.j) ? spec.resolution * std::numbers::sqrt2 : spec.resolution;
  }
  return path;
}

double path_cost(const CostGrid& spat, std::span<const CellIndex> cells, const PlannerParams& params) {
  if (cells.empty()) return 0.0;
  if (!passable(spat, cells.front())) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t k = 1; k < cells.size(); ++k) {
    if (!legal_move(spat, cells[k - 1], cells[k], params)) return std::numeric_limits<double>::infinity();
    total += edge_cost(spat.spec, cells[k - 1], cells[k], spat.at(cells[k]));
  }
  return total;
}

CostGrid inflate_lethal(const CostGrid& grid, double radius, const CostGrid* sources, std::optional<Vec2> keep_clear) {
  const CostGrid& src = sources ? *sources : grid;
  if (src.spec != grid.spec) throw InputError("inflation source grid differs in spec");
  CostGrid out = grid;
  if (radius <= 0.0) return out;
  const GridSpec& spec = grid.spec;
  const int r = static_cast<int>(std::ceil(radius / spec.resolution));
  std::vector<std::pair<int, int>> offsets;
  for (int dj = -r; dj <= r; ++dj) {
    for (int di = -r; di <= r; ++di) {
      if (spec.resolution * std::hypot(di, dj) <= radius + 1e-9) offsets.emplace_back(di, dj);
    }
  }
  std::vector<char> exempt(spec.size(), 0);
  if (keep_clear) {
    for (std::size_t k = 0; k < spec.size(); ++k) {
      if (distance(spec.center_of(spec.cell_at(k)), *keep_clear) <= radius) exempt[k] = 1;
    }
  }
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (src.cells[k] != kLethal) continue;
    out.cells[k] = kLethal;
    const CellIndex c = spec.cell_at(k);
    for (auto [di, dj] : offsets) {
      const CellIndex nb{c.i + di, c.j + dj};
      if (!spec.contains(nb)) continue;
      const std::size_t ni = spec.index(nb);
      if (!exempt[ni]) out.cells[ni] = kLethal;
    }
  }
  return out;
}

void RobotKinematics::validate() const {
  if (!(v_min >= 0.0 && v_min < v_default && v_default <= v_max)) throw InputError("need 0 <= v_min < v_default <= v_max");
  if (!(accel > 0.0)) throw InputError("accel must be positive");
  if (!(radius >= 0.0)) throw InputError("radius must be non-negative");
  if (!(control_period > 0.0)) throw InputError("control period must be positive");
  if (!(turn_rate > 0.0)) throw InputError("turn rate must be positive");
}

double speed_limit_at(const KinematicGrid& kin, CellIndex cell, const RobotKinematics& k) {
  if (!kin.spec.contains(cell)) return k.v_default;
  const KinCell& c = kin.at(cell);
  if (!c.is_set) return k.v_default;
  return k.v_min + (c.value / 255.0) * (k.v_max - k.v_min);
}

void PathFollower::set_path(std::vector<Vec2> points) {
  path_ = std::move(points);
  next_ = path_.empty() ? 0 : 1;
  if (!path_.empty()) path_.front() = pose_.position();
}

std::span<const Vec2> PathFollower::remaining() const {
  if (finished()) return {};
  return std::span<const Vec2>(path_).subspan(next_);
}

double PathFollower::lookahead_limit(const KinematicGrid& kin, double dist) const {
  const double step = kin.spec.resolution * 0.5;
  double limit = speed_limit_at(kin, kin.spec.cell_of(pose_.position()), k_);
  Vec2 p = pose_.position();
  double left = dist;
  for (std::size_t v = next_; v < path_.size() && left > 0.0; ++v) {
    const Vec2 d = path_[v] - p;
    const double len = d.norm();
    const double run = std::min(len, left);
    if (len > 0.0) {
      for (double s = 0.0; s < run; s += step) limit = std::min(limit, speed_limit_at(kin, kin.spec.cell_of(p + d * (s / len)), k_));
      const Vec2 end = p + d * (run / len);
      limit = std::min(limit, speed_limit_at(kin, kin.spec.cell_of(end), k_));
    }
    left -= run;
    p = path_[v];
  }
  return limit;
}

TrajectoryPoint PathFollower::step(const KinematicGrid& kin, double t_next) {
  const double dt = k_.control_period;
  while (!finished() && distance(pose_.position(), path_[next_]) < 1e-12) ++next_;
  if (finished()) {
    speed_ = 0.0;
    return {t_next, pose_, 0.0};
  }

  const Vec2 d = path_[next_] - pose_.position();
  const double err = wrap_angle(std::atan2(d.y, d.x) - pose_.heading);
  if (std::abs(err) > k_.turn_threshold) {
    const double turn = std::clamp(err, -k_.turn_rate * dt, k_.turn_rate * dt);
    pose_.heading = wrap_angle(pose_.heading + turn);
    speed_ = 0.0;
    return {t_next, pose_, 0.0};
  }
  pose_.heading = std::atan2(d.y, d.x);

  const double ramp = std::min(speed_ + k_.accel * dt, k_.v_max);
  const double v = std::min(ramp, lookahead_limit(kin, ramp * dt));
  double travel = v * dt;
  Vec2 pos = pose_.position();
  while (travel > 0.0 && !finished()) {
    const Vec2 seg = path_[next_] - pos;
    const double len = seg.norm();
    if (travel < len) {
      pos = pos + seg * (travel / len);
      break;
    }
    pos = path_[next_];
    travel -= len;
    ++next_;
    if (finished()) break;
    const Vec2 out = path_[next_] - pos;
    if (out.norm() == 0.0) continue;
    const double turn = wrap_angle(std::atan2(out.y, out.x) - pose_.heading);
    if (std::abs(turn) > k_.turn_threshold) break;  // take the corner in place next period
    pose_.heading = std::atan2(out.y, out.x);
  }
  pose_.x = pos.x;
  pose_.y = pos.y;
  speed_ = v;
  return {t_next, pose_, v};
}

std::vector<TrajectoryPoint> follow_path(const Path& path, const KinematicGrid& kin, const RobotKinematics& k) {
  k.validate();
  if (path.empty()) throw InputError("cannot follow an empty path");
  auto pts = path.points(kin.spec);
  double heading = 0.0;
  for (std::size_t v = 1; v < pts.size(); ++v) {
    if (!(pts[v] == pts[0])) {
      heading = std::atan2(pts[v].y - pts[0].y, pts[v].x - pts[0].x);
      break;
    }
  }
  PathFollower f(k, {pts[0].x, pts[0].y, heading});
  f.set_path(pts);
  std::vector<TrajectoryPoint> out{{0.0, f.pose(), 0.0}};
  const std::size_t max_steps = 1000000;
  for (std::size_t s = 1; !f.finished() && s < max_steps; ++s) out.push_back(f.step(kin, s * k.control_period));
  return out;
}

nlohmann::json path_to_json(std::span<const Vec2> points) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Vec2& p : points) arr.push_back({p.x, p.y});
  return arr;
}

}  // namespace bcnav

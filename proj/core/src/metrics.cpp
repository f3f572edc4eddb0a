#include "bcnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bcnav/errors.hpp"

namespace bcnav {

namespace {

// Measure of {s in [0, 1] : o0 + (o1 - o0) s lies in (lo, hi)} (closed when `closed`).
double fraction_between(double o0, double o1, double lo, double hi, bool closed) {
  if (o0 == o1) {
    const bool in = closed ? (o0 >= lo && o0 <= hi) : (o0 > lo && o0 < hi);
    return in ? 1.0 : 0.0;
  }
  double s0 = (lo - o0) / (o1 - o0);
  double s1 = (hi - o0) / (o1 - o0);
  if (s0 > s1) std::swap(s0, s1);
  s0 = std::max(s0, 0.0);
  s1 = std::min(s1, 1.0);
  return s1 > s0 ? s1 - s0 : 0.0;
}

bool speed_ok(const RunRecord& run, Velocity v, double speed) {
  const auto& k = run.kinematics;
  switch (v) {
    case Velocity::Slow: return speed <= k.v_min + run.speed_tolerance;
    case Velocity::Fast: return speed >= k.v_max - run.speed_tolerance;
    case Velocity::Normal: return speed >= k.v_min && speed <= k.v_max;
    case Velocity::Unset: return true;
  }
  return true;
}

// Direction from the point `lookback` meters of travel earlier to traj[k];
// the start heading when the trajectory is shorter than that.
double approach_heading(const std::vector<TrajectoryPoint>& traj, std::size_t k, double lookback) {
  double travelled = 0.0;
  for (std::size_t m = k; m > 0; --m) {
    travelled += distance(traj[m].pose.position(), traj[m - 1].pose.position());
    if (travelled >= lookback) {
      const Vec2 d = traj[k].pose.position() - traj[m - 1].pose.position();
      return std::atan2(d.y, d.x);
    }
  }
  return traj.front().pose.heading;
}

}  // namespace

RegionStats region_stats(const RunRecord& run, const ActivationRegion& region) {
  RegionStats st;
  double speed_weight = 0.0;
  bool inside = false;
  double entry_heading = 0.0;
  const auto& traj = run.trajectory;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    if (traj[k - 1].t < region.active_from || traj[k - 1].t >= region.active_until) {
      inside = false;
      continue;
    }
    const Vec2 a = traj[k - 1].pose.position();
    const Vec2 b = traj[k].pose.position();
    const double seg_len = distance(a, b);
    const auto clip = clip_segment(a, b, region.region);
    if (seg_len == 0.0 || !clip || clip->second <= clip->first) {
      inside = inside && region.region.contains(b);
      continue;
    }
    if (!inside) entry_heading = approach_heading(traj, k - 1, run.approach_lookback);
    inside = region.region.contains(b);

    const Vec2 p0 = a + (b - a) * clip->first;
    const Vec2 p1 = a + (b - a) * clip->second;
    const double len = seg_len * (clip->second - clip->first);
    const double speed = traj[k].speed;
    st.in_length += len;
    speed_weight += len * speed;
    st.max_speed = std::max(st.max_speed, speed);

    double ok = 0.0;
    switch (region.field) {
      case ConstraintField::Direction: {
        const Vec2 right = right_of(snap_to_axis(entry_heading));
        const Vec2 c = region.object_box.center();
        const double o0 = dot(p0 - c, right);
        const double o1 = dot(p1 - c, right);
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (region.constraint.direction) {
          case Direction::Left: ok = len * fraction_between(o0, o1, -inf, 0.0, false); break;
          case Direction::Right: ok = len * fraction_between(o0, o1, 0.0, inf, false); break;
          case Direction::Middle: {
            const double w = std::abs(right.x) > 0.5 ? region.object_box.width() : region.object_box.height();
            ok = len * fraction_between(o0, o1, -w / 4.0, w / 4.0, true);
            break;
          }
          case Direction::Unset: ok = len; break;
        }
        break;
      }
      case ConstraintField::Velocity:
        ok = speed_ok(run, region.constraint.velocity, speed) ? len : 0.0;
        break;
      case ConstraintField::Traversability:
        if (region.constraint.traversability == Traversability::NonTraversable) {
          const double bad = length_inside_polygon(p0, p1, region.footprint);
          ok = bad > 0.0 ? std::max(0.0, len - bad) : len;
        } else {
          ok = len;
        }
        break;
    }
    st.compliant_length += ok;
  }
  st.mean_speed = st.in_length > 0.0 ? speed_weight / st.in_length : 0.0;
  return st;
}

double bfa(const RunRecord& run) {
  double total = 0.0;
  double ok = 0.0;
  for (const auto& r : run.activation_regions) {
    const auto st = region_stats(run, r);
    total += st.in_length;
    ok += st.compliant_length;
  }
  return total > 0.0 ? ok / total : 1.0;
}

bool evaluate_success(const RunRecord& run) {
  if (!run.reached) return false;
  for (const auto& p : run.trajectory) {
    const Vec2 q = p.pose.position();
    for (const auto& o : run.world.objects) {
      if (o.physically_solid && point_in_polygon(o.footprint, q)) return false;
    }
    for (const auto& poly : run.world.static_obstacles) {
      if (point_in_polygon(poly, q)) return false;
    }
  }
  return bfa(run) == 1.0;
}

std::vector<Vec2> trajectory_xy(const RunRecord& run) {
  std::vector<Vec2> out;
  out.reserve(run.trajectory.size());
  for (const auto& p : run.trajectory) out.push_back(p.pose.position());
  return out;
}

double executed_length(const RunRecord& run) { return polyline_length(trajectory_xy(run)); }

namespace {

double spl_term(const RunRecord& run) {
  if (!evaluate_success(run)) return 0.0;
  const double l = run.shortest_feasible_length;
  const double p = executed_length(run);
  const double denom = std::max(p, l);
  return denom > 0.0 ? l / denom : 1.0;
}

}  // namespace

double spl(std::span<const RunRecord> runs) {
  if (runs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : runs) sum += spl_term(r);
  return sum / static_cast<double>(runs.size());
}

double sr(std::span<const RunRecord> runs) {
  if (runs.empty()) return 0.0;
  const auto n = std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return evaluate_success(r); });
  return static_cast<double>(n) / static_cast<double>(runs.size());
}

double discrete_frechet(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) throw InputError("Frechet distance needs non-empty sequences");
  const std::size_t m = b.size();
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distance(a[i], b[j]);
      double best;
      if (i == 0 && j == 0) best = d;
      else if (i == 0) best = std::max(cur[j - 1], d);
      else if (j == 0) best = std::max(prev[0], d);
      else best = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

RunMetrics run_metrics(const RunRecord& run, const std::string& name, std::optional<std::span<const Vec2>> reference) {
  RunMetrics m;
  m.name = name;
  m.reached = run.reached;
  m.failure_reason = run.failure_reason;
  m.success = evaluate_success(run);
  m.executed_length = executed_length(run);
  m.shortest_length = run.shortest_feasible_length;
  m.spl_term = spl_term(run);
  m.bfa = bfa(run);
  if (reference && !reference->empty() && !run.trajectory.empty()) m.fd = discrete_frechet(trajectory_xy(run), *reference);
  return m;
}

MetricsSummary summarize(std::span<const RunMetrics> runs) {
  MetricsSummary s;
  s.per_run.assign(runs.begin(), runs.end());
  if (runs.empty()) return s;
  double succ = 0.0, spl_sum = 0.0, bfa_sum = 0.0, fd_sum = 0.0;
  std::size_t fd_n = 0;
  for (const auto& r : runs) {
    succ += r.success ? 1.0 : 0.0;
    spl_sum += r.spl_term;
    bfa_sum += r.bfa;
    if (r.fd) {
      fd_sum += *r.fd;
      ++fd_n;
    }
  }
  const double n = static_cast<double>(runs.size());
  s.sr = succ / n;
  s.spl = spl_sum / n;
  s.bfa = bfa_sum / n;
  if (fd_n > 0) s.fd = fd_sum / static_cast<double>(fd_n);
  return s;
}

nlohmann::json to_json(const MetricsSummary& m) {
  nlohmann::json j;
  j["sr"] = m.sr;
  j["spl"] = m.spl;
  j["fd"] = m.fd ? nlohmann::json(*m.fd) : nlohmann::json(nullptr);
  j["bfa"] = m.bfa;
  j["per_run"] = nlohmann::json::array();
  for (const auto& r : m.per_run) {
    j["per_run"].push_back({{"name", r.name},
                            {"success", r.success},
                            {"reached", r.reached},
                            {"failure_reason", r.failure_reason},
                            {"executed_length", r.executed_length},
                            {"shortest_length", r.shortest_length},
                            {"spl", r.spl_term},
                            {"bfa", r.bfa},
                            {"fd", r.fd ? nlohmann::json(*r.fd) : nlohmann::json(nullptr)}});
  }
  return j;
}

std::string metrics_csv_header() { return "label,sr,spl,fd,bfa"; }

std::string metrics_csv_row(const std::string& label, const MetricsSummary& m) {
  std::ostringstream os;
  os.precision(10);
  os << label << ',' << m.sr << ',' << m.spl << ',';
  if (m.fd) os << *m.fd;
  os << ',' << m.bfa;
  return os.str();
}

}  // namespace bcnav

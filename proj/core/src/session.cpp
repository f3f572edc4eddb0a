#include "bcnav/session.hpp"

#include <cmath>

#include "bcnav/errors.hpp"

namespace bcnav {

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Running: return "running";
    case RunStatus::Reached: return "reached";
    case RunStatus::Failed: return "failed";
  }
  return "running";
}

NavigationSession::NavigationSession(Scenario s, InstructionParser parser)
    : scenario_(std::move(s)),
      parser_(std::move(parser)),
      loop_(scenario_.world, scenario_.start_pose(), scenario_.goal, scenario_.config, scenario_.seed) {
  scenario_.validate();
  for (const auto& text : scenario_.offline_instructions) {
    ParseResult pr = parser_.parse({text, Scope::Offline, 0.0});
    offline_.insert(offline_.end(), pr.tuples.begin(), pr.tuples.end());
    record_.events.push_back({0.0, text, Scope::Offline, pr.tuples, pr.diagnostics});
  }
  merged_ = merge_constraints(offline_, online_, 0.0);

  record_.goal = scenario_.goal;
  record_.goal_tolerance = scenario_.goal_tolerance;
  record_.world = scenario_.world;
  record_.kinematics = scenario_.config.kinematics;
  record_.speed_tolerance = scenario_.config.speed_tolerance;
  record_.seed = scenario_.seed;
  record_.constraints = merged_;
  record_.activation_regions = activation_regions(scenario_.world, merged_, scenario_.config, 0.0);
  record_.shortest_feasible_length =
      shortest_feasible_length(scenario_.world, scenario_.start, scenario_.goal, scenario_.config);
  record_.trajectory.push_back({0.0, loop_.pose(), 0.0});
}

ParseResult NavigationSession::submit(const std::string& text) {
  ParseResult pr = parser_.parse({text, Scope::Online, time()});
  if (!finished()) queued_.push_back(text);
  return pr;
}

void NavigationSession::apply(const std::string& text, double t) {
  ParseResult pr = parser_.parse({text, Scope::Online, t});
  online_.insert(online_.end(), pr.tuples.begin(), pr.tuples.end());
  record_.events.push_back({t, text, Scope::Online, pr.tuples, pr.diagnostics});
}

void NavigationSession::apply_due_instructions(double t) {
  const std::size_t before = online_.size();
  while (next_scripted_ < scenario_.scripted_online.size() &&
         scenario_.scripted_online[next_scripted_].t <= t + 1e-9) {
    apply(scenario_.scripted_online[next_scripted_].text, t);
    ++next_scripted_;
  }
  while (!queued_.empty()) {
    apply(queued_.front(), t);
    queued_.pop_front();
  }
  if (online_.size() == before) return;
  ConstraintSet next = merge_constraints(offline_, online_, t);
  if (next == merged_) return;
  merged_ = std::move(next);
  for (auto& r : record_.activation_regions) r.active_until = std::min(r.active_until, t);
  auto fresh = activation_regions(scenario_.world, merged_, scenario_.config, t);
  record_.activation_regions.insert(record_.activation_regions.end(), fresh.begin(), fresh.end());
  record_.constraints = merged_;
}

void NavigationSession::finish(RunStatus s, std::string reason) {
  status_ = s;
  record_.reached = s == RunStatus::Reached;
  record_.failure_reason = std::move(reason);
  if (last_ && (snapshots_.empty() || snapshots_.back().cycle + 1 != cycle_))
    snapshots_.push_back({cycle_ - 1, last_->t, last_->layers});
}

bool NavigationSession::step() {
  if (finished()) return false;
  const double t = time();
  apply_due_instructions(t);

  last_ = loop_.cycle(merged_, t);
  const CycleResult& c = *last_;
  const double interval = scenario_.config.snapshot_interval;
  if (snapshots_.empty() || (interval > 0.0 && t + 1e-9 >= next_snapshot_t_)) {
    snapshots_.push_back({cycle_, t, c.layers});
    next_snapshot_t_ = t + interval;
  }
  record_.trajectory.push_back(c.next);
  ++cycle_;

  if (c.failure) {
    finish(RunStatus::Failed, *c.failure);
  } else if (distance(c.next.pose.position(), scenario_.goal) <= scenario_.goal_tolerance) {
    finish(RunStatus::Reached, "");
  } else if (time() >= scenario_.config.timeout - 1e-9) {
    finish(RunStatus::Failed, "timeout");
  }
  return !finished();
}

const RunRecord& NavigationSession::run_to_end() {
  while (step()) {
  }
  return record_;
}

RunRecord run_scenario(const Scenario& s, RunMode mode, InstructionParser parser) {
  if (mode == RunMode::Batch) {
    NavigationSession session(s, std::move(parser));
    return session.run_to_end();
  }
  Scenario unscripted = s;
  unscripted.scripted_online.clear();
  NavigationSession session(unscripted, std::move(parser));
  std::size_t next = 0;
  while (!session.finished()) {
    while (next < s.scripted_online.size() && s.scripted_online[next].t <= session.time() + 1e-9) {
      session.submit(s.scripted_online[next].text);
      ++next;
    }
    session.step();
  }
  return session.record();
}

}  // namespace bcnav

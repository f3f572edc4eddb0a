#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "bcnav/constraints.hpp"
#include "bcnav/metrics.hpp"
#include "bcnav/pipeline.hpp"
#include "bcnav/scenario.hpp"

namespace bcnav {

enum class RunMode { Batch, Interactive };

struct LayerSnapshot {
  std::size_t cycle = 0;
  double t = 0.0;
  LayerSet layers;
};

enum class RunStatus { Running, Reached, Failed };
std::string_view to_string(RunStatus s);

/// One run of a scenario, advanced one control period at a time. Scripted
/// online instructions and submitted ones both take effect at the first
/// cycle whose time is at or after their scheduled time, stamped with that
/// cycle's time, so a replayed timeline reproduces a scripted one exactly.
class NavigationSession {
 public:
  explicit NavigationSession(Scenario s, InstructionParser parser = {});

  /// Parses now for feedback; the instruction joins the constraint set at the next cycle.
  ParseResult submit(const std::string& text);
  /// One control cycle; false once the run has ended.
  bool step();
  const RunRecord& run_to_end();

  bool finished() const { return status_ != RunStatus::Running; }
  RunStatus status() const { return status_; }
  double time() const { return static_cast<double>(cycle_) * scenario_.config.kinematics.control_period; }
  std::size_t cycle() const { return cycle_; }
  const Scenario& scenario() const { return scenario_; }
  const RunRecord& record() const { return record_; }
  const ConstraintSet& constraints() const { return merged_; }
  const ControlLoop& loop() const { return loop_; }
  const std::optional<CycleResult>& last_cycle() const { return last_; }
  const std::vector<LayerSnapshot>& layer_snapshots() const { return snapshots_; }
  std::size_t pending_instructions() const { return queued_.size(); }

 private:
  void apply_due_instructions(double t);
  void apply(const std::string& text, double t);
  void finish(RunStatus s, std::string reason);

  Scenario scenario_;
  InstructionParser parser_;
  ControlLoop loop_;
  std::vector<ConstraintTuple> offline_;
  std::vector<ConstraintTuple> online_;
  ConstraintSet merged_;
  std::size_t next_scripted_ = 0;
  std::deque<std::string> queued_;
  std::size_t cycle_ = 0;
  RunStatus status_ = RunStatus::Running;
  RunRecord record_;
  std::optional<CycleResult> last_;
  std::vector<LayerSnapshot> snapshots_;
  double next_snapshot_t_ = 0.0;
};

/// Batch mode plays the scripted timeline. Interactive mode replays it
/// through submit(), the path the bridge uses.
RunRecord run_scenario(const Scenario& s, RunMode mode = RunMode::Batch, InstructionParser parser = {});

}  // namespace bcnav

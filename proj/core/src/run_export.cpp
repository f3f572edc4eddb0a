#include "bcnav/run_export.hpp"

#include <cstdio>
#include <fstream>

#include "bcnav/errors.hpp"

namespace bcnav {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const Scenario& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(s).dump())));
  return buf;
}

nlohmann::json events_json(const RunRecord& run) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : run.events) {
    nlohmann::json tuples = nlohmann::json::array();
    for (const auto& t : e.tuples) tuples.push_back(to_json(t));
    arr.push_back({{"t", e.t},
                   {"text", e.text},
                   {"scope", to_string(e.scope)},
                   {"tuples", tuples},
                   {"diagnostics", e.diagnostics}});
  }
  return arr;
}

nlohmann::json trajectory_json(const RunRecord& run) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : run.trajectory)
    pts.push_back({{"t", p.t}, {"x", p.pose.x}, {"y", p.pose.y}, {"heading", p.pose.heading}, {"speed", p.speed}});
  return {{"seed", run.seed},
          {"reached", run.reached},
          {"failure_reason", run.failure_reason},
          {"goal", {run.goal.x, run.goal.y}},
          {"points", pts},
          {"events", events_json(run)},
          {"constraints", to_json(run.constraints)}};
}

std::vector<std::string> write_layers(const LayerSet& layers, double t, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_pgm(dir / "layer.geo.pgm", layers.geo);
  write_pgm(dir / "layer.sem.pgm", layers.sem);
  write_pgm(dir / "layer.dir.pgm", layers.dir);
  write_pgm(dir / "layer.vel.pgm", layers.kin);
  write_pgm(dir / "layer.spat.pgm", layers.spat);
  write_pgm(dir / "layer.kin.pgm", layers.kin);
  write_pgm(dir / "layer.kin_set.pgm", layers.kin.spec, kin_mask(layers.kin));
  write_pgm(dir / "layer.plan.pgm", layers.plan);
  nlohmann::json meta = grid_metadata(layers.geo.spec);
  meta["t"] = t;
  write_text(dir / "grid.json", meta.dump(2) + "\n");
  return {"layer.geo.pgm", "layer.sem.pgm",     "layer.dir.pgm",  "layer.vel.pgm", "layer.spat.pgm",
          "layer.kin.pgm", "layer.kin_set.pgm", "layer.plan.pgm", "grid.json"};
}

std::vector<std::string> export_run(const NavigationSession& session, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const RunRecord& run = session.record();
  const Scenario& s = session.scenario();
  std::vector<std::string> files;

  write_text(out_dir / "trajectory.json", trajectory_json(run).dump(2) + "\n");
  files.push_back("trajectory.json");

  std::optional<std::span<const Vec2>> ref;
  if (s.reference_trajectory) ref = std::span<const Vec2>(*s.reference_trajectory);
  const RunMetrics m = run_metrics(run, s.name, ref);
  write_text(out_dir / "metrics.json", to_json(summarize(std::span<const RunMetrics>(&m, 1))).dump(2) + "\n");
  files.push_back("metrics.json");

  for (const auto& snap : session.layer_snapshots()) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu", snap.cycle);
    const std::string rel = std::string("layers/") + name;
    for (const auto& f : write_layers(snap.layers, snap.t, out_dir / rel)) files.push_back(rel + "/" + f);
  }

  files.push_back("manifest.json");
  nlohmann::json manifest = {{"name", s.name},
                             {"seed", s.seed},
                             {"config_hash", config_hash(s)},
                             {"params", to_json(s.config)},
                             {"status", to_string(session.status())},
                             {"files", files}};
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return files;
}

}  // namespace bcnav

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "bcnav/bridge.hpp"
#include "bcnav/bridge_ws.hpp"
#include "bcnav/errors.hpp"
#include "bcnav/run_export.hpp"
#include "bcnav/scenario.hpp"
#include "bcnav/session.hpp"
#include "render.hpp"

namespace fs = std::filesystem;
using namespace bcnav;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

Scenario prepared(const fs::path& path, std::optional<std::uint64_t> seed, const std::vector<std::string>& overrides) {
  Scenario s = load_scenario(path);
  if (s.name.empty()) s.name = path.stem().string();
  for (const auto& o : overrides) apply_override(s, o);
  if (seed) s.seed = *seed;
  return s;
}

void print_summary(const NavigationSession& session, std::ostream& os) {
  const RunRecord& r = session.record();
  std::optional<std::span<const Vec2>> ref;
  if (session.scenario().reference_trajectory) ref = std::span<const Vec2>(*session.scenario().reference_trajectory);
  const RunMetrics m = run_metrics(r, session.scenario().name, ref);
  os << session.scenario().name << ": " << to_string(session.status());
  if (!r.failure_reason.empty()) os << " (" << r.failure_reason << ")";
  os << "  t=" << session.time() << "s  length=" << m.executed_length << "m  success=" << (m.success ? "yes" : "no")
     << "  bfa=" << m.bfa << "  spl=" << m.spl_term;
  if (m.fd) os << "  fd=" << *m.fd;
  os << '\n';
}

int cmd_run(const fs::path& scenario_path, bool interactive, const std::string& out, std::optional<std::uint64_t> seed,
            const std::vector<std::string>& overrides, unsigned short port, double rate, double rtf) {
  Scenario s = prepared(scenario_path, seed, overrides);
  if (!interactive) {
    NavigationSession session(s);
    session.run_to_end();
    print_summary(session, std::cout);
    if (!out.empty()) export_run(session, out);
    return session.status() == RunStatus::Reached ? 0 : 2;
  }

  BridgeSession bridge(s);
  WebSocketBridgeServer server(bridge, {port, rate, rtf});
  server.start();
  std::cout << "bridge listening on ws://127.0.0.1:" << server.port() << "  (Ctrl-C to stop)\n" << std::flush;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  print_summary(bridge.session(), std::cout);
  if (!out.empty()) export_run(bridge.session(), out);
  return 0;
}

int cmd_batch(const fs::path& dir, const fs::path& out) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<RunMetrics> all;
  for (const auto& f : files) {
    Scenario s;
    try {
      s = prepared(f, std::nullopt, {});
    } catch (const ParseError&) {
      continue;  // not a scenario (e.g. a world file)
    }
    NavigationSession session(s);
    session.run_to_end();
    print_summary(session, std::cout);
    export_run(session, out / s.name);
    std::optional<std::span<const Vec2>> ref;
    if (s.reference_trajectory) ref = std::span<const Vec2>(*s.reference_trajectory);
    all.push_back(run_metrics(session.record(), s.name, ref));
  }
  const MetricsSummary sum = summarize(all);
  fs::create_directories(out);
  std::ofstream(out / "metrics.json") << to_json(sum).dump(2) << '\n';
  std::ofstream csv(out / "metrics.csv");
  csv << metrics_csv_header() << '\n' << metrics_csv_row("all", sum) << '\n';
  for (const auto& r : all) csv << metrics_csv_row(r.name, summarize(std::span<const RunMetrics>(&r, 1))) << '\n';
  std::cout << "SR=" << sum.sr << " SPL=" << sum.spl << " BFA=" << sum.bfa << '\n';
  return 0;
}

int cmd_sweep(const fs::path& scenario_path, const std::string& param, const std::string& values, const std::string& out) {
  std::vector<std::string> vals;
  std::stringstream ss(values);
  for (std::string v; std::getline(ss, v, ',');)
    if (!v.empty()) vals.push_back(v);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw IoError("cannot write " + out);
    os = &file;
  }
  *os << param << ',' << metrics_csv_header() << ",length\n";
  for (const auto& v : vals) {
    Scenario s = prepared(scenario_path, std::nullopt, {param + "=" + v});
    NavigationSession session(s);
    session.run_to_end();
    std::optional<std::span<const Vec2>> ref;
    if (s.reference_trajectory) ref = std::span<const Vec2>(*s.reference_trajectory);
    const RunMetrics m = run_metrics(session.record(), s.name, ref);
    *os << v << ',' << metrics_csv_row(s.name, summarize(std::span<const RunMetrics>(&m, 1))) << ','
        << m.executed_length << '\n';
  }
  return 0;
}

int cmd_parse(const std::string& text, bool online, double t) {
  const ParseResult r = parse_instruction({text, online ? Scope::Online : Scope::Offline, online ? t : 0.0});
  nlohmann::json j{{"tuples", nlohmann::json::array()}, {"diagnostics", r.diagnostics}};
  for (const auto& tup : r.tuples) j["tuples"].push_back(to_json(tup));
  std::cout << j.dump(2) << '\n';
  return r.tuples.empty() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior-constrained navigation: run scenarios, sweep parameters, render layers"};
  app.require_subcommand(1);

  std::string scenario, out, param, values, dir, text;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool interactive = false, online = false;
  unsigned short port = 8765;
  double rate = 10.0, rtf = 1.0, t_issue = 0.0;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_flag("--interactive", interactive, "Serve the live bridge over WebSocket");
  run->add_option("--out", out, "Export directory");
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--override", overrides, "Parameter override key=value (repeatable)");
  run->add_option("--port", port, "Bridge port (interactive)");
  run->add_option("--rate", rate, "Snapshot rate in Hz (interactive)");
  run->add_option("--rtf", rtf, "Simulated seconds per wall second (interactive)");

  auto* batch = app.add_subcommand("batch", "Run every scenario in a directory");
  batch->add_option("dir", dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  batch->add_option("--out", out, "Output directory")->required();

  auto* render = app.add_subcommand("render", "Render layer snapshots of a run directory to PNG");
  render->add_option("run_dir", dir, "Run directory written by run --out")->required()->check(CLI::ExistingDirectory);

  auto* sweep = app.add_subcommand("sweep", "Run a scenario across values of one parameter");
  sweep->add_option("--param", param, "Parameter name")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "CSV output file (default stdout)");

  auto* parse = app.add_subcommand("parse", "Parse one instruction and print its tuples");
  parse->add_option("text", text, "Instruction text")->required();
  parse->add_flag("--online", online, "Treat as an online instruction");
  parse->add_option("--t", t_issue, "Issue time for --online");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run)
      return cmd_run(scenario, interactive, out, seed_opt->count() ? std::optional(seed) : std::nullopt, overrides, port,
                     rate, rtf);
    if (*batch) return cmd_batch(dir, out);
    if (*render) {
      for (const auto& p : tools::render_run(dir)) std::cout << p.string() << '\n';
      return 0;
    }
    if (*sweep) return cmd_sweep(scenario, param, values, out);
    if (*parse) return cmd_parse(text, online, t_issue);
  } catch (const ParseError& e) {
    std::cerr << (e.pointer().empty() ? "parse error" : "parse error at ") << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

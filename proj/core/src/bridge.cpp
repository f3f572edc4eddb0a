#include "bcnav/bridge.hpp"

#include <array>

#include "bcnav/errors.hpp"

namespace bcnav {

using json = nlohmann::json;

std::string_view to_string(BridgeKind k) {
  switch (k) {
    case BridgeKind::StateSnapshot: return "state_snapshot";
    case BridgeKind::Instruction: return "instruction";
    case BridgeKind::Control: return "control";
    case BridgeKind::Ack: return "ack";
    case BridgeKind::Error: return "error";
  }
  return "error";
}

std::optional<BridgeKind> bridge_kind_from_string(std::string_view s) {
  for (auto k : {BridgeKind::StateSnapshot, BridgeKind::Instruction, BridgeKind::Control, BridgeKind::Ack,
                 BridgeKind::Error}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string encode(const BridgeMessage& m) {
  return json{{"kind", to_string(m.kind)}, {"payload", m.payload}}.dump();
}

BridgeMessage decode(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("", "expected a message object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw ParseError("/kind", "expected a string");
  const auto kind = bridge_kind_from_string(j["kind"].get<std::string>());
  if (!kind) throw ParseError("/kind", "unknown message kind");
  BridgeMessage m{*kind, json::object()};
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) throw ParseError("/payload", "expected an object");
    m.payload = j["payload"];
  }
  return m;
}

namespace {

constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

BridgeMessage error_message(const std::string& message, const std::string& pointer = "") {
  return {BridgeKind::Error, {{"message", message}, {"pointer", pointer}}};
}

json tuple_list(const std::vector<ConstraintTuple>& tuples) {
  json arr = json::array();
  for (const auto& t : tuples) arr.push_back(to_json(t));
  return arr;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += kB64[v & 63];
  }
  if (i < bytes.size()) {
    std::uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kB64[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::array<int, 256> rev;
  rev.fill(-1);
  for (int k = 0; k < 64; ++k) rev[static_cast<unsigned char>(kB64[k])] = k;
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    const int v = rev[static_cast<unsigned char>(c)];
    if (v < 0) throw InputError("invalid base64");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

const std::vector<std::string>& bridge_layer_names() {
  static const std::vector<std::string> names = {"geo", "sem", "dir", "vel", "spat", "kin", "kin_set", "plan"};
  return names;
}

BridgeSession::BridgeSession(Scenario s, InstructionParser parser)
    : scenario_(std::move(s)), parser_(std::move(parser)), session_(std::make_unique<NavigationSession>(scenario_, parser_)) {}

bool BridgeSession::paused() const {
  std::lock_guard lock(mu_);
  return paused_;
}

bool BridgeSession::finished() const {
  std::lock_guard lock(mu_);
  return session_->finished();
}

double BridgeSession::sim_time() const {
  std::lock_guard lock(mu_);
  return session_->time();
}

void BridgeSession::advance(double sim_seconds) {
  std::lock_guard lock(mu_);
  if (paused_ || session_->finished()) return;
  const double dt = scenario_.config.kinematics.control_period;
  budget_ += sim_seconds;
  while (budget_ + 1e-9 >= dt && !session_->finished()) {
    session_->step();
    budget_ -= dt;
  }
  if (session_->finished()) budget_ = 0.0;
}

BridgeMessage BridgeSession::control(const json& payload) {
  if (!payload.contains("action") || !payload["action"].is_string())
    return error_message("control needs an action", "/payload/action");
  const std::string action = payload["action"].get<std::string>();
  if (action == "pause") {
    paused_ = true;
  } else if (action == "resume") {
    paused_ = false;
  } else if (action == "reset") {
    session_ = std::make_unique<NavigationSession>(scenario_, parser_);
    paused_ = false;
    budget_ = 0.0;
    ++epoch_;
  } else if (action == "layers") {
    if (!payload.contains("layers") || !payload["layers"].is_array())
      return error_message("layers action needs a list of layer names", "/payload/layers");
    std::set<std::string> wanted;
    for (const auto& l : payload["layers"]) {
      const auto& names = bridge_layer_names();
      if (!l.is_string() || std::find(names.begin(), names.end(), l.get<std::string>()) == names.end())
        return error_message("unknown layer name", "/payload/layers");
      wanted.insert(l.get<std::string>());
    }
    layers_ = std::move(wanted);
  } else {
    return error_message("unknown control action '" + action + "'", "/payload/action");
  }
  return {BridgeKind::Ack, {{"action", action}, {"paused", paused_}, {"epoch", epoch_}}};
}

std::vector<BridgeMessage> BridgeSession::handle(std::string_view text) {
  BridgeMessage in;
  try {
    in = decode(text);
  } catch (const ParseError& e) {
    return {error_message(e.what(), e.pointer())};
  }
  std::lock_guard lock(mu_);
  switch (in.kind) {
    case BridgeKind::Instruction: {
      if (!in.payload.contains("text") || !in.payload["text"].is_string())
        return {error_message("instruction needs text", "/payload/text")};
      const std::string instr = in.payload["text"].get<std::string>();
      if (session_->finished()) return {error_message("run has ended; reset to continue")};
      try {
        const ParseResult pr = session_->submit(instr);
        return {{BridgeKind::Ack,
                 {{"text", instr},
                  {"tuples", tuple_list(pr.tuples)},
                  {"diagnostics", pr.diagnostics},
                  {"used_fallback", pr.used_fallback},
                  {"applies_at", session_->time()},
                  {"queued", paused_}}}};
      } catch (const InputError& e) {
        return {error_message(e.what(), "/payload/text")};
      }
    }
    case BridgeKind::Control: return {control(in.payload)};
    default: return {error_message("clients may send only instruction and control messages", "/kind")};
  }
}

BridgeMessage BridgeSession::snapshot() {
  std::lock_guard lock(mu_);
  const NavigationSession& s = *session_;
  const RunRecord& rec = s.record();
  const Pose2 pose = rec.trajectory.back().pose;

  json trail = json::array();
  for (const auto& p : rec.trajectory) trail.push_back({p.pose.x, p.pose.y});
  json active = json::array();
  for (const auto& a : s.constraints().active_all()) {
    json j{{"object", a.label}};
    if (a.direction != Direction::Unset) j["direction"] = to_string(a.direction);
    if (a.velocity != Velocity::Unset) j["velocity"] = to_string(a.velocity);
    if (a.traversability != Traversability::Unset) j["traversability"] = to_string(a.traversability);
    active.push_back(std::move(j));
  }

  json payload{{"seq", ++seq_},
               {"epoch", epoch_},
               {"sim_time", s.time()},
               {"pose", {{"x", pose.x}, {"y", pose.y}, {"heading", pose.heading}}},
               {"speed", rec.trajectory.back().speed},
               {"path", path_to_json(s.loop().remaining_path())},
               {"trail", trail},
               {"active_constraints", active},
               {"status", to_string(s.status())},
               {"failure_reason", rec.failure_reason},
               {"paused", paused_},
               {"pending_instructions", s.pending_instructions()},
               {"grid", grid_metadata(scenario_.config.grid)}};

  json layers = json::object();
  if (!layers_.empty() && s.last_cycle()) {
    const LayerSet& L = s.last_cycle()->layers;
    std::vector<std::uint8_t> kin_values(L.kin.cells.size());
    for (std::size_t k = 0; k < kin_values.size(); ++k) kin_values[k] = L.kin.cells[k].is_set ? L.kin.cells[k].value : 0;
    const auto mask = kin_mask(L.kin);
    for (const auto& name : layers_) {
      std::span<const std::uint8_t> cells;
      if (name == "geo") cells = L.geo.cells;
      else if (name == "sem") cells = L.sem.cells;
      else if (name == "dir") cells = L.dir.cells;
      else if (name == "spat") cells = L.spat.cells;
      else if (name == "plan") cells = L.plan.cells;
      else if (name == "kin_set") cells = mask;
      else cells = kin_values;
      layers[name] = {{"encoding", "base64"}, {"data", base64_encode(cells)}};
    }
    payload["layer_time"] = s.last_cycle()->t;
  }
  payload["layers"] = layers;
  return {BridgeKind::StateSnapshot, payload};
}

}  // namespace bcnav

#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcnav/session.hpp"

namespace bcnav {

enum class BridgeKind { StateSnapshot, Instruction, Control, Ack, Error };

std::string_view to_string(BridgeKind k);
std::optional<BridgeKind> bridge_kind_from_string(std::string_view s);

struct BridgeMessage {
  BridgeKind kind = BridgeKind::Ack;
  nlohmann::json payload = nlohmann::json::object();
};

std::string encode(const BridgeMessage& m);
/// Throws ParseError on malformed JSON or an unknown kind.
BridgeMessage decode(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Layer names accepted by the "layers" control action.
const std::vector<std::string>& bridge_layer_names();

/// Transport-agnostic interactive driver: routes client messages into a
/// NavigationSession and produces snapshots. Thread-safe.
class BridgeSession {
 public:
  explicit BridgeSession(Scenario s, InstructionParser parser = {});

  /// Replies for one inbound text frame. Malformed input yields a single
  /// error message and leaves the session untouched.
  std::vector<BridgeMessage> handle(std::string_view text);
  /// Runs whole control cycles covering `sim_seconds`, unless paused or finished.
  void advance(double sim_seconds);
  BridgeMessage snapshot();

  bool paused() const;
  bool finished() const;
  double sim_time() const;
  /// Completed session for export; valid while no other thread drives the bridge.
  const NavigationSession& session() const { return *session_; }

 private:
  BridgeMessage control(const nlohmann::json& payload);

  mutable std::mutex mu_;
  Scenario scenario_;
  InstructionParser parser_;
  std::unique_ptr<NavigationSession> session_;
  bool paused_ = false;
  double budget_ = 0.0;
  std::uint64_t seq_ = 0;
  std::uint64_t epoch_ = 0;
  std::set<std::string> layers_;
};

}  // namespace bcnav

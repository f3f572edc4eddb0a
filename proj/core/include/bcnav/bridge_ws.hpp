#pragma once

#include <memory>

#include "bcnav/bridge.hpp"

namespace bcnav {

/// WebSocket transport for a BridgeSession. One text frame per message.
/// Snapshots go to every connected client; replies go to the sender.
class WebSocketBridgeServer {
 public:
  struct Options {
    unsigned short port = 8765;  // 0 picks a free port
    double snapshot_hz = 10.0;
    double real_time_factor = 1.0;  // simulated seconds per wall second
  };

  WebSocketBridgeServer(BridgeSession& session, Options opts);
  ~WebSocketBridgeServer();
  WebSocketBridgeServer(const WebSocketBridgeServer&) = delete;
  WebSocketBridgeServer& operator=(const WebSocketBridgeServer&) = delete;

  /// Binds and starts the network thread.
  void start();
  void stop();
  unsigned short port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bcnav

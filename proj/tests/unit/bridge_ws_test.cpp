#include <gtest/gtest.h>

#include <filesystem>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "bcnav/bridge_ws.hpp"
#include "bcnav/scenario.hpp"

using namespace bcnav;
namespace asio = boost::asio;
namespace beast = boost::beast;
using tcp = asio::ip::tcp;

TEST(WebSocketBridge, InstructionAckThenSnapshots) {
  Scenario s = load_scenario(std::filesystem::path(BCNAV_SCENARIO_DIR) / "car_side_flip.json");
  s.offline_instructions.clear();
  s.scripted_online.clear();
  BridgeSession session(s);
  // 20 ticks a second at 4x real time: one control period per tick.
  WebSocketBridgeServer server(session, {0, 20.0, 4.0});
  server.start();
  ASSERT_NE(server.port(), 0);

  asio::io_context io;
  tcp::socket sock(io);
  sock.connect({asio::ip::make_address("127.0.0.1"), server.port()});
  beast::websocket::stream<tcp::socket> ws(std::move(sock));
  ws.handshake("127.0.0.1", "/");
  ws.text(true);
  ws.write(asio::buffer(encode({BridgeKind::Instruction, {{"text", "slow down near the car"}}})));

  bool acked = false;
  int snapshots = 0;
  double last_t = -1.0;
  for (int n = 0; n < 200 && (!acked || snapshots < 3 || last_t <= 0.0); ++n) {
    beast::flat_buffer buf;
    ws.read(buf);
    const BridgeMessage m = decode(beast::buffers_to_string(buf.data()));
    if (m.kind == BridgeKind::Ack) {
      acked = true;
      ASSERT_EQ(m.payload["tuples"].size(), 1u);
      EXPECT_EQ(m.payload["tuples"][0]["velocity"], "slow");
    } else if (m.kind == BridgeKind::StateSnapshot) {
      ++snapshots;
      const double t = m.payload["sim_time"];
      EXPECT_GE(t, last_t);
      last_t = t;
    } else {
      ADD_FAILURE() << encode(m);
    }
  }
  EXPECT_TRUE(acked);
  EXPECT_GE(snapshots, 3);

  ws.write(asio::buffer(std::string("{garbage")));
  bool errored = false;
  for (int n = 0; n < 50 && !errored; ++n) {
    beast::flat_buffer buf;
    ws.read(buf);
    errored = decode(beast::buffers_to_string(buf.data())).kind == BridgeKind::Error;
  }
  EXPECT_TRUE(errored);

  beast::error_code ec;
  ws.close(beast::websocket::close_code::normal, ec);
  server.stop();
  EXPECT_GT(session.sim_time(), 0.0);
}

TEST(WebSocketBridge, BusyPortThrows) {
  Scenario s = load_scenario(std::filesystem::path(BCNAV_SCENARIO_DIR) / "empty_straight.json");
  BridgeSession a(s), b(s);
  WebSocketBridgeServer first(a, {0, 10.0, 1.0});
  first.start();
  asio::io_context io;
  tcp::acceptor hog(io, {asio::ip::make_address("127.0.0.1"), 0});
  WebSocketBridgeServer second(b, {hog.local_endpoint().port(), 10.0, 1.0});
  EXPECT_ANY_THROW(second.start());
  first.stop();
}

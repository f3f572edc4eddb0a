#include "bcnav/bridge_ws.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <iostream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "bcnav/errors.hpp"

namespace bcnav {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Client : public std::enable_shared_from_this<Client> {
 public:
  Client(tcp::socket sock, BridgeSession& session) : ws_(std::move(sock)), session_(session) {}

  void start() {
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->open_ = true;
      self->read();
    });
  }

  void send(std::string text) {
    if (!open_) return;
    out_.push_back(std::move(text));
    if (out_.size() == 1) write();
  }

  bool closed() const { return closed_; }

  void close() {
    if (!open_ || closed_) return;
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        return;
      }
      const std::string text = beast::buffers_to_string(self->buf_.data());
      self->buf_.consume(self->buf_.size());
      for (const auto& reply : self->session_.handle(text)) self->send(encode(reply));
      self->read();
    });
  }

  void write() {
    ws_.async_write(asio::buffer(out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->out_.clear();
        return;
      }
      self->out_.pop_front();
      if (!self->out_.empty()) self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  BridgeSession& session_;
  beast::flat_buffer buf_;
  std::deque<std::string> out_;
  bool open_ = false;
  bool closed_ = false;
};

}  // namespace

struct WebSocketBridgeServer::Impl {
  Impl(BridgeSession& s, Options o) : session(s), opts(o), acceptor(io), timer(io) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket sock) {
      if (ec) return;
      auto c = std::make_shared<Client>(std::move(sock), session);
      clients.push_back(c);
      c->start();
      accept();
    });
  }

  void tick() {
    const auto period = std::chrono::duration<double>(1.0 / opts.snapshot_hz);
    timer.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(period));
    timer.async_wait([this, period](beast::error_code ec) {
      if (ec) return;
      session.advance(period.count() * opts.real_time_factor);
      const std::string snap = encode(session.snapshot());
      std::erase_if(clients, [](const auto& c) { return c->closed(); });
      for (auto& c : clients) c->send(snap);
      tick();
    });
  }

  BridgeSession& session;
  Options opts;
  asio::io_context io;
  tcp::acceptor acceptor;
  asio::steady_timer timer;
  std::vector<std::shared_ptr<Client>> clients;
  std::thread thread;
  std::atomic<bool> running{false};
  unsigned short bound_port = 0;
};

WebSocketBridgeServer::WebSocketBridgeServer(BridgeSession& session, Options opts)
    : impl_(std::make_unique<Impl>(session, opts)) {
  if (!(opts.snapshot_hz > 0.0)) throw InputError("snapshot rate must be positive");
  if (!(opts.real_time_factor >= 0.0)) throw InputError("real-time factor must be non-negative");
}

WebSocketBridgeServer::~WebSocketBridgeServer() { stop(); }

void WebSocketBridgeServer::start() {
  if (impl_->running) return;
  beast::error_code ec;
  const tcp::endpoint ep(asio::ip::make_address("127.0.0.1"), impl_->opts.port);
  impl_->acceptor.open(ep.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(ep, ec);
  if (!ec) impl_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw IoError("cannot listen on port " + std::to_string(impl_->opts.port) + ": " + ec.message());
  impl_->bound_port = impl_->acceptor.local_endpoint().port();
  impl_->running = true;
  impl_->accept();
  impl_->tick();
  impl_->thread = std::thread([this] { impl_->io.run(); });
}

void WebSocketBridgeServer::stop() {
  if (!impl_ || !impl_->running.exchange(false)) return;
  asio::post(impl_->io, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    impl_->timer.cancel();
    for (auto& c : impl_->clients) c->close();
    impl_->clients.clear();
    impl_->io.stop();
  });
  impl_->thread.join();
}

unsigned short WebSocketBridgeServer::port() const { return impl_->bound_port; }

}  // namespace bcnav

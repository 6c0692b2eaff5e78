#include "arcade/gateway/ws.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core/buffers_to_string.hpp>
#include <boost/beast/websocket.hpp>

namespace arcade::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

WsConnection::WsConnection(WsStream stream) : ws_(std::move(stream)) { ws_.text(true); }

void WsConnection::start(MessageHandler on_message, CloseHandler on_close) {
  on_message_ = std::move(on_message);
  on_close_ = std::move(on_close);
  asio::post(ws_.get_executor(), [self = shared_from_this()] { self->read_next(); });
}

void WsConnection::read_next() {
  ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      self->finish();
      return;
    }
    auto text = beast::buffers_to_string(self->buffer_.data());
    self->buffer_.consume(self->buffer_.size());
    if (self->on_message_) self->on_message_(std::move(text));
    self->read_next();
  });
}

void WsConnection::send(std::string text) {
  asio::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
    if (!self->open_ || self->closing_) return;
    self->outbox_.push_back(std::move(text));
    if (self->outbox_.size() == 1) self->write_next();
  });
}

void WsConnection::write_next() {
  ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      self->finish();
      return;
    }
    self->outbox_.pop_front();
    if (!self->outbox_.empty()) {
      self->write_next();
    } else if (self->closing_) {
      self->ws_.async_close(websocket::close_code::normal, [self](beast::error_code) { self->finish(); });
    }
  });
}

void WsConnection::close() {
  asio::post(ws_.get_executor(), [self = shared_from_this()] {
    if (!self->open_ || self->closing_) return;
    self->closing_ = true;
    if (self->outbox_.empty()) {
      self->ws_.async_close(websocket::close_code::normal, [self](beast::error_code) { self->finish(); });
    }
  });
}

void WsConnection::finish() {
  if (!open_.exchange(false)) return;
  beast::error_code ignored;
  beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ignored);
  beast::get_lowest_layer(ws_).socket().close(ignored);
  outbox_.clear();
  if (on_close_) on_close_();
  on_message_ = nullptr;
  on_close_ = nullptr;
}

// --- WsClient ---------------------------------------------------------------------------

WsClient::WsClient(const std::string& host, unsigned short port, const std::string& target) {
  tcp::resolver resolver(ioc_);
  WsStream ws(ioc_);
  beast::get_lowest_layer(ws).connect(resolver.resolve(host, std::to_string(port)));
  ws.handshake(host + ":" + std::to_string(port), target);
  conn_ = std::make_shared<WsConnection>(std::move(ws));
  conn_->start(
      [this](std::string text) {
        std::lock_guard lock(mutex_);
        inbox_.push_back(std::move(text));
        cv_.notify_all();
      },
      [this] {
        std::lock_guard lock(mutex_);
        closed_ = true;
        cv_.notify_all();
      });
  thread_ = std::thread([this] { ioc_.run(); });
}

WsClient::~WsClient() {
  close();
  {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, std::chrono::seconds(2), [this] { return closed_; });
  }
  ioc_.stop();
  thread_.join();
}

void WsClient::send(std::string text) { conn_->send(std::move(text)); }

std::optional<std::string> WsClient::receive(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  cv_.wait_for(lock, timeout, [this] { return !inbox_.empty() || closed_; });
  if (inbox_.empty()) return std::nullopt;
  auto text = std::move(inbox_.front());
  inbox_.pop_front();
  return text;
}

bool WsClient::is_open() const {
  std::lock_guard lock(mutex_);
  return !closed_;
}

void WsClient::close() { conn_->close(); }

}  // namespace arcade::gateway

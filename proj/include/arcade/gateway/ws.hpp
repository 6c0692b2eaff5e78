#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <boost/asio/io_context.hpp>
#include <boost/beast/core/flat_buffer.hpp>
#include <boost/beast/core/tcp_stream.hpp>
#include <boost/beast/websocket/stream.hpp>

namespace arcade::gateway {

using WsStream = boost::beast::websocket::stream<boost::beast::tcp_stream>;

/// One WebSocket peer. All socket work happens on the stream's executor; send() and close()
/// may be called from any thread. Text messages only.
class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  using MessageHandler = std::function<void(std::string)>;
  using CloseHandler = std::function<void()>;

  explicit WsConnection(WsStream stream);

  /// Starts reading. Handlers run on the executor and must not block.
  void start(MessageHandler on_message, CloseHandler on_close);
  void send(std::string text);
  /// Closes once queued messages have been written.
  void close();
  bool is_open() const { return open_; }

 private:
  void read_next();
  void write_next();
  void finish();

  WsStream ws_;
  boost::beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  bool closing_ = false;
  std::atomic<bool> open_{true};
  MessageHandler on_message_;
  CloseHandler on_close_;
};

/// Blocking client used by adapters, observers and tests: messages are queued as they arrive
/// and taken with receive().
class WsClient {
 public:
  /// Connects and completes the handshake; throws boost::system::system_error on failure.
  WsClient(const std::string& host, unsigned short port, const std::string& target = "/");
  ~WsClient();

  WsClient(const WsClient&) = delete;
  WsClient& operator=(const WsClient&) = delete;

  void send(std::string text);
  /// Next message, or nullopt once `timeout` passes or the connection has closed and drained.
  std::optional<std::string> receive(std::chrono::milliseconds timeout = std::chrono::seconds(5));
  bool is_open() const;
  void close();

 private:
  boost::asio::io_context ioc_;
  std::shared_ptr<WsConnection> conn_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> inbox_;
  bool closed_ = false;
  std::thread thread_;
};

}  // namespace arcade::gateway

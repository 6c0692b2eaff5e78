#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "arcade/env/environment.hpp"
#include "arcade/gateway/ws.hpp"

namespace arcade::gateway {

/// Reference adapter: serves a local environment to a gateway over the adapter protocol,
/// exactly as an out-of-process emulator bridge would.
class LoopbackAdapter {
 public:
  /// Connects and completes the hello exchange before returning. `game_id` defaults to the
  /// environment's own id.
  LoopbackAdapter(std::unique_ptr<env::Environment> env, const std::string& host, unsigned short port,
                  std::string game_id = {});
  ~LoopbackAdapter();

  LoopbackAdapter(const LoopbackAdapter&) = delete;
  LoopbackAdapter& operator=(const LoopbackAdapter&) = delete;

  /// Stop answering requests, as a hung emulator would.
  void set_silent(bool silent) { silent_ = silent; }
  /// Whether the gateway last asked for the emulator to be held.
  bool paused() const { return paused_; }
  std::uint64_t requests_served() const { return served_; }
  const env::Environment& environment() const { return *env_; }

 private:
  void serve();
  void handle(const std::string& text);

  std::unique_ptr<env::Environment> env_;
  std::string game_id_;
  WsClient client_;
  std::atomic<bool> silent_{false};
  std::atomic<bool> paused_{false};
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> served_{0};
  std::uint64_t step_ = 0;
  std::int64_t game_time_ms_ = 0;
  std::optional<Frame> last_sent_;
  std::thread thread_;
};

}  // namespace arcade::gateway

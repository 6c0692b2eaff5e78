#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "arcade/checkpoint/pack.hpp"
#include "arcade/env/driver.hpp"
#include "arcade/gateway/remote_env.hpp"

namespace arcade::gateway {

class BindFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GameEntry {
  /// Empty for games only an adapter can serve.
  std::function<std::unique_ptr<env::Environment>()> make;
  /// Scores frames when set; otherwise the game's native progress is reported.
  std::shared_ptr<const checkpoint::CheckpointPack> pack;
};

struct GatewayOptions {
  std::string host = "127.0.0.1";
  unsigned short port = 0;  // 0 picks a free port
  /// Humans play in Lite mode unless this is set and their hello asks for realtime.
  bool allow_realtime_humans = false;
  /// Observation after each agent action; humans always get the single latest frame.
  env::ObservationPolicy agent_policy{1, 0, 0};
  std::chrono::milliseconds adapter_deadline = kDefaultAdapterDeadline;
  /// How often realtime sessions push the current frame between actions.
  std::chrono::milliseconds realtime_frame_interval{100};
};

/// WebSocket service for controllers (agents, humans), observers and emulator adapters.
/// Each session owns one environment driven by a single writer; observers receive every
/// frame the controller does.
class Gateway {
 public:
  explicit Gateway(GatewayOptions options = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  void register_game(const std::string& id, GameEntry entry);
  void register_practice_games();

  /// Binds and starts serving on a background thread. Throws BindFailure, or
  /// std::logic_error when no game is registered.
  void start();
  void stop();
  unsigned short port() const;

  /// Blocks until an adapter serving `game_id` has said hello, or the timeout passes.
  std::shared_ptr<AdapterLink> wait_for_adapter(const std::string& game_id, std::chrono::milliseconds timeout);
  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Parses "host:port". Throws std::invalid_argument.
std::pair<std::string, unsigned short> parse_bind_address(const std::string& text);

}  // namespace arcade::gateway

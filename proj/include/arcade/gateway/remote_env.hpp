#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "arcade/env/environment.hpp"
#include "arcade/gateway/protocol.hpp"

namespace arcade::gateway {

inline constexpr std::chrono::milliseconds kDefaultAdapterDeadline{5000};

/// The adapter did not answer within the deadline, or went away.
class AdapterTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What an adapter declared in its hello.
struct AdapterInfo {
  std::string game_id;
  action::SurfaceBounds bounds = action::kDesktopSurface;
  std::vector<std::string> capabilities;
};

/// Gateway side of one adapter connection: numbered requests and their replies.
class AdapterLink {
 public:
  AdapterLink(AdapterInfo info, std::function<void(std::string)> send,
              std::chrono::milliseconds deadline = kDefaultAdapterDeadline);

  const AdapterInfo& info() const { return info_; }

  /// Sends `message` with a fresh "seq" and waits for the frame or error carrying it.
  json request(json message);
  /// Sends without waiting for a reply.
  void notify(const json& message);
  /// Called with every message the adapter sends after its hello.
  void deliver(json message);
  /// Fails current and future requests.
  void disconnect();
  bool connected() const;

 private:
  AdapterInfo info_;
  std::function<void(std::string)> send_;
  std::chrono::milliseconds deadline_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::uint64_t next_seq_ = 1;
  std::map<std::uint64_t, json> replies_;
  bool connected_ = true;
};

/// Presents a remote emulator as a local Environment. Every call is forwarded to the adapter;
/// snapshot() returns the frame from the adapter's latest reply.
class RemoteEnvironment final : public env::Environment {
 public:
  /// In Lite mode the adapter is told to hold its emulator between requests.
  RemoteEnvironment(std::shared_ptr<AdapterLink> link, bool lite);

  std::string game_id() const override { return link_->info().game_id; }
  Frame reset(std::uint64_t seed) override;
  void apply(const action::ActionCommand& command) override;
  void press(const env::HeldInputs& inputs) override;
  void release() override;
  void advance(std::int64_t dt_ms) override;
  Frame snapshot() const override;
  action::SurfaceBounds surface_bounds() const override { return link_->info().bounds; }
  env::EnvStatus status() const override { return status_; }
  std::optional<double> native_progress() const override { return progress_; }

 private:
  void exchange(json message);

  std::shared_ptr<AdapterLink> link_;
  std::optional<Frame> frame_;
  env::EnvStatus status_;
  std::optional<double> progress_;
};

}  // namespace arcade::gateway

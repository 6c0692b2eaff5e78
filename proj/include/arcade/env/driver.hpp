#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "arcade/action/command.hpp"
#include "arcade/env/clock.hpp"
#include "arcade/env/environment.hpp"

namespace arcade::env {

struct ObservationPolicy {
  int frames_per_observation = 1;
  std::int64_t frame_spacing_ms = 0;
  std::int64_t post_action_delay_ms = 500;

  bool operator==(const ObservationPolicy&) const = default;
};

/// Throws std::invalid_argument unless all fields are non-negative and frames >= 1.
void validate(const ObservationPolicy& policy);

/// A timed part of a command: the inputs held and for how long.
struct Segment {
  HeldInputs inputs;
  std::int64_t duration_ms = 0;
};

/// Splits a command into its timed segments (one per chord; one for a hold). Pointer and text
/// commands have none.
std::vector<Segment> segments_of(const action::ActionCommand& command);

std::int64_t seconds_to_ms(double seconds);

/// Lockstep execution: apply, then for each segment press, advance the clock by its duration,
/// release. Game time moves by exactly the command's total duration.
void execute(Environment& env, GameClock& clock, const action::ActionCommand& command);

/// Lockstep observation: advance by the post-action delay, then capture frames spaced apart.
std::vector<Frame> observe(Environment& env, GameClock& clock, const ObservationPolicy& policy);

/// Drives an environment on its own timeline at tick granularity. Submitted commands are
/// queued and applied in arrival order at tick boundaries; a command's segments run to
/// completion before the next command starts.
class RealtimeTicker {
 public:
  RealtimeTicker(Environment& env, GameClock& clock, TimeSource& time);
  ~RealtimeTicker();

  RealtimeTicker(const RealtimeTicker&) = delete;
  RealtimeTicker& operator=(const RealtimeTicker&) = delete;

  void start();
  void stop();

  /// Thread-safe. Returns a ticket that completes once the command has run.
  std::uint64_t submit(action::ActionCommand command);
  bool is_done(std::uint64_t ticket) const;
  /// Sleeps on the time source until the ticket completes.
  void wait(std::uint64_t ticket);
  /// The CommandRejected message for a completed ticket, if the game refused it. Clears it.
  std::optional<std::string> take_rejection(std::uint64_t ticket);

  std::uint64_t ticks() const;
  Frame snapshot() const;
  EnvStatus status() const;
  std::int64_t game_time_ms() const;

  /// Runs `fn` with the environment locked against the ticker.
  template <typename Fn>
  auto with_env(Fn&& fn) const {
    std::lock_guard lock(mutex_);
    return fn(env_);
  }

  /// One tick; normally called by the time source.
  void tick();

 private:
  struct Pending {
    std::uint64_t ticket;
    action::ActionCommand command;
  };

  void begin_next_locked();

  Environment& env_;
  GameClock& clock_;
  TimeSource& time_;
  mutable std::mutex mutex_;
  std::deque<Pending> queue_;
  std::optional<std::uint64_t> active_ticket_;
  std::vector<Segment> active_segments_;
  std::size_t segment_index_ = 0;
  std::int64_t segment_remaining_ms_ = 0;
  std::uint64_t next_ticket_ = 1;
  std::uint64_t completed_through_ = 0;
  std::uint64_t ticks_ = 0;
  std::map<std::uint64_t, std::string> rejections_;
  std::unique_ptr<Periodic> periodic_;
};

/// Single writer for one environment under a given clock discipline.
class GameDriver {
 public:
  virtual ~GameDriver() = default;

  virtual ClockMode mode() const = 0;
  virtual Frame reset(std::uint64_t seed) = 0;
  virtual void execute(const action::ActionCommand& command) = 0;
  virtual std::vector<Frame> observe(const ObservationPolicy& policy) = 0;
  virtual Frame snapshot() const = 0;
  virtual EnvStatus status() const = 0;
  virtual std::int64_t game_time_ms() const = 0;
  virtual std::uint64_t ticks() const = 0;
  virtual action::SurfaceBounds surface_bounds() const = 0;
  virtual std::optional<double> native_progress() const = 0;
  virtual std::string game_id() const = 0;
  /// Freezes a realtime clock; commands executed while paused run in lockstep. No-op in Lite.
  virtual void set_paused(bool /*paused*/) {}
  virtual bool paused() const { return false; }
};

/// Lite: the game is paused except while a command runs or an observation waits.
std::unique_ptr<GameDriver> make_lite_driver(Environment& env, std::int64_t tick_ms = kDefaultTickMs);
/// Realtime: the game ticks continuously on `time`, whatever the agent is doing.
std::unique_ptr<GameDriver> make_realtime_driver(Environment& env, TimeSource& time,
                                                 std::int64_t tick_ms = kDefaultTickMs);

}  // namespace arcade::env

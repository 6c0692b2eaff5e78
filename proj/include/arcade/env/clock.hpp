#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

namespace arcade::env {

class Environment;

enum class ClockMode : std::uint8_t { Realtime, Lite };

inline constexpr std::int64_t kDefaultTickMs = 50;

/// Handle for a periodic callback; destroying it stops further invocations.
class Periodic {
 public:
  virtual ~Periodic() = default;
};

/// Wall-clock abstraction. The virtual implementation lets realtime semantics run in tests
/// without sleeping.
class TimeSource {
 public:
  virtual ~TimeSource() = default;
  virtual std::int64_t now_ms() const = 0;
  virtual void sleep_for(std::int64_t ms) = 0;
  /// Calls `fn` every `period_ms`, first at now + period_ms.
  virtual std::unique_ptr<Periodic> every(std::int64_t period_ms, std::function<void()> fn) = 0;
};

class SystemTimeSource final : public TimeSource {
 public:
  std::int64_t now_ms() const override;
  void sleep_for(std::int64_t ms) override;
  std::unique_ptr<Periodic> every(std::int64_t period_ms, std::function<void()> fn) override;
};

/// Manual clock. sleep_for(ms) moves time forward and runs due periodic callbacks, in due-time
/// order, on the sleeping thread. Only one thread may sleep at a time.
class VirtualTimeSource final : public TimeSource {
 public:
  explicit VirtualTimeSource(std::int64_t start_ms = 0) : now_(start_ms) {}

  std::int64_t now_ms() const override;
  void sleep_for(std::int64_t ms) override;
  std::unique_ptr<Periodic> every(std::int64_t period_ms, std::function<void()> fn) override;

 private:
  struct Timer {
    std::uint64_t id;
    std::int64_t period;
    std::int64_t due;
    std::shared_ptr<std::function<void()>> fn;
  };
  class Handle;

  void cancel(std::uint64_t id);

  mutable std::mutex mutex_;
  std::int64_t now_;
  std::uint64_t next_id_ = 1;
  std::vector<Timer> timers_;
};

/// Accumulated game time. In Lite mode it only moves while commands execute or the observer
/// explicitly waits; in Realtime mode the ticker moves it once per tick.
class GameClock {
 public:
  explicit GameClock(ClockMode mode = ClockMode::Lite, std::int64_t tick_ms = kDefaultTickMs);

  ClockMode mode() const noexcept { return mode_; }
  std::int64_t tick_ms() const noexcept { return tick_ms_; }
  std::int64_t game_time_ms() const noexcept { return game_time_ms_; }

  /// Advances `env` by exactly `ms` of game time in steps of at most tick_ms.
  void advance(Environment& env, std::int64_t ms);
  void reset() noexcept { game_time_ms_ = 0; }

 private:
  ClockMode mode_;
  std::int64_t tick_ms_;
  std::int64_t game_time_ms_ = 0;
};

}  // namespace arcade::env

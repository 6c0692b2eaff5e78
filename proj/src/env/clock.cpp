#include "arcade/env/clock.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <stdexcept>
#include <stop_token>
#include <thread>

#include "arcade/env/environment.hpp"

namespace arcade::env {
namespace {

using SteadyClock = std::chrono::steady_clock;

class ThreadPeriodic final : public Periodic {
 public:
  ThreadPeriodic(std::int64_t period_ms, std::function<void()> fn)
      : thread_([period_ms, fn = std::move(fn), this](std::stop_token stop) {
          auto next = SteadyClock::now() + std::chrono::milliseconds(period_ms);
          std::mutex m;
          std::unique_lock lock(m);
          while (!stop.stop_requested()) {
            if (cv_.wait_until(lock, stop, next, [] { return false; })) break;
            if (stop.stop_requested()) break;
            fn();
            next += std::chrono::milliseconds(period_ms);
          }
        }) {}

  ~ThreadPeriodic() override {
    thread_.request_stop();
    thread_.join();
  }

 private:
  std::condition_variable_any cv_;
  std::jthread thread_;
};

}  // namespace

std::int64_t SystemTimeSource::now_ms() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(SteadyClock::now().time_since_epoch()).count();
}

void SystemTimeSource::sleep_for(std::int64_t ms) {
  if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

std::unique_ptr<Periodic> SystemTimeSource::every(std::int64_t period_ms, std::function<void()> fn) {
  if (period_ms <= 0) throw std::invalid_argument("period must be positive");
  return std::make_unique<ThreadPeriodic>(period_ms, std::move(fn));
}

class VirtualTimeSource::Handle final : public Periodic {
 public:
  Handle(VirtualTimeSource& owner, std::uint64_t id) : owner_(owner), id_(id) {}
  ~Handle() override { owner_.cancel(id_); }

 private:
  VirtualTimeSource& owner_;
  std::uint64_t id_;
};

std::int64_t VirtualTimeSource::now_ms() const {
  std::lock_guard lock(mutex_);
  return now_;
}

void VirtualTimeSource::sleep_for(std::int64_t ms) {
  std::unique_lock lock(mutex_);
  const std::int64_t target = now_ + std::max<std::int64_t>(ms, 0);
  for (;;) {
    auto next = std::min_element(timers_.begin(), timers_.end(), [](const Timer& a, const Timer& b) {
      return a.due != b.due ? a.due < b.due : a.id < b.id;
    });
    if (next == timers_.end() || next->due > target) break;
    now_ = next->due;
    next->due += next->period;
    auto fn = next->fn;
    lock.unlock();
    (*fn)();
    lock.lock();
  }
  now_ = target;
}

std::unique_ptr<Periodic> VirtualTimeSource::every(std::int64_t period_ms, std::function<void()> fn) {
  if (period_ms <= 0) throw std::invalid_argument("period must be positive");
  std::lock_guard lock(mutex_);
  const auto id = next_id_++;
  timers_.push_back({id, period_ms, now_ + period_ms, std::make_shared<std::function<void()>>(std::move(fn))});
  return std::make_unique<Handle>(*this, id);
}

void VirtualTimeSource::cancel(std::uint64_t id) {
  std::lock_guard lock(mutex_);
  std::erase_if(timers_, [id](const Timer& t) { return t.id == id; });
}

GameClock::GameClock(ClockMode mode, std::int64_t tick_ms) : mode_(mode), tick_ms_(tick_ms) {
  if (tick_ms <= 0) throw std::invalid_argument("tick_ms must be positive");
}

void GameClock::advance(Environment& env, std::int64_t ms) {
  if (ms < 0) throw std::invalid_argument("cannot advance by a negative duration");
  while (ms > 0) {
    const auto step = std::min(ms, tick_ms_);
    env.advance(step);
    game_time_ms_ += step;
    ms -= step;
  }
}

}  // namespace arcade::env

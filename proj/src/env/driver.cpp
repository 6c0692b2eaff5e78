#include "arcade/env/driver.hpp"

#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace arcade::env {

std::string_view outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::Running: return "Running";
    case Outcome::Completed: return "Completed";
    case Outcome::Locked: return "Locked";
    case Outcome::Exhausted: return "Exhausted";
  }
  return "Unknown";
}

void validate(const ObservationPolicy& policy) {
  if (policy.frames_per_observation < 1) throw std::invalid_argument("frames_per_observation must be >= 1");
  if (policy.frame_spacing_ms < 0 || policy.post_action_delay_ms < 0) {
    throw std::invalid_argument("observation delays must be non-negative");
  }
}

std::int64_t seconds_to_ms(double seconds) { return std::llround(seconds * 1000.0); }

std::vector<Segment> segments_of(const action::ActionCommand& command) {
  std::vector<Segment> out;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, action::ButtonSequence>) {
          for (const auto& chord : c.chords) out.push_back({{chord.buttons, {}}, seconds_to_ms(chord.duration_s)});
        } else if constexpr (std::is_same_v<T, action::KeySequence>) {
          for (const auto& chord : c.chords) out.push_back({{{}, chord.keys}, seconds_to_ms(chord.duration_s)});
        } else if constexpr (std::is_same_v<T, action::HoldKey>) {
          out.push_back({{{}, {c.key}}, seconds_to_ms(c.duration_s)});
        }
      },
      command);
  return out;
}

void execute(Environment& env, GameClock& clock, const action::ActionCommand& command) {
  env.apply(command);
  for (const auto& seg : segments_of(command)) {
    env.press(seg.inputs);
    clock.advance(env, seg.duration_ms);
    env.release();
  }
}

std::vector<Frame> observe(Environment& env, GameClock& clock, const ObservationPolicy& policy) {
  validate(policy);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(policy.frames_per_observation));
  clock.advance(env, policy.post_action_delay_ms);
  frames.push_back(env.snapshot());
  for (int i = 1; i < policy.frames_per_observation; ++i) {
    clock.advance(env, policy.frame_spacing_ms);
    frames.push_back(env.snapshot());
  }
  return frames;
}

// --- RealtimeTicker ---------------------------------------------------------

RealtimeTicker::RealtimeTicker(Environment& env, GameClock& clock, TimeSource& time)
    : env_(env), clock_(clock), time_(time) {}

RealtimeTicker::~RealtimeTicker() { stop(); }

void RealtimeTicker::start() {
  if (!periodic_) periodic_ = time_.every(clock_.tick_ms(), [this] { tick(); });
}

void RealtimeTicker::stop() { periodic_.reset(); }

std::uint64_t RealtimeTicker::submit(action::ActionCommand command) {
  std::lock_guard lock(mutex_);
  const auto ticket = next_ticket_++;
  queue_.push_back({ticket, std::move(command)});
  return ticket;
}

bool RealtimeTicker::is_done(std::uint64_t ticket) const {
  std::lock_guard lock(mutex_);
  return ticket <= completed_through_;
}

void RealtimeTicker::wait(std::uint64_t ticket) {
  while (!is_done(ticket)) time_.sleep_for(clock_.tick_ms());
}

std::optional<std::string> RealtimeTicker::take_rejection(std::uint64_t ticket) {
  std::lock_guard lock(mutex_);
  auto it = rejections_.find(ticket);
  if (it == rejections_.end()) return std::nullopt;
  auto message = std::move(it->second);
  rejections_.erase(it);
  return message;
}

std::uint64_t RealtimeTicker::ticks() const {
  std::lock_guard lock(mutex_);
  return ticks_;
}

Frame RealtimeTicker::snapshot() const {
  std::lock_guard lock(mutex_);
  return env_.snapshot();
}

EnvStatus RealtimeTicker::status() const {
  std::lock_guard lock(mutex_);
  return env_.status();
}

std::int64_t RealtimeTicker::game_time_ms() const {
  std::lock_guard lock(mutex_);
  return clock_.game_time_ms();
}

void RealtimeTicker::begin_next_locked() {
  while (!active_ticket_ && !queue_.empty()) {
    auto next = std::move(queue_.front());
    queue_.pop_front();
    try {
      env_.apply(next.command);
    } catch (const CommandRejected& e) {
      rejections_.emplace(next.ticket, e.what());
      completed_through_ = next.ticket;
      continue;
    }
    active_segments_ = segments_of(next.command);
    segment_index_ = 0;
    if (active_segments_.empty()) {
      completed_through_ = next.ticket;
      continue;
    }
    active_ticket_ = next.ticket;
    env_.press(active_segments_[0].inputs);
    segment_remaining_ms_ = active_segments_[0].duration_ms;
  }
}

void RealtimeTicker::tick() {
  std::lock_guard lock(mutex_);
  begin_next_locked();
  clock_.advance(env_, clock_.tick_ms());
  ++ticks_;
  if (!active_ticket_) return;
  segment_remaining_ms_ -= clock_.tick_ms();
  while (active_ticket_ && segment_remaining_ms_ <= 0) {
    env_.release();
    if (++segment_index_ < active_segments_.size()) {
      env_.press(active_segments_[segment_index_].inputs);
      segment_remaining_ms_ += active_segments_[segment_index_].duration_ms;
    } else {
      completed_through_ = *active_ticket_;
      active_ticket_.reset();
    }
  }
}

// --- drivers -----------------------------------------------------------------

namespace {

class LiteDriver final : public GameDriver {
 public:
  LiteDriver(Environment& env, std::int64_t tick_ms) : env_(env), clock_(ClockMode::Lite, tick_ms) {}

  ClockMode mode() const override { return ClockMode::Lite; }
  Frame reset(std::uint64_t seed) override {
    clock_.reset();
    ticks_ = 0;
    return env_.reset(seed);
  }
  void execute(const action::ActionCommand& command) override {
    const auto before = clock_.game_time_ms();
    env::execute(env_, clock_, command);
    count_ticks(before);
  }
  std::vector<Frame> observe(const ObservationPolicy& policy) override {
    const auto before = clock_.game_time_ms();
    auto frames = env::observe(env_, clock_, policy);
    count_ticks(before);
    return frames;
  }
  Frame snapshot() const override { return env_.snapshot(); }
  EnvStatus status() const override { return env_.status(); }
  std::int64_t game_time_ms() const override { return clock_.game_time_ms(); }
  std::uint64_t ticks() const override { return ticks_; }
  action::SurfaceBounds surface_bounds() const override { return env_.surface_bounds(); }
  std::optional<double> native_progress() const override { return env_.native_progress(); }
  std::string game_id() const override { return env_.game_id(); }

 private:
  void count_ticks(std::int64_t before) {
    const auto elapsed = clock_.game_time_ms() - before;
    ticks_ += static_cast<std::uint64_t>((elapsed + clock_.tick_ms() - 1) / clock_.tick_ms());
  }

  Environment& env_;
  GameClock clock_;
  std::uint64_t ticks_ = 0;
};

class RealtimeDriver final : public GameDriver {
 public:
  RealtimeDriver(Environment& env, TimeSource& time, std::int64_t tick_ms)
      : env_(env), time_(time), clock_(ClockMode::Realtime, tick_ms), ticker_(env, clock_, time) {}

  ClockMode mode() const override { return ClockMode::Realtime; }
  Frame reset(std::uint64_t seed) override {
    ticker_.stop();
    clock_.reset();
    auto frame = env_.reset(seed);
    if (!paused_) ticker_.start();
    return frame;
  }
  void set_paused(bool paused) override {
    paused_ = paused;
    if (paused) {
      ticker_.stop();
    } else {
      ticker_.start();
    }
  }
  bool paused() const override { return paused_; }
  void execute(const action::ActionCommand& command) override {
    if (paused_) {
      // The ticker is stopped, so this thread is the only writer.
      env::execute(env_, clock_, command);
      return;
    }
    const auto ticket = ticker_.submit(command);
    ticker_.wait(ticket);
    if (auto why = ticker_.take_rejection(ticket)) throw CommandRejected(*why);
  }
  std::vector<Frame> observe(const ObservationPolicy& policy) override {
    validate(policy);
    std::vector<Frame> frames;
    time_.sleep_for(policy.post_action_delay_ms);
    frames.push_back(ticker_.snapshot());
    for (int i = 1; i < policy.frames_per_observation; ++i) {
      time_.sleep_for(policy.frame_spacing_ms);
      frames.push_back(ticker_.snapshot());
    }
    return frames;
  }
  Frame snapshot() const override { return ticker_.snapshot(); }
  EnvStatus status() const override { return ticker_.status(); }
  std::int64_t game_time_ms() const override { return ticker_.game_time_ms(); }
  std::uint64_t ticks() const override { return ticker_.ticks(); }
  action::SurfaceBounds surface_bounds() const override {
    return ticker_.with_env([](const Environment& e) { return e.surface_bounds(); });
  }
  std::optional<double> native_progress() const override {
    return ticker_.with_env([](const Environment& e) { return e.native_progress(); });
  }
  std::string game_id() const override { return env_.game_id(); }

 private:
  Environment& env_;
  TimeSource& time_;
  GameClock clock_;
  RealtimeTicker ticker_;
  bool paused_ = false;
};

}  // namespace

std::unique_ptr<GameDriver> make_lite_driver(Environment& env, std::int64_t tick_ms) {
  return std::make_unique<LiteDriver>(env, tick_ms);
}

std::unique_ptr<GameDriver> make_realtime_driver(Environment& env, TimeSource& time, std::int64_t tick_ms) {
  return std::make_unique<RealtimeDriver>(env, time, tick_ms);
}

}  // namespace arcade::env

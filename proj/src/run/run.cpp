#include "arcade/run/run.hpp"

#include <array>
#include <chrono>
#include <stdexcept>

#include "arcade/action/parse.hpp"

namespace arcade::run {

namespace {

constexpr std::array<std::string_view, 9> kTerminationNames = {
    "Completed", "TimeCap", "StepCap", "Stuck", "NoProgress", "RepeatedLoss", "LockedState", "ModelUnavailable",
    "Aborted"};

std::int64_t epoch_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string_view termination_name(Termination t) { return kTerminationNames.at(static_cast<std::size_t>(t)); }

Termination termination_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTerminationNames.size(); ++i) {
    if (kTerminationNames[i] == name) return static_cast<Termination>(i);
  }
  throw std::invalid_argument("unknown termination reason \"" + std::string(name) + "\"");
}

Limits resolve_limits(const RunConfig& config, const checkpoint::CheckpointPack* pack) {
  auto walkthrough = config.walkthrough_length_ms;
  if (!walkthrough && pack) walkthrough = pack->walkthrough_length_ms;
  if (walkthrough && *walkthrough <= 0) throw std::invalid_argument("walkthrough length must be positive");

  Limits limits;
  limits.max_game_time_ms = config.max_game_time_ms;
  if (!limits.max_game_time_ms && walkthrough) limits.max_game_time_ms = 20 * *walkthrough;
  limits.max_steps = config.max_lite_steps;
  if (!limits.max_steps && walkthrough && config.mode == env::ClockMode::Lite) {
    // One Lite step stands for one second of play.
    limits.max_steps = static_cast<std::uint64_t>((*walkthrough * 20 + 999) / 1000);
  }
  limits.stuck_steps = config.stuck_step_limit;
  limits.no_progress_steps = config.no_progress_step_limit;
  limits.same_spot_losses = config.same_spot_loss_limit;
  limits.cost_budget = config.cost_budget;

  if ((limits.max_game_time_ms && *limits.max_game_time_ms <= 0) || (limits.max_steps && *limits.max_steps == 0) ||
      limits.stuck_steps == 0 || limits.no_progress_steps == 0 || limits.same_spot_losses == 0 ||
      (limits.cost_budget && *limits.cost_budget <= 0)) {
    throw std::invalid_argument("run limits must be positive");
  }
  return limits;
}

std::uint64_t StuckDetector::observe(const phash::PerceptualHash& hash) {
  repeat_count_ = last_ == hash ? repeat_count_ + 1 : 0;
  last_ = hash;
  return repeat_count_;
}

std::uint32_t LossTracker::record(const phash::PerceptualHash& pre_loss) {
  const auto n = ++counts_[pre_loss.bits];
  worst_ = std::max(worst_, n);
  return n;
}

std::optional<Termination> check_termination(const RunSnapshot& s, const Limits& limits) {
  if (s.reached_final_checkpoint || s.outcome == env::Outcome::Completed) return Termination::Completed;
  if (s.outcome == env::Outcome::Locked) return Termination::LockedState;
  if (limits.max_game_time_ms && s.game_time_ms > *limits.max_game_time_ms) return Termination::TimeCap;
  // A game that runs out of its own action budget is capped the same way.
  if ((limits.max_steps && s.steps >= *limits.max_steps) || s.outcome == env::Outcome::Exhausted) {
    return Termination::StepCap;
  }
  if (s.identical_frames > limits.stuck_steps) return Termination::Stuck;
  if (s.steps_since_progress >= limits.no_progress_steps ||
      (limits.cost_budget && s.cost_since_progress > *limits.cost_budget)) {
    return Termination::NoProgress;
  }
  if (s.losses_at_worst_spot >= limits.same_spot_losses) return Termination::RepeatedLoss;
  return std::nullopt;
}

FrameHashes hash_frame(const Frame& frame) { return {phash::average_hash(frame), phash::difference_hash(frame)}; }

double cost_of(const agent::TokenUsage& usage, const std::string& model, const PriceTable& prices) {
  auto it = prices.find(model);
  if (it == prices.end()) return 0;
  return (static_cast<double>(usage.prompt_tokens) * it->second.prompt_per_mtok +
          static_cast<double>(usage.completion_tokens) * it->second.completion_per_mtok) /
         1e6;
}

namespace {

class Runner {
 public:
  Runner(const RunConfig& config, env::GameDriver& driver, agent::Agent& agent, const checkpoint::CheckpointPack* pack,
         const RunHooks& hooks, const PriceTable& prices)
      : config_(config), driver_(driver), agent_(agent), pack_(pack), hooks_(hooks), prices_(prices) {}

  RunRecord play() {
    started_ = std::chrono::steady_clock::now();
    auto& h = record_.header;
    h.config = config_;
    h.limits = resolve_limits(config_, pack_);
    h.model = agent_.config().settings.model;
    h.temperature = agent_.config().settings.temperature;
    h.max_output_tokens = agent_.config().settings.effective_max_tokens();
    h.pack_game_id = pack_ ? pack_->game_id : "";
    h.started_at_ms = epoch_ms();

    try {
      driver_.reset(config_.seed);
      observation_ = driver_.observe(config_.observation);
      h.initial_frames = track(observation_, 0, h.initial_matches);
      stuck_.observe(h.initial_frames.back().difference);
      last_losses_ = driver_.status().losses;
      best_native_ = driver_.native_progress().value_or(0);
    } catch (const std::exception& e) {
      emit_header();
      return finish(Termination::Aborted, std::string("environment failed to start: ") + e.what());
    }
    emit_header();

    for (;;) {
      if (auto t = check_termination(snapshot(), h.limits)) return finish(*t, {});
      if (auto stop = turn()) return finish(stop->first, stop->second);
    }
  }

 private:
  using Stop = std::optional<std::pair<Termination, std::string>>;

  Stop turn() {
    TurnRecord tr;
    tr.step = steps_ + 1;
    const auto pre_loss = phash::difference_hash(observation_.back());

    const auto asked = std::chrono::steady_clock::now();
    agent::AgentTurn answer;
    try {
      answer = agent_.step(observation_);
    } catch (const agent::ModelUnavailable& e) {
      return std::pair{Termination::ModelUnavailable, std::string(e.what())};
    }
    ++steps_;
    tr.model_ms = elapsed_ms(asked);
    tr.thought = answer.thought;
    tr.action_name = answer.action_name;
    tr.action_input = answer.action_input;
    tr.memory_update = answer.memory_update;
    tr.raw_response = answer.raw_response;
    tr.errored = answer.errored;
    tr.error = answer.error;
    tr.start_select_hazard = answer.start_select_hazard;
    tr.attempts = answer.attempts;
    tr.usage = answer.usage;
    tr.cost = cost_of(answer.usage, record_.header.model, prices_);
    if (hooks_.drain_exchanges) tr.exchanges = hooks_.drain_exchanges();
    usage_.prompt_tokens += tr.usage.prompt_tokens;
    usage_.completion_tokens += tr.usage.completion_tokens;
    cost_ += tr.cost;

    Stop stop;
    try {
      for (const auto& command : answer.parsed) {
        tr.commands.push_back(action::serialize(command));
        try {
          driver_.execute(command);
        } catch (const env::CommandRejected& e) {
          tr.rejected = e.what();
        }
      }
      observation_ = driver_.observe(config_.observation);
    } catch (const std::exception& e) {
      stop = std::pair{Termination::Aborted, std::string("environment fault: ") + e.what()};
    }

    if (!stop) {
      const auto before = progress_.furthest_index;
      tr.frames = track(observation_, tr.step, tr.matches);
      stuck_.observe(tr.frames.back().difference);

      const auto status = driver_.status();
      for (auto n = last_losses_; n < status.losses; ++n) losses_.record(pre_loss);
      last_losses_ = status.losses;

      bool advanced = progress_.furthest_index != before;
      if (!pack_) {
        const auto native = driver_.native_progress().value_or(0);
        advanced = native > best_native_;
        best_native_ = std::max(best_native_, native);
      }
      if (advanced) {
        steps_since_progress_ = 0;
        cost_since_progress_ = 0;
      } else {
        ++steps_since_progress_;
        cost_since_progress_ += tr.cost;
      }
      tr.losses = status.losses;
    }
    tr.furthest_index = progress_.furthest_index;
    tr.progress = current_progress();
    tr.game_time_ms = safe_game_time();
    tr.wall_ms = elapsed_ms(started_);
    record_.turns.push_back(tr);
    if (hooks_.on_turn) hooks_.on_turn(record_.turns.back());
    return stop;
  }

  std::vector<FrameHashes> track(const std::vector<Frame>& frames, std::uint64_t step,
                                 std::vector<checkpoint::MatchEvent>& events) {
    std::vector<FrameHashes> hashes;
    for (const auto& frame : frames) {
      hashes.push_back(hash_frame(frame));
      if (!pack_) continue;
      const auto& h = pack_->algorithm == phash::HashAlgorithm::Average ? hashes.back().average
                                                                        : hashes.back().difference;
      const auto seen = progress_.match_events.size();
      progress_ = checkpoint::match_hash(std::move(progress_), *pack_, h, step);
      events.insert(events.end(), progress_.match_events.begin() + static_cast<std::ptrdiff_t>(seen),
                    progress_.match_events.end());
    }
    return hashes;
  }

  RunSnapshot snapshot() const {
    RunSnapshot s;
    s.outcome = driver_.status().outcome;
    s.reached_final_checkpoint = pack_ && checkpoint::reached_final(progress_, *pack_);
    s.game_time_ms = driver_.game_time_ms();
    s.steps = steps_;
    s.identical_frames = stuck_.repeat_count();
    s.steps_since_progress = steps_since_progress_;
    s.cost_since_progress = cost_since_progress_;
    s.losses_at_worst_spot = losses_.worst();
    return s;
  }

  double current_progress() const {
    if (pack_) return checkpoint::progress_score(progress_, *pack_);
    try {
      return driver_.native_progress().value_or(0);
    } catch (const std::exception&) {
      return best_native_;
    }
  }

  std::int64_t safe_game_time() const {
    try {
      return driver_.game_time_ms();
    } catch (const std::exception&) {
      return 0;
    }
  }

  void emit_header() {
    if (hooks_.on_header) hooks_.on_header(record_.header);
  }

  RunRecord finish(Termination t, std::string detail) {
    auto& f = record_.footer;
    f.termination = t;
    f.detail = std::move(detail);
    f.turns = record_.turns.size();
    f.progress = current_progress();
    f.furthest_index = progress_.furthest_index;
    if (pack_ && f.furthest_index) f.furthest_label = pack_->checkpoints.at(*f.furthest_index).label;
    f.game_time_ms = safe_game_time();
    f.usage = usage_;
    f.cost = cost_;
    f.wall_duration_ms = elapsed_ms(started_);
    if (hooks_.on_footer) hooks_.on_footer(f);
    return std::move(record_);
  }

  static std::int64_t elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - since).count();
  }

  const RunConfig& config_;
  env::GameDriver& driver_;
  agent::Agent& agent_;
  const checkpoint::CheckpointPack* pack_;
  const RunHooks& hooks_;
  const PriceTable& prices_;

  RunRecord record_;
  std::chrono::steady_clock::time_point started_;
  std::vector<Frame> observation_;
  checkpoint::ProgressState progress_;
  StuckDetector stuck_;
  LossTracker losses_;
  std::uint64_t steps_ = 0;
  std::uint64_t steps_since_progress_ = 0;
  double cost_since_progress_ = 0;
  std::uint32_t last_losses_ = 0;
  double best_native_ = 0;
  agent::TokenUsage usage_;
  double cost_ = 0;
};

}  // namespace

RunRecord run(const RunConfig& config, env::GameDriver& driver, agent::Agent& agent,
              const checkpoint::CheckpointPack* pack, const RunHooks& hooks, const PriceTable& prices) {
  if (pack && !config.game_id.empty() && pack->game_id != config.game_id) {
    throw std::invalid_argument("pack is for \"" + pack->game_id + "\", not \"" + config.game_id + "\"");
  }
  return Runner(config, driver, agent, pack, hooks, prices).play();
}

double final_score(const RunRecord& record) { return record.footer.progress; }

}  // namespace arcade::run

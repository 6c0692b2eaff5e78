#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arcade/agent/agent.hpp"
#include "arcade/checkpoint/tracker.hpp"
#include "arcade/env/driver.hpp"
#include "arcade/phash/phash.hpp"

namespace arcade::run {

enum class Termination : std::uint8_t {
  Completed,
  TimeCap,
  StepCap,
  Stuck,
  NoProgress,
  RepeatedLoss,
  LockedState,
  ModelUnavailable,
  Aborted,
};

std::string_view termination_name(Termination t);
/// Throws std::invalid_argument for unknown names.
Termination termination_from_name(std::string_view name);

struct RunConfig {
  std::string game_id;
  env::ClockMode mode = env::ClockMode::Lite;
  std::uint64_t seed = 0;
  /// Reference walkthrough length; taken from the pack when unset.
  std::optional<std::int64_t> walkthrough_length_ms;
  /// Defaults to 20x the walkthrough length.
  std::optional<std::int64_t> max_game_time_ms;
  /// Lite only by default: walkthrough seconds x 20. An explicit value applies in either mode.
  std::optional<std::uint64_t> max_lite_steps;
  std::uint64_t stuck_step_limit = 100;
  std::uint64_t no_progress_step_limit = 2000;
  std::uint32_t same_spot_loss_limit = 3;
  env::ObservationPolicy observation;
  /// Spend allowed between two progress events; exceeding it counts as NoProgress.
  std::optional<double> cost_budget;

  bool operator==(const RunConfig&) const = default;
};

/// Caps after defaults have been filled in. Unset fields never fire.
struct Limits {
  std::optional<std::int64_t> max_game_time_ms;
  std::optional<std::uint64_t> max_steps;
  std::uint64_t stuck_steps = 100;
  std::uint64_t no_progress_steps = 2000;
  std::uint32_t same_spot_losses = 3;
  std::optional<double> cost_budget;

  bool operator==(const Limits&) const = default;
};

/// Throws std::invalid_argument when a limit is zero or negative.
Limits resolve_limits(const RunConfig& config, const checkpoint::CheckpointPack* pack);

/// Counts consecutive observations whose frame hash equals the previous one.
class StuckDetector {
 public:
  /// Returns the updated repeat count.
  std::uint64_t observe(const phash::PerceptualHash& hash);
  std::uint64_t repeat_count() const { return repeat_count_; }
  const std::optional<phash::PerceptualHash>& last_hash() const { return last_; }

 private:
  std::optional<phash::PerceptualHash> last_;
  std::uint64_t repeat_count_ = 0;
};

/// Counts in-game losses by the hash of the frame seen just before each loss.
class LossTracker {
 public:
  /// Returns how many losses have now happened at this spot.
  std::uint32_t record(const phash::PerceptualHash& pre_loss);
  std::uint32_t worst() const { return worst_; }

 private:
  std::map<std::uint64_t, std::uint32_t> counts_;
  std::uint32_t worst_ = 0;
};

/// Everything check_termination looks at after a turn.
struct RunSnapshot {
  env::Outcome outcome = env::Outcome::Running;
  bool reached_final_checkpoint = false;
  std::int64_t game_time_ms = 0;
  std::uint64_t steps = 0;
  std::uint64_t identical_frames = 0;
  std::uint64_t steps_since_progress = 0;
  double cost_since_progress = 0;
  std::uint32_t losses_at_worst_spot = 0;
};

/// First rule that fires, in the order Completed, LockedState, TimeCap, StepCap, Stuck,
/// NoProgress, RepeatedLoss.
std::optional<Termination> check_termination(const RunSnapshot& snapshot, const Limits& limits);

struct FrameHashes {
  phash::PerceptualHash average;
  phash::PerceptualHash difference;
  bool operator==(const FrameHashes&) const = default;
};

FrameHashes hash_frame(const Frame& frame);

struct TurnRecord {
  std::uint64_t step = 0;  // 1-based
  std::string thought;
  std::string action_name;
  std::string action_input;
  std::string memory_update;
  std::string raw_response;
  std::vector<std::string> commands;  // canonical text of what was executed
  bool errored = false;
  std::string error;
  bool start_select_hazard = false;
  std::string rejected;  // CommandRejected message, if the game refused the command
  int attempts = 0;
  agent::TokenUsage usage;
  double cost = 0;
  std::vector<FrameHashes> frames;  // observation taken after the command
  std::vector<checkpoint::MatchEvent> matches;
  std::optional<std::size_t> furthest_index;
  double progress = 0;
  std::int64_t game_time_ms = 0;
  std::uint32_t losses = 0;
  std::vector<agent::Exchange> exchanges;
  // wall clock
  std::int64_t wall_ms = 0;
  std::int64_t model_ms = 0;

  bool operator==(const TurnRecord&) const = default;
};

struct RunHeader {
  int version = 1;
  RunConfig config;
  Limits limits;
  std::string model;
  double temperature = 0;
  int max_output_tokens = 0;
  std::string pack_game_id;  // empty when scored natively
  std::vector<FrameHashes> initial_frames;
  std::vector<checkpoint::MatchEvent> initial_matches;
  std::int64_t started_at_ms = 0;  // wall clock, Unix epoch

  bool operator==(const RunHeader&) const = default;
};

struct RunFooter {
  Termination termination = Termination::Aborted;
  std::string detail;
  std::uint64_t turns = 0;
  double progress = 0;
  std::optional<std::size_t> furthest_index;
  std::string furthest_label;
  std::int64_t game_time_ms = 0;
  agent::TokenUsage usage;
  double cost = 0;
  std::int64_t wall_duration_ms = 0;  // wall clock

  bool operator==(const RunFooter&) const = default;
};

struct RunRecord {
  RunHeader header;
  std::vector<TurnRecord> turns;
  RunFooter footer;

  bool operator==(const RunRecord&) const = default;
};

/// Per-million-token prices for one model.
struct Price {
  double prompt_per_mtok = 0;
  double completion_per_mtok = 0;
};
using PriceTable = std::map<std::string, Price>;
double cost_of(const agent::TokenUsage& usage, const std::string& model, const PriceTable& prices);

struct RunHooks {
  std::function<void(const RunHeader&)> on_header;
  std::function<void(const TurnRecord&)> on_turn;
  std::function<void(const RunFooter&)> on_footer;
  /// Model exchanges captured since the last call, attached to the turn that made them.
  std::function<std::vector<agent::Exchange>()> drain_exchanges;
};

/// Plays one run: observe, ask the agent, execute, track, until a termination rule fires.
/// Model outages end the run as ModelUnavailable and environment faults as Aborted; neither
/// escapes as an exception. `driver` must not have been reset yet.
RunRecord run(const RunConfig& config, env::GameDriver& driver, agent::Agent& agent,
              const checkpoint::CheckpointPack* pack, const RunHooks& hooks = {}, const PriceTable& prices = {});

/// The run's score: pack progress when a pack is given, else the game's own progress.
double final_score(const RunRecord& record);

}  // namespace arcade::run

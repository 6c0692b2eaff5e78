#pragma once

#include <optional>

#include "arcade/run/run.hpp"

namespace arcade::run {

struct ReplayResult {
  bool identical = false;
  std::uint64_t turns_replayed = 0;
  /// First step whose frame hashes differ from the log; 0 means the initial observation.
  std::optional<std::uint64_t> first_divergence;
  std::string detail;
};

/// Re-executes the logged commands in Lite mode against a fresh environment reset with the
/// logged seed and compares every observed frame hash with the log.
ReplayResult replay(const RunRecord& record, env::Environment& env);

struct ScoreReport {
  double progress = 0;
  std::optional<std::size_t> furthest_index;
  std::string furthest_label;
  std::vector<checkpoint::MatchEvent> matches;
};

/// Scores a logged run against a pack from the frame hashes in the log alone.
ScoreReport score_log(const RunRecord& record, const checkpoint::CheckpointPack& pack);

}  // namespace arcade::run

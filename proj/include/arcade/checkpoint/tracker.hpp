#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "arcade/checkpoint/pack.hpp"
#include "arcade/image/frame.hpp"

namespace arcade::checkpoint {

struct MatchEvent {
  std::uint64_t step = 0;
  std::size_t checkpoint = 0;
  int distance = 0;
  bool operator==(const MatchEvent&) const = default;
};

struct ProgressState {
  std::optional<std::size_t> furthest_index;  // never decreases
  std::vector<MatchEvent> match_events;
  bool operator==(const ProgressState&) const = default;
};

/// Records every checkpoint whose distance to `hash` is below its threshold, and raises
/// furthest_index to the largest matched index. All checkpoints are checked, not just the next.
ProgressState match_hash(ProgressState state, const CheckpointPack& pack, const phash::PerceptualHash& hash,
                         std::uint64_t step = 0);
ProgressState match_frame(ProgressState state, const CheckpointPack& pack, const Frame& frame,
                          std::uint64_t step = 0);

/// Timestamp ratio of the furthest checkpoint reached, 0 when none.
double progress_score(const ProgressState& state, const CheckpointPack& pack);

bool reached_final(const ProgressState& state, const CheckpointPack& pack);

class EmptyScoreList : public std::invalid_argument {
 public:
  EmptyScoreList() : std::invalid_argument("overall score needs at least one game") {}
};

/// Equal-weight mean of per-game fractions.
double overall_score(std::span<const double> per_game);

}  // namespace arcade::checkpoint

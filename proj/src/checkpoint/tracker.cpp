#include "arcade/checkpoint/tracker.hpp"

#include <numeric>
#include <string>

namespace arcade::checkpoint {

ProgressState match_hash(ProgressState state, const CheckpointPack& pack, const phash::PerceptualHash& hash,
                         std::uint64_t step) {
  for (const auto& cp : pack.checkpoints) {
    const int distance = phash::hamming_distance(hash, cp.hash);
    if (distance < pack.threshold_for(cp)) {
      state.match_events.push_back({step, cp.index, distance});
      if (!state.furthest_index || cp.index > *state.furthest_index) state.furthest_index = cp.index;
    }
  }
  return state;
}

ProgressState match_frame(ProgressState state, const CheckpointPack& pack, const Frame& frame,
                          std::uint64_t step) {
  return match_hash(std::move(state), pack, phash::compute_hash(frame, pack.algorithm), step);
}

double progress_score(const ProgressState& state, const CheckpointPack& pack) {
  if (!state.furthest_index || pack.walkthrough_length_ms <= 0) return 0.0;
  const auto& cp = pack.checkpoints.at(*state.furthest_index);
  return static_cast<double>(cp.timestamp_ms) / static_cast<double>(pack.walkthrough_length_ms);
}

bool reached_final(const ProgressState& state, const CheckpointPack& pack) {
  return state.furthest_index && !pack.checkpoints.empty() && *state.furthest_index + 1 == pack.checkpoints.size();
}

double overall_score(std::span<const double> per_game) {
  if (per_game.empty()) throw EmptyScoreList();
  for (double s : per_game) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("per-game score " + std::to_string(s) + " outside [0,1]");
  }
  return std::accumulate(per_game.begin(), per_game.end(), 0.0) / static_cast<double>(per_game.size());
}

}  // namespace arcade::checkpoint

#include "arcade/run/replay.hpp"

#include "arcade/action/parse.hpp"

namespace arcade::run {

namespace {

std::optional<std::string> compare(const std::vector<FrameHashes>& logged, const std::vector<Frame>& frames) {
  if (logged.size() != frames.size()) {
    return "logged " + std::to_string(logged.size()) + " frames, observed " + std::to_string(frames.size());
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto now = hash_frame(frames[i]);
    if (now != logged[i]) {
      return "frame " + std::to_string(i) + ": logged " + phash::to_string(logged[i].difference) + ", observed " +
             phash::to_string(now.difference);
    }
  }
  return std::nullopt;
}

}  // namespace

ReplayResult replay(const RunRecord& record, env::Environment& env) {
  const auto& config = record.header.config;
  if (config.mode != env::ClockMode::Lite) {
    throw std::invalid_argument("only Lite runs replay deterministically");
  }
  ReplayResult result;
  auto driver = env::make_lite_driver(env);
  driver->reset(config.seed);
  if (auto diff = compare(record.header.initial_frames, driver->observe(config.observation))) {
    result.first_divergence = 0;
    result.detail = "initial observation: " + *diff;
    return result;
  }
  for (const auto& turn : record.turns) {
    for (const auto& text : turn.commands) {
      try {
        driver->execute(action::parse_command(text, {}, driver->surface_bounds()));
      } catch (const env::CommandRejected&) {
        // Rejections are part of the recorded behaviour; the frames below still have to agree.
      }
    }
    ++result.turns_replayed;
    if (auto diff = compare(turn.frames, driver->observe(config.observation))) {
      result.first_divergence = turn.step;
      result.detail = "step " + std::to_string(turn.step) + ": " + *diff;
      return result;
    }
  }
  result.identical = true;
  return result;
}

ScoreReport score_log(const RunRecord& record, const checkpoint::CheckpointPack& pack) {
  checkpoint::ProgressState state;
  auto feed = [&](const std::vector<FrameHashes>& frames, std::uint64_t step) {
    for (const auto& f : frames) {
      const auto& h = pack.algorithm == phash::HashAlgorithm::Average ? f.average : f.difference;
      state = checkpoint::match_hash(std::move(state), pack, h, step);
    }
  };
  feed(record.header.initial_frames, 0);
  for (const auto& turn : record.turns) feed(turn.frames, turn.step);

  ScoreReport report;
  report.progress = checkpoint::progress_score(state, pack);
  report.furthest_index = state.furthest_index;
  if (state.furthest_index) report.furthest_label = pack.checkpoints.at(*state.furthest_index).label;
  report.matches = std::move(state.match_events);
  return report;
}

}  // namespace arcade::run

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <unistd.h>

#include "arcade/checkpoint/tracker.hpp"
#include "arcade/image/image_io.hpp"
#include "support/scenes.hpp"

using namespace arcade;
using namespace arcade::checkpoint;
using arcade::testing::noise_frame;
using arcade::testing::scene_pack;
using arcade::testing::structured_scene;

namespace {

PackErrc pack_error(const std::string& doc) {
  std::istringstream in(doc);
  try {
    load_pack(in);
  } catch (const PackError& e) {
    return e.code();
  }
  ADD_FAILURE() << "pack accepted: " << doc;
  return PackErrc::ParseError;
}

std::string pack_doc(const std::string& checkpoints, std::int64_t length = 600000) {
  return R"({"version":1,"game_id":"demo","algorithm":"dhash","walkthrough_length_ms":)" + std::to_string(length) +
         R"(,"default_threshold":12,"checkpoints":[)" + checkpoints + "]}";
}

std::string cp_doc(int index, std::int64_t ts, const std::string& extra = "") {
  return R"({"index":)" + std::to_string(index) + R"(,"hash":"dhash:00000000000000ff","timestamp_ms":)" +
         std::to_string(ts) + R"(,"label":"cp)" + std::to_string(index) + "\"" + extra + "}";
}


}  // namespace

TEST(LoadPack, ValidationErrors) {
  EXPECT_EQ(pack_error(pack_doc(cp_doc(0, 10000) + "," + cp_doc(1, 5000))), PackErrc::UnsortedTimestamps);
  EXPECT_EQ(pack_error(pack_doc(cp_doc(0, 10000) + "," + cp_doc(1, 10000))), PackErrc::UnsortedTimestamps);
  EXPECT_EQ(pack_error(pack_doc(cp_doc(0, 1000, R"(,"threshold":65)"))), PackErrc::BadThreshold);
  EXPECT_EQ(pack_error(pack_doc(cp_doc(0, 1000, R"(,"threshold":-1)"))), PackErrc::BadThreshold);
  EXPECT_EQ(pack_error(pack_doc(cp_doc(0, 600001))), PackErrc::TimestampExceedsLength);
  EXPECT_EQ(pack_error(pack_doc(cp_doc(1, 1000))), PackErrc::ParseError);
  EXPECT_EQ(pack_error("{not json"), PackErrc::ParseError);
  EXPECT_EQ(pack_error(R"({"version":2})"), PackErrc::ParseError);
}

TEST(LoadPack, FinalCheckpointAtLengthIsCompletion) {
  std::istringstream in(pack_doc(cp_doc(0, 600000)));
  auto pack = load_pack(in);
  EXPECT_EQ(pack.default_threshold, 12);
  ProgressState state = match_hash({}, pack, pack.checkpoints[0].hash);
  EXPECT_TRUE(reached_final(state, pack));
  EXPECT_DOUBLE_EQ(progress_score(state, pack), 1.0);
}

TEST(LoadPack, SaveRoundTrip) {
  auto pack = scene_pack(4, 90000);
  pack.checkpoints[1].threshold = 7;
  pack.checkpoints[2].crop = CropRect{1, 2, 30, 40};
  std::stringstream io;
  save_pack(pack, io);
  EXPECT_EQ(load_pack(io), pack);
}

TEST(MatchFrame, IdenticalFrameMatchesAtZero) {
  auto pack = scene_pack(5, 100000);
  auto state = match_frame({}, pack, structured_scene(102), 9);
  ASSERT_TRUE(state.furthest_index);
  EXPECT_EQ(*state.furthest_index, 2u);
  ASSERT_FALSE(state.match_events.empty());
  EXPECT_EQ(state.match_events.back(), (MatchEvent{9, 2, 0}));
}

TEST(MatchFrame, FurthestNeverDecreases) {
  auto pack = scene_pack(5, 100000);
  auto state = match_frame({}, pack, structured_scene(103));
  state = match_frame(state, pack, structured_scene(101));
  EXPECT_EQ(*state.furthest_index, 3u);
  EXPECT_DOUBLE_EQ(progress_score(state, pack), 0.8);
}

TEST(MatchFrame, NoiseDoesNotMatchStructuredCheckpoints) {
  auto pack = scene_pack(10, 100000);
  std::mt19937_64 rng(1);
  ProgressState state;
  double total = 0;
  int pairs = 0;
  for (int i = 0; i < 200; ++i) {
    auto h = phash::difference_hash(noise_frame(rng));
    for (const auto& cp : pack.checkpoints) {
      total += phash::hamming_distance(h, cp.hash);
      ++pairs;
    }
    state = match_hash(state, pack, h, static_cast<std::uint64_t>(i));
  }
  EXPECT_FALSE(state.furthest_index);
  EXPECT_GT(total / pairs, 24.0);
  EXPECT_LT(total / pairs, 40.0);
}

TEST(MatchHash, StrictThresholdAndBitFlips) {
  auto pack = scene_pack(1, 1000);
  const auto base = pack.checkpoints[0].hash;
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> bits(64);
    std::iota(bits.begin(), bits.end(), 0);
    std::shuffle(bits.begin(), bits.end(), rng);
    const int flips = static_cast<int>(rng() % 20);
    auto h = base;
    for (int k = 0; k < flips; ++k) h.bits ^= 1ULL << bits[k];
    EXPECT_EQ(match_hash({}, pack, h).furthest_index.has_value(), flips < 12) << flips;
  }
}

TEST(MatchHash, PerCheckpointThresholdOverride) {
  auto pack = scene_pack(2, 1000);
  pack.checkpoints[0].threshold = 6;
  auto h = pack.checkpoints[0].hash;
  h.bits ^= 0x3fULL;  // distance 6: not below 6
  EXPECT_FALSE(match_hash({}, pack, h).furthest_index);
  h.bits ^= 0x1ULL;  // distance 5
  EXPECT_TRUE(match_hash({}, pack, h).furthest_index);
}

TEST(MatchFrame, MonotoneOverRandomInterleavings) {
  auto pack = scene_pack(6, 60000);
  std::mt19937_64 rng(8);
  for (int run = 0; run < 20; ++run) {
    ProgressState state;
    std::optional<std::size_t> prev;
    double prev_score = 0;
    for (int step = 0; step < 60; ++step) {
      auto frame = rng() % 2 ? structured_scene(100 + rng() % 6) : noise_frame(rng, 40, 30);
      state = match_frame(std::move(state), pack, frame, static_cast<std::uint64_t>(step));
      if (prev) EXPECT_GE(*state.furthest_index, *prev);
      const double score = progress_score(state, pack);
      EXPECT_GE(score, prev_score);
      EXPECT_LE(score, 1.0);
      prev = state.furthest_index;
      prev_score = score;
    }
  }
}

TEST(Scores, ProgressAndOverall) {
  CheckpointPack pack;
  pack.game_id = "kirby-like";
  pack.walkthrough_length_ms = 1000000;
  pack.checkpoints.push_back({0, {}, 48000, std::nullopt, "boss door", std::nullopt});
  EXPECT_DOUBLE_EQ(progress_score({}, pack), 0.0);
  ProgressState reached{0, {}};
  EXPECT_DOUBLE_EQ(progress_score(reached, pack), 0.048);

  const std::vector<double> suite = {0.048, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_NEAR(overall_score(suite), 0.0048, 1e-12);
  EXPECT_DOUBLE_EQ(overall_score(std::vector<double>{1.0}), 1.0);
  EXPECT_DOUBLE_EQ(overall_score(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_THROW(overall_score(std::vector<double>{}), EmptyScoreList);
  EXPECT_THROW(overall_score(std::vector<double>{1.5}), std::invalid_argument);
}

class BuildPackTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("arcade_pack_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
    for (int i = 0; i < 3; ++i) image::save_png(structured_scene(200 + i), dir_ / ("f" + std::to_string(i) + ".png"));
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path write_manifest(const std::string& entries) {
    auto path = dir_ / "manifest.json";
    std::ofstream(path) << R"({"game_id":"demo","walkthrough_length_ms":600000,"checkpoints":[)" << entries << "]}";
    return path;
  }

  std::filesystem::path dir_;
};

TEST_F(BuildPackTest, HashesImagesAndScoresByRatio) {
  auto pack = build_pack(load_manifest_file(write_manifest(
      R"({"image":"f0.png","timestamp_ms":60000},{"image":"f1.png","timestamp_ms":120000,"threshold":7},)"
      R"({"image":"f2.png","timestamp_ms":180000,"label":"third","threshold":8})")));
  ASSERT_EQ(pack.checkpoints.size(), 3u);
  EXPECT_EQ(pack.threshold_for(pack.checkpoints[0]), 12);
  EXPECT_EQ(pack.threshold_for(pack.checkpoints[1]), 7);
  EXPECT_EQ(pack.threshold_for(pack.checkpoints[2]), 8);
  EXPECT_EQ(pack.checkpoints[2].label, "third");
  for (int i = 0; i < 3; ++i) {
    auto state = match_frame({}, pack, structured_scene(200 + i));
    EXPECT_EQ(state.furthest_index, std::optional<std::size_t>(i));
    EXPECT_NEAR(progress_score(state, pack), 0.1 * (i + 1), 1e-12);
  }
}

TEST_F(BuildPackTest, Errors) {
  try {
    build_pack(load_manifest_file(write_manifest(
        R"({"image":"f0.png","timestamp_ms":60000},{"image":"f1.png","timestamp_ms":60000})")));
    FAIL();
  } catch (const PackError& e) {
    EXPECT_EQ(e.code(), PackErrc::UnsortedTimestamps);
  }
  try {
    build_pack(load_manifest_file(write_manifest(R"({"image":"nope.png","timestamp_ms":1})")));
    FAIL();
  } catch (const PackError& e) {
    EXPECT_EQ(e.code(), PackErrc::UnreadableImage);
  }
}

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <json.hpp>

#include "arcade/practice/games.hpp"
#include "arcade/agent/oracle_model.hpp"
#include "arcade/run/log.hpp"
#include "arcade/run/replay.hpp"
#include "support/counter_env.hpp"
#include "support/mock_scripts.hpp"

using namespace arcade;
using namespace arcade::run;
using arcade::testing::CounterEnv;
using arcade::testing::random_arrows;
using arcade::testing::splitmix64;

namespace {

std::string write_reply(const std::string& text) {
  return nlohmann::json{{"thought", ""}, {"action", "write"}, {"action_input", text}, {"memory", ""}}.dump();
}

/// Pack whose checkpoints are the counter screens `counters`, spread evenly up to `length_ms`.
checkpoint::CheckpointPack counter_pack(std::int64_t length_ms, const std::vector<std::uint64_t>& counters) {
  checkpoint::CheckpointPack pack;
  pack.game_id = "counter";
  pack.walkthrough_length_ms = length_ms;
  for (std::size_t i = 0; i < counters.size(); ++i) {
    checkpoint::Checkpoint cp;
    cp.index = i;
    cp.hash = {splitmix64(counters[i]), phash::HashAlgorithm::Difference};
    cp.timestamp_ms = length_ms * static_cast<std::int64_t>(i + 1) / static_cast<std::int64_t>(counters.size());
    cp.label = "counter " + std::to_string(counters[i]);
    pack.checkpoints.push_back(cp);
  }
  return pack;
}

RunConfig counter_config() {
  RunConfig config;
  config.game_id = "counter";
  config.observation.post_action_delay_ms = 0;
  return config;
}

agent::AgentConfig agent_config() {
  agent::AgentConfig config;
  config.system_prompt = "test";
  return config;
}

struct Harness {
  CounterEnv env;
  std::unique_ptr<env::GameDriver> driver = env::make_lite_driver(env);
  agent::MockModel model;
  agent::Agent agent;

  explicit Harness(std::vector<agent::MockModel::Step> script, bool repeat_last = true)
      : model(std::move(script), nullptr, repeat_last), agent(model, agent_config()) {}
  explicit Harness(const std::string& reply) : Harness(std::vector<agent::MockModel::Step>{{reply}}) {}

  RunRecord play(const RunConfig& config, const checkpoint::CheckpointPack* pack = nullptr,
                 const RunHooks& hooks = {}, const PriceTable& prices = {}) {
    return run::run(config, *driver, agent, pack, hooks, prices);
  }
};

}  // namespace

// --- termination rules --------------------------------------------------------------

TEST(CheckTermination, PriorityOrderIsTotal) {
  Limits limits;
  limits.max_game_time_ms = 1000;
  limits.max_steps = 10;
  // Each rule as an independent predicate, in the documented order.
  using Rule = std::pair<Termination, std::function<bool(const RunSnapshot&)>>;
  const std::vector<Rule> rules = {
      {Termination::Completed, [](const RunSnapshot& s) { return s.reached_final_checkpoint; }},
      {Termination::LockedState, [](const RunSnapshot& s) { return s.outcome == env::Outcome::Locked; }},
      {Termination::TimeCap, [](const RunSnapshot& s) { return s.game_time_ms > 1000; }},
      {Termination::StepCap, [](const RunSnapshot& s) { return s.steps >= 10; }},
      {Termination::Stuck, [](const RunSnapshot& s) { return s.identical_frames > 100; }},
      {Termination::NoProgress, [](const RunSnapshot& s) { return s.steps_since_progress >= 2000; }},
      {Termination::RepeatedLoss, [](const RunSnapshot& s) { return s.losses_at_worst_spot >= 3; }},
  };
  for (unsigned mask = 0; mask < 128; ++mask) {
    RunSnapshot s;
    s.reached_final_checkpoint = mask & 1;
    s.outcome = (mask & 2) ? env::Outcome::Locked : env::Outcome::Running;
    s.game_time_ms = (mask & 4) ? 1001 : 1000;
    s.steps = (mask & 8) ? 10 : 9;
    s.identical_frames = (mask & 16) ? 101 : 100;
    s.steps_since_progress = (mask & 32) ? 2000 : 1999;
    s.losses_at_worst_spot = (mask & 64) ? 3 : 2;
    std::optional<Termination> expected;
    for (const auto& [reason, fires] : rules) {
      if (fires(s)) {
        expected = reason;
        break;
      }
    }
    EXPECT_EQ(check_termination(s, limits), expected) << "mask " << mask;
  }
}

TEST(CheckTermination, TimeCapIsStrictlyAboveTwentyWalkthroughs) {
  RunConfig config;
  config.walkthrough_length_ms = 60'000;
  auto limits = resolve_limits(config, nullptr);
  ASSERT_EQ(limits.max_game_time_ms, 1'200'000);
  RunSnapshot s;
  s.game_time_ms = 20 * 60'000;
  EXPECT_EQ(check_termination(s, limits), std::nullopt);
  s.game_time_ms = 20 * 60'000 + 1;
  EXPECT_EQ(check_termination(s, limits), Termination::TimeCap);
}

TEST(CheckTermination, NoProgressAtTwoThousandTurns) {
  Limits limits;
  RunSnapshot s;
  s.steps = s.steps_since_progress = 1999;
  EXPECT_EQ(check_termination(s, limits), std::nullopt);
  s.steps = s.steps_since_progress = 2000;
  EXPECT_EQ(check_termination(s, limits), Termination::NoProgress);
}

TEST(CheckTermination, CostBudgetStandsInForSteps) {
  Limits limits;
  limits.cost_budget = 30.0;
  RunSnapshot s;
  s.cost_since_progress = 30.0;
  EXPECT_EQ(check_termination(s, limits), std::nullopt);
  s.cost_since_progress = 30.01;
  EXPECT_EQ(check_termination(s, limits), Termination::NoProgress);
}

TEST(CheckTermination, ExhaustedGameBudgetIsAStepCap) {
  RunSnapshot s;
  s.outcome = env::Outcome::Exhausted;
  EXPECT_EQ(check_termination(s, {}), Termination::StepCap);
}

TEST(ResolveLimits, LiteStepsDefaultToTwentyPerWalkthroughSecond) {
  RunConfig config;
  config.walkthrough_length_ms = 1'143'000;
  EXPECT_EQ(resolve_limits(config, nullptr).max_steps, 22'860u);
  config.max_lite_steps = 21'603;
  EXPECT_EQ(resolve_limits(config, nullptr).max_steps, 21'603u);
  config.max_lite_steps.reset();
  config.walkthrough_length_ms = 1'050;  // rounds up
  EXPECT_EQ(resolve_limits(config, nullptr).max_steps, 21u);
}

TEST(ResolveLimits, RealtimeHasNoStepCapUnlessAsked) {
  RunConfig config;
  config.mode = env::ClockMode::Realtime;
  auto pack = counter_pack(90'000, {1});
  auto limits = resolve_limits(config, &pack);
  EXPECT_EQ(limits.max_steps, std::nullopt);
  EXPECT_EQ(limits.max_game_time_ms, 1'800'000);
  config.max_lite_steps = 5;
  EXPECT_EQ(resolve_limits(config, &pack).max_steps, 5u);
}

TEST(ResolveLimits, RejectsNonPositive) {
  RunConfig config;
  config.stuck_step_limit = 0;
  EXPECT_THROW(resolve_limits(config, nullptr), std::invalid_argument);
  config = {};
  config.cost_budget = 0;
  EXPECT_THROW(resolve_limits(config, nullptr), std::invalid_argument);
  config = {};
  config.walkthrough_length_ms = -5;
  EXPECT_THROW(resolve_limits(config, nullptr), std::invalid_argument);
}

TEST(StuckDetector, CountsRepeatsAndResetsOnChange) {
  StuckDetector d;
  phash::PerceptualHash a{1}, b{2};
  EXPECT_EQ(d.observe(a), 0u);
  EXPECT_EQ(d.observe(a), 1u);
  EXPECT_EQ(d.observe(a), 2u);
  EXPECT_EQ(d.observe(b), 0u);
  EXPECT_EQ(d.repeat_count(), 0u);
  EXPECT_EQ(d.observe(b), 1u);
}

TEST(LossTracker, CountsPerSpot) {
  LossTracker t;
  phash::PerceptualHash a{1}, b{2};
  EXPECT_EQ(t.record(a), 1u);
  EXPECT_EQ(t.record(b), 1u);
  EXPECT_EQ(t.record(a), 2u);
  EXPECT_EQ(t.worst(), 2u);
}

// --- run scenarios --------------------------------------------------------------------

TEST(Run, ScriptedCompletion) {
  Harness h(write_reply("go"));
  auto pack = counter_pack(10'000, {2, 4, 5});
  auto record = h.play(counter_config(), &pack);
  EXPECT_EQ(record.footer.termination, Termination::Completed);
  EXPECT_DOUBLE_EQ(final_score(record), 1.0);
  EXPECT_EQ(record.turns.size(), 5u);
  EXPECT_EQ(record.footer.furthest_index, 2u);
  EXPECT_EQ(record.footer.furthest_label, "counter 5");
  EXPECT_EQ(h.model.calls(), 5u);
  EXPECT_EQ(record.turns[1].matches, (std::vector<checkpoint::MatchEvent>{{2, 0, 0}}));
  EXPECT_DOUBLE_EQ(record.turns[3].progress, 6'666.0 / 10'000);  // timestamps are whole ms
}

TEST(Run, NoOpsForeverAreStuckOnTurn101) {
  Harness h(write_reply("wait"));
  auto record = h.play(counter_config());
  EXPECT_EQ(record.footer.termination, Termination::Stuck);
  EXPECT_EQ(record.turns.size(), 101u);
  EXPECT_EQ(h.model.calls(), 101u);
}

TEST(Run, NoProgressAtTurn2000) {
  Harness h(write_reply("go"));
  // Long enough that the default step cap (20 per walkthrough second) stays out of the way.
  auto pack = counter_pack(1'000'000, {1'000'000});
  auto record = h.play(counter_config(), &pack);
  EXPECT_EQ(record.footer.termination, Termination::NoProgress);
  EXPECT_EQ(record.turns.size(), 2000u);
}

TEST(Run, NoProgressCountsFromTheLastNewCheckpoint) {
  Harness h(write_reply("go"));
  auto pack = counter_pack(10'000, {10, 1'000'000});
  auto config = counter_config();
  config.no_progress_step_limit = 50;
  auto record = h.play(config, &pack);
  EXPECT_EQ(record.footer.termination, Termination::NoProgress);
  EXPECT_EQ(record.turns.size(), 60u);
  EXPECT_DOUBLE_EQ(record.footer.progress, 0.5);
}

TEST(Run, TimeCapOneMillisecondPastTwentyWalkthroughs) {
  Harness h({{R"({"action":"hold_key","action_input":"A,20"})"}, {R"({"action":"hold_key","action_input":"A,0.001"})"}});
  auto config = counter_config();
  config.walkthrough_length_ms = 1000;
  config.max_lite_steps = 100;
  auto record = h.play(config);
  EXPECT_EQ(record.footer.termination, Termination::TimeCap);
  ASSERT_EQ(record.turns.size(), 2u);
  EXPECT_EQ(record.turns[0].game_time_ms, 20'000);
  EXPECT_EQ(record.footer.game_time_ms, 20'001);
}

TEST(Run, LiteStepCapAtConfiguredKirbyValue) {
  Harness h(write_reply("go"));
  auto config = counter_config();
  config.max_lite_steps = 21'603;
  config.no_progress_step_limit = 1'000'000;
  auto record = h.play(config);
  EXPECT_EQ(record.footer.termination, Termination::StepCap);
  EXPECT_EQ(record.turns.size(), 21'603u);
  EXPECT_EQ(h.model.calls(), 21'603u);
}

TEST(Run, ThirdLossAtTheSameSpot) {
  Harness h({{write_reply("go")}, {write_reply("die")}, {write_reply("go")}, {write_reply("die")},
             {write_reply("go")}, {write_reply("go")}, {write_reply("die")}, {write_reply("go")},
             {write_reply("die")}, {write_reply("wait")}});
  auto record = h.play(counter_config());
  EXPECT_EQ(record.footer.termination, Termination::RepeatedLoss);
  // Losses after turns 2 and 4 happen on screen 1, the one after turn 7 on screen 2.
  EXPECT_EQ(record.turns.size(), 9u);
  EXPECT_EQ(record.turns.back().losses, 4u);
}

TEST(Run, LockedState) {
  Harness h({{write_reply("go")}, {write_reply("quit")}});
  auto record = h.play(counter_config());
  EXPECT_EQ(record.footer.termination, Termination::LockedState);
  EXPECT_EQ(record.turns.size(), 2u);
}

TEST(Run, GameReportedCompletionWithoutPack) {
  Harness h(write_reply("win"));
  auto record = h.play(counter_config());
  EXPECT_EQ(record.footer.termination, Termination::Completed);
  EXPECT_EQ(record.turns.size(), 1u);
}

TEST(Run, ModelOutageEndsTheRun) {
  Harness h(std::vector<agent::MockModel::Step>{{"", 0, true}});
  auto record = h.play(counter_config());
  EXPECT_EQ(record.footer.termination, Termination::ModelUnavailable);
  EXPECT_TRUE(record.turns.empty());
  EXPECT_NE(record.footer.detail.find("unavailable"), std::string::npos);
}

TEST(Run, EnvironmentFaultAborts) {
  Harness h({{write_reply("go")}, {write_reply("crash")}});
  auto record = h.play(counter_config());
  EXPECT_EQ(record.footer.termination, Termination::Aborted);
  EXPECT_NE(record.footer.detail.find("emulator crashed"), std::string::npos);
  ASSERT_EQ(record.turns.size(), 2u);
  EXPECT_TRUE(record.turns[1].frames.empty());
}

TEST(Run, RejectedCommandsAreRecordedAndPlayContinues) {
  Harness h({{write_reply("refuse")}, {write_reply("win")}});
  auto record = h.play(counter_config());
  EXPECT_EQ(record.turns[0].rejected, "not now");
  EXPECT_EQ(record.footer.termination, Termination::Completed);
}

TEST(Run, MalformedTurnsStillCount) {
  Harness h("gibberish");
  auto config = counter_config();
  config.max_lite_steps = 3;
  auto record = h.play(config);
  ASSERT_EQ(record.turns.size(), 3u);
  EXPECT_TRUE(record.turns[0].errored);
  EXPECT_TRUE(record.turns[0].commands.empty());
  EXPECT_EQ(record.turns[0].attempts, 4);
  EXPECT_EQ(h.model.calls(), 12u);
}

TEST(Run, CostBudgetEndsAStalledRun) {
  Harness h(write_reply("go"));
  auto config = counter_config();
  config.cost_budget = 1.0;
  PriceTable prices{{"mock", {1000.0, 0.0}}};
  // The mock reports 100 prompt tokens per message; the first turn sends 2 messages.
  auto record = h.play(config, nullptr, {}, prices);
  EXPECT_EQ(record.footer.termination, Termination::NoProgress);
  EXPECT_GT(record.footer.cost, 1.0);
  EXPECT_LT(record.turns.size(), 10u);
  double sum = 0;
  for (const auto& t : record.turns) sum += t.cost;
  EXPECT_DOUBLE_EQ(sum, record.footer.cost);
}

TEST(Run, PackForAnotherGameIsRefused) {
  Harness h(write_reply("go"));
  auto pack = counter_pack(1000, {1});
  pack.game_id = "other";
  EXPECT_THROW(h.play(counter_config(), &pack), std::invalid_argument);
}

TEST(Run, RealtimeTurnsAreSequential) {
  env::VirtualTimeSource time;
  practice::ClickingGame game;
  auto driver = env::make_realtime_driver(game, time);
  auto oracle = agent::make_oracle_model(game);
  // Slow the oracle down: every call sleeps 2 s of virtual time first.
  agent::CallbackModel slow([&](const std::vector<agent::Message>& m) {
    time.sleep_for(2000);
    return oracle->complete(m, {}).text;
  });
  agent::Agent agent(slow, agent_config());
  RunConfig config;
  config.game_id = "clicking";
  config.mode = env::ClockMode::Realtime;
  auto record = run::run(config, *driver, agent, nullptr);
  EXPECT_EQ(record.footer.termination, Termination::Completed);
  EXPECT_EQ(record.turns.size(), 20u);
  for (std::size_t i = 1; i < record.turns.size(); ++i) {
    EXPECT_GE(record.turns[i].game_time_ms - record.turns[i - 1].game_time_ms, 2000 + 500);
  }
}

// --- logs -------------------------------------------------------------------------------

namespace {

std::string to_text(const RunRecord& r, LogOptions options = {}) {
  std::ostringstream out;
  write_log(r, out, options);
  return out.str();
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

RunRecord from_text(const std::string& text) {
  std::istringstream in(text);
  return read_log(in);
}

class FailingEnv : public CounterEnv {
 public:
  Frame reset(std::uint64_t) override { throw std::runtime_error("no ROM"); }
};

}  // namespace

TEST(RunLog, ImmediateAbortIsHeaderAndFooter) {
  FailingEnv env;
  auto driver = env::make_lite_driver(env);
  auto model = agent::MockModel::replying(write_reply("go"));
  agent::Agent agent(model, agent_config());
  auto record = run::run(counter_config(), *driver, agent, nullptr);
  EXPECT_EQ(record.footer.termination, Termination::Aborted);
  EXPECT_EQ(model.calls(), 0u);
  auto text = to_text(record);
  EXPECT_EQ(line_count(text), 2u);
  EXPECT_EQ(from_text(text), record);
}

TEST(RunLog, HundredTurnsAreHundredAndTwoLines) {
  Harness h(write_reply("go"));
  auto config = counter_config();
  config.max_lite_steps = 100;
  auto record = h.play(config);
  auto text = to_text(record);
  EXPECT_EQ(line_count(text), 102u);
  EXPECT_EQ(from_text(text), record);
}

TEST(RunLog, StreamingMatchesWholeRecord) {
  Harness h({{write_reply("go")}, {write_reply("refuse")}, {"junk"}, {write_reply("win")}});
  std::ostringstream streamed;
  auto pack = counter_pack(5'000, {1, 50});
  auto record = h.play(counter_config(), &pack, streaming_hooks(streamed));
  EXPECT_EQ(streamed.str(), to_text(record));
}

TEST(RunLog, RandomRecordsRoundTrip) {
  std::mt19937_64 rng(2024);
  auto text = [&](std::size_t max_len) {
    std::string s;
    const auto n = rng() % max_len;
    for (std::size_t i = 0; i < n; ++i) s += static_cast<char>(" \n\t\"\\{}azAZ09,#"[rng() % 16]);
    return s;
  };
  auto hashes = [&] {
    std::vector<FrameHashes> v(rng() % 4);
    for (auto& f : v) {
      f.average = {rng(), phash::HashAlgorithm::Average};
      f.difference = {rng(), phash::HashAlgorithm::Difference};
    }
    return v;
  };
  auto real = [&] { return std::ldexp(static_cast<double>(rng() >> 11), -53) * 100.0; };
  for (int trial = 0; trial < 50; ++trial) {
    RunRecord r;
    r.header.config.game_id = text(10);
    r.header.config.mode = rng() % 2 ? env::ClockMode::Lite : env::ClockMode::Realtime;
    r.header.config.seed = rng();
    if (rng() % 2) r.header.config.walkthrough_length_ms = static_cast<std::int64_t>(rng() % 10'000'000);
    if (rng() % 2) r.header.config.max_lite_steps = rng() % 50'000;
    if (rng() % 2) r.header.config.cost_budget = real();
    r.header.config.observation = {1 + static_cast<int>(rng() % 5), static_cast<std::int64_t>(rng() % 200),
                                   static_cast<std::int64_t>(rng() % 1000)};
    r.header.limits.max_game_time_ms = static_cast<std::int64_t>(rng() % 1'000'000);
    r.header.model = text(12);
    r.header.temperature = real();
    r.header.max_output_tokens = static_cast<int>(rng() % 4096);
    r.header.initial_frames = hashes();
    r.header.initial_matches = {{0, rng() % 9, static_cast<int>(rng() % 12)}};
    r.header.started_at_ms = static_cast<std::int64_t>(rng() >> 2);
    const auto turns = rng() % 6;
    for (std::uint64_t i = 1; i <= turns; ++i) {
      TurnRecord t;
      t.step = i;
      t.thought = text(40);
      t.action_name = text(8);
      t.action_input = text(8);
      t.memory_update = text(30);
      t.raw_response = text(60);
      t.commands = {text(10), text(10)};
      t.errored = rng() % 2;
      t.error = text(10);
      t.start_select_hazard = rng() % 2;
      t.rejected = text(5);
      t.attempts = static_cast<int>(rng() % 5);
      t.usage = {static_cast<std::int64_t>(rng() % 100'000), static_cast<std::int64_t>(rng() % 2'000)};
      t.cost = real();
      t.frames = hashes();
      if (rng() % 2) t.furthest_index = rng() % 20;
      t.progress = real() / 100;
      t.game_time_ms = static_cast<std::int64_t>(rng() % 100'000'000);
      t.losses = static_cast<std::uint32_t>(rng() % 5);
      if (rng() % 2) t.exchanges.push_back({text(50), text(50), 200});
      t.wall_ms = static_cast<std::int64_t>(rng() % 100'000);
      t.model_ms = static_cast<std::int64_t>(rng() % 100'000);
      r.turns.push_back(t);
    }
    r.footer.termination = static_cast<Termination>(rng() % 9);
    r.footer.detail = text(20);
    r.footer.turns = turns;
    r.footer.progress = real() / 100;
    r.footer.usage = {static_cast<std::int64_t>(rng() % 1000), 3};
    r.footer.cost = real();
    r.footer.wall_duration_ms = 77;
    ASSERT_EQ(from_text(to_text(r)), r) << "trial " << trial;
  }
}

TEST(RunLog, WallClockFieldsCanBeLeftOut) {
  Harness h(write_reply("go"));
  auto config = counter_config();
  config.max_lite_steps = 3;
  auto record = h.play(config);
  auto back = from_text(to_text(record, {.include_wall_clock = false}));
  EXPECT_EQ(back.header.started_at_ms, 0);
  EXPECT_EQ(back.footer.wall_duration_ms, 0);
  back.header.started_at_ms = record.header.started_at_ms;
  back.footer.wall_duration_ms = record.footer.wall_duration_ms;
  for (std::size_t i = 0; i < back.turns.size(); ++i) {
    EXPECT_EQ(back.turns[i].wall_ms, 0);
    back.turns[i].wall_ms = record.turns[i].wall_ms;
    back.turns[i].model_ms = record.turns[i].model_ms;
  }
  EXPECT_EQ(back, record);
}

TEST(RunLog, CorruptionIsDetected) {
  Harness h(write_reply("go"));
  auto config = counter_config();
  config.max_lite_steps = 3;
  const auto text = to_text(h.play(config));
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  auto join = [](const std::vector<std::string>& ls) {
    std::string s;
    for (const auto& l : ls) s += l + "\n";
    return s;
  };

  EXPECT_THROW(from_text(""), CorruptLog);
  EXPECT_THROW(from_text(join({lines[0], lines[1]})), CorruptLog);           // no footer
  EXPECT_THROW(from_text(join({lines[1], lines[4]})), CorruptLog);           // no header
  EXPECT_THROW(from_text(join({lines[0], lines[2], lines[1], lines[3], lines[4]})), CorruptLog);
  EXPECT_THROW(from_text(join({lines[0], lines[1], lines[4]})), CorruptLog);  // footer count
  EXPECT_THROW(from_text(text + lines[1] + "\n"), CorruptLog);
  EXPECT_THROW(from_text(join({lines[0], "{not json", lines[4]})), CorruptLog);
  auto bad_hash = lines[1];
  bad_hash.replace(bad_hash.find("ahash:"), 6, "dhash:");
  try {
    from_text(join({lines[0], bad_hash, lines[2], lines[3], lines[4]}));
    FAIL();
  } catch (const CorruptLog& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(RunLog, EveryTrackerEventIsLogged) {
  Harness h(write_reply("go"));
  auto pack = counter_pack(10'000, {0, 3, 3 + 0, 7});
  pack.checkpoints[2].hash = {splitmix64(5), phash::HashAlgorithm::Difference};
  auto record = h.play(counter_config(), &pack);
  std::vector<checkpoint::MatchEvent> logged = record.header.initial_matches;
  for (const auto& t : record.turns) logged.insert(logged.end(), t.matches.begin(), t.matches.end());
  auto rescored = score_log(from_text(to_text(record)), pack);
  EXPECT_EQ(logged, rescored.matches);
  EXPECT_EQ(logged.size(), 4u);
  EXPECT_DOUBLE_EQ(rescored.progress, record.footer.progress);
  EXPECT_EQ(rescored.furthest_label, record.footer.furthest_label);
}

// --- determinism and replay -----------------------------------------------------------

namespace {

std::string navigation_log(std::uint64_t seed) {
  practice::NavigationGame game;
  auto driver = env::make_lite_driver(game);
  agent::MockModel model(random_arrows(99, 400), nullptr, true);
  agent::Agent agent(model, agent_config());
  RunConfig config;
  config.game_id = "navigation";
  config.seed = seed;
  return to_text(run::run(config, *driver, agent, nullptr), {.include_wall_clock = false});
}

}  // namespace

TEST(Determinism, LiteNavigationLogsAreByteIdentical) {
  const auto a = navigation_log(5);
  const auto b = navigation_log(5);
  EXPECT_EQ(a, b);
  EXPECT_GT(line_count(a), 100u);
}

TEST(Replay, ReproducesLoggedFrames) {
  practice::ClickingGame game;
  auto driver = env::make_lite_driver(game);
  auto oracle = agent::make_oracle_model(game);
  agent::Agent agent(*oracle, agent_config());
  RunConfig config;
  config.game_id = "clicking";
  config.seed = 31;
  config.observation = {3, 100, 250};
  auto record = from_text(to_text(run::run(config, *driver, agent, nullptr)));
  ASSERT_EQ(record.footer.termination, Termination::Completed);

  practice::ClickingGame fresh;
  auto result = replay(record, fresh);
  EXPECT_TRUE(result.identical) << result.detail;
  EXPECT_EQ(result.turns_replayed, record.turns.size());

  record.turns[6].commands = {"move 1,1"};
  practice::ClickingGame again;
  result = replay(record, again);
  EXPECT_FALSE(result.identical);
  EXPECT_EQ(result.first_divergence, 7u);

  record.header.config.seed = 32;
  practice::ClickingGame other;
  EXPECT_EQ(replay(record, other).first_divergence, 0u);
}

TEST(Replay, RealtimeLogsAreRefused) {
  RunRecord record;
  record.header.config.mode = env::ClockMode::Realtime;
  CounterEnv env;
  EXPECT_THROW(replay(record, env), std::invalid_argument);
}

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <thread>

#include "arcade/action/parse.hpp"
#include "arcade/gateway/loopback.hpp"
#include "arcade/gateway/server.hpp"
#include "arcade/image/frame.hpp"
#include "arcade/run/log.hpp"
#include "support/counter_env.hpp"
#include "support/loopback_run.hpp"
#include "support/ws_peer.hpp"

using namespace arcade;
using namespace arcade::gateway;
using arcade::testing::Peer;
using namespace std::chrono_literals;

namespace {

/// Console-sized screen whose shade counts the clicks it has received.
class ConsoleStub : public env::Environment {
 public:
  std::string game_id() const override { return "console"; }
  Frame reset(std::uint64_t) override {
    clicks_ = 0;
    return snapshot();
  }
  void apply(const action::ActionCommand& command) override {
    if (std::holds_alternative<action::Click>(command)) ++clicks_;
  }
  void advance(std::int64_t) override {}
  // Blocky noise keyed by the click count, so each count has its own perceptual hash.
  Frame snapshot() const override {
    Canvas canvas(160, 144);
    for (int by = 0; by < 8; ++by) {
      for (int bx = 0; bx < 9; ++bx) {
        const auto v = static_cast<std::uint8_t>(arcade::testing::splitmix64(clicks_ * 100 + by * 9 + bx));
        canvas.fill_rect(bx * 18, by * 18, bx * 18 + 18, by * 18 + 18, {v, v, v});
      }
    }
    return canvas.to_frame();
  }
  action::SurfaceBounds surface_bounds() const override { return {160, 144}; }
  env::EnvStatus status() const override { return {}; }

 private:
  int clicks_ = 0;
};

struct Served {
  Gateway gateway;
  explicit Served(GatewayOptions options = {}) : gateway(std::move(options)) {
    gateway.register_practice_games();
    gateway.start();
  }
  unsigned short port() const { return gateway.port(); }
};

std::string parse_failure(const std::string& text, action::SurfaceBounds bounds = action::kDesktopSurface) {
  try {
    action::parse_command(text, {}, bounds);
  } catch (const action::ActionError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(BindAddress, Parses) {
  EXPECT_EQ(parse_bind_address("0.0.0.0:8080"), (std::pair<std::string, unsigned short>{"0.0.0.0", 8080}));
  EXPECT_EQ(parse_bind_address("::1:9"), (std::pair<std::string, unsigned short>{"::1", 9}));
  EXPECT_THROW(parse_bind_address("localhost"), std::invalid_argument);
  EXPECT_THROW(parse_bind_address("host:99999"), std::invalid_argument);
  EXPECT_THROW(parse_bind_address("host:80x"), std::invalid_argument);
}

TEST(Serve, RequiresARegisteredGame) {
  Gateway empty;
  EXPECT_THROW(empty.start(), std::logic_error);
}

TEST(Serve, PortInUseIsABindFailure) {
  Served first;
  GatewayOptions options;
  options.port = first.port();
  Gateway second(options);
  second.register_practice_games();
  EXPECT_THROW(second.start(), BindFailure);
}

TEST(Serve, HumanSessionsAreLiteWithSingleFrames) {
  Served served;
  Peer human(served.port());
  auto hello = human.hello("human", {{"game", "navigation"}, {"mode", "realtime"}});
  ASSERT_EQ(hello.at("type"), "hello") << hello.dump();
  EXPECT_EQ(hello.at("mode"), "lite");
  EXPECT_EQ(hello.at("bounds"), json({640, 400}));
  auto first = human.next_of("frame");
  EXPECT_EQ(first.at("step"), 1);
  EXPECT_EQ(first.at("game_time_ms"), 0);

  auto [frames, ack] = human.act("press_key ArrowRight", 1);
  EXPECT_EQ(ack.at("type"), "ack");
  EXPECT_EQ(frames.size(), 1u);  // the most recent frame only
  EXPECT_EQ(ack.at("step"), frames.back().at("step"));
}

TEST(Serve, RealtimeHumansNeedTheFlag) {
  GatewayOptions options;
  options.allow_realtime_humans = true;
  Served served(options);
  Peer human(served.port());
  EXPECT_EQ(human.open("human", {{"game", "navigation"}, {"mode", "realtime"}}).at("mode"), "realtime");
}

TEST(Serve, SecondControllerIsRejected) {
  Served served;
  Peer agent(served.port());
  const auto session = agent.open("agent", {{"game", "clicking"}}).at("session").get<std::string>();

  Peer intruder(served.port());
  auto reply = intruder.hello("human", {{"session", session}});
  EXPECT_EQ(reply.at("type"), "error");
  EXPECT_EQ(reply.at("code"), "ControllerTaken");
  EXPECT_TRUE(intruder.closed_within(2s));

  EXPECT_EQ(agent.act("click", 7).second.at("type"), "ack");
}

TEST(Serve, ControllerMayReattachAfterLeaving) {
  Served served;
  std::string session;
  {
    Peer agent(served.port());
    session = agent.open("agent", {{"game", "clicking"}}).at("session").get<std::string>();
    agent.act("move 5,5", 1);
  }
  std::this_thread::sleep_for(200ms);
  Peer again(served.port());
  auto hello = again.hello("agent", {{"session", session}});
  EXPECT_EQ(hello.at("type"), "hello") << hello.dump();
  EXPECT_EQ(again.next_of("frame").at("step"), 2);
}

TEST(Serve, ObserverJoiningLateGetsTheCurrentFrameThenTheStream) {
  Served served;
  Peer agent(served.port());
  const auto session = agent.open("agent", {{"game", "clicking"}}).at("session").get<std::string>();
  agent.act("move 100,100", 1);
  auto [frames, ack] = agent.act("move 200,200", 2);
  const auto current = ack.at("step").get<int>();

  Peer observer(served.port());
  EXPECT_EQ(observer.hello("observer", {{"session", session}}).at("type"), "hello");
  auto joined = observer.next();
  ASSERT_EQ(joined.at("type"), "frame");
  EXPECT_EQ(joined.at("step"), current);
  EXPECT_EQ(joined.at("frame"), frames.back().at("frame"));

  auto [more, ack3] = agent.act("move 300,300", 3);
  auto live = observer.next_of("frame");
  EXPECT_EQ(live.at("step"), current + 1);
  EXPECT_EQ(live.at("frame"), more.back().at("frame"));
}

TEST(Serve, ObserverNeedsAKnownSession) {
  Served served;
  Peer observer(served.port());
  auto reply = observer.hello("observer", {{"session", "nope"}});
  EXPECT_EQ(reply.at("code"), "UnknownSession");
  EXPECT_TRUE(observer.closed_within(2s));
}

TEST(Serve, UnknownGameAndBadVersionAreRefused) {
  Served served;
  Peer a(served.port());
  EXPECT_EQ(a.open("agent", {{"game", "tetris"}}).at("code"), "UnknownGame");
  Peer b(served.port());
  EXPECT_EQ(b.open("agent", {{"game", "clicking"}, {"version", 99}}).at("code"), "VersionMismatch");
}

TEST(HandleAction, ParseErrorIsRelayedVerbatimAndSessionStaysOpen) {
  Served served;
  Peer human(served.port());
  human.open("human", {{"game", "navigation"}});
  auto [frames, error] = human.act("press_key Wrong+Stuff", 4);
  EXPECT_TRUE(frames.empty());
  EXPECT_EQ(error.at("type"), "error");
  EXPECT_EQ(error.at("code"), "ParseError");
  EXPECT_EQ(error.at("message"), parse_failure("press_key Wrong+Stuff"));
  EXPECT_EQ(human.act("press_key ArrowDown", 5).second.at("type"), "ack");
}

TEST(HandleAction, HumanAndAgentPathsAgree) {
  Served served;
  Peer human(served.port());
  Peer agent(served.port());
  human.open("human", {{"game", "navigation"}, {"seed", 3}});
  agent.open("agent", {{"game", "navigation"}, {"seed", 3}, {"observation", {{"delay_ms", 0}}}});
  for (int i = 0; i < 6; ++i) {
    const std::string text = i % 2 ? "press_key Space" : "press_key ArrowRight";
    auto [hf, ha] = human.act(text, i);
    auto [af, aa] = agent.act(text, i);
    ASSERT_EQ(ha.at("type"), "ack");
    ASSERT_EQ(aa.at("type"), "ack");
    EXPECT_EQ(hf.back().at("frame"), af.back().at("frame"));
    EXPECT_EQ(ha.at("game_time_ms"), aa.at("game_time_ms"));
  }
}

TEST(HandleAction, LiteClockAdvancesOnlyByTheActionDuration) {
  Served served;
  Peer human(served.port());
  human.open("human", {{"game", "navigation"}});
  auto [f1, a1] = human.act("hold_key ArrowRight,1.5", 1);
  EXPECT_EQ(a1.at("game_time_ms"), 1500);
  std::this_thread::sleep_for(300ms);  // wall time passes; game time must not
  auto [f2, a2] = human.act("press_key ArrowDown", 2);
  EXPECT_EQ(a2.at("game_time_ms"), 1600);
  EXPECT_EQ(f2.back().at("game_time_ms"), 1600);
}

TEST(HandleAction, OnlyTheControllerMayAct) {
  Served served;
  Peer agent(served.port());
  const auto session = agent.open("agent", {{"game", "clicking"}}).at("session").get<std::string>();
  Peer observer(served.port());
  observer.hello("observer", {{"session", session}});
  auto [frames, reply] = observer.act("click", 9);
  EXPECT_EQ(reply.at("code"), "NotController");
}

TEST(HandleAction, EveryActionGetsOneReplyAndStepsIncrease) {
  Served served;
  Peer agent(served.port());
  agent.hello("agent", {{"game", "clicking"}, {"observation", {{"frames", 3}, {"spacing_ms", 50}, {"delay_ms", 100}}}});
  auto last_step = agent.next_of("frame").at("step").get<int>();
  std::mt19937 rng(5);
  const std::vector<std::string> texts{"click 1,1", "move 640,400", "move 999,1", "jump", "drag 1,1,2,2",
                                       "type_text hi"};
  int acks = 0, errors = 0, expected_errors = 0;
  for (int id = 0; id < 40; ++id) {
    const auto& text = texts[rng() % texts.size()];
    if (!parse_failure(text).empty()) ++expected_errors;
    agent.send({{"type", "action"}, {"id", id}, {"text", text}});
  }
  while (acks + errors < 40) {
    auto m = agent.next();
    if (m.at("type") == "frame") {
      EXPECT_GT(m.at("step").get<int>(), last_step);
      last_step = m.at("step").get<int>();
    } else if (m.at("type") == "ack") {
      EXPECT_EQ(m.at("id"), acks + errors);
      ++acks;
    } else if (m.at("type") == "error") {
      EXPECT_EQ(m.at("id"), acks + errors);
      ++errors;
    }
  }
  EXPECT_EQ(errors, expected_errors);
  // Nothing further: each action got exactly one reply.
  while (auto extra = agent.poll(200ms)) {
    EXPECT_NE(extra->at("type"), "ack");
    EXPECT_NE(extra->at("type"), "error");
  }
}

TEST(HandleAction, PauseInLiteIsAlwaysHeld) {
  Served served;
  Peer agent(served.port());
  agent.open("agent", {{"game", "clicking"}});
  agent.send({{"type", "resume"}});
  auto m = agent.next_of("pause");
  EXPECT_EQ(m.at("paused"), true);
}

TEST(HandleAction, RealtimePauseFreezesTheClock) {
  Served served;
  Peer agent(served.port());
  agent.open("agent", {{"game", "navigation"}, {"mode", "realtime"}, {"observation", {{"delay_ms", 0}}}});
  agent.send({{"type", "pause"}});
  EXPECT_EQ(agent.next_of("pause").at("paused"), true);
  auto [f1, a1] = agent.act("press_key ArrowRight", 1);
  std::this_thread::sleep_for(300ms);
  auto [f2, a2] = agent.act("press_key ArrowDown", 2);
  EXPECT_EQ(a2.at("game_time_ms").get<int>() - a1.at("game_time_ms").get<int>(), 100);
  agent.send({{"type", "resume"}});
  EXPECT_EQ(agent.next_of("resume").at("paused"), false);
}

TEST(Isolation, ProtocolViolationClosesOnlyThatConnection) {
  Served served;
  Peer good(served.port());
  good.open("agent", {{"game", "clicking"}, {"seed", 1}});
  Peer bad(served.port());
  bad.open("agent", {{"game", "clicking"}, {"seed", 1}});

  bad.send_raw("{not json");
  auto err = bad.next_of("error");
  EXPECT_EQ(err.at("code"), "ProtocolViolation");
  EXPECT_TRUE(bad.closed_within(2s));

  Peer reference(served.port());
  reference.open("agent", {{"game", "clicking"}, {"seed", 1}});
  for (int i = 0; i < 5; ++i) {
    const auto text = "move " + std::to_string(100 + 40 * i) + ",200";
    auto [gf, ga] = good.act(text, i);
    auto [rf, ra] = reference.act(text, i);
    ASSERT_EQ(ga.at("type"), "ack");
    EXPECT_EQ(gf.back().at("frame"), rf.back().at("frame"));
    EXPECT_EQ(gf.back().at("step"), rf.back().at("step"));
  }
}

TEST(Isolation, MessagesBeforeHelloAndDuplicateHellosAreViolations) {
  Served served;
  Peer early(served.port());
  early.send({{"type", "ack"}});
  EXPECT_EQ(early.next().at("code"), "ProtocolViolation");
  Peer twice(served.port());
  twice.open("agent", {{"game", "clicking"}});
  twice.send({{"type", "hello"}, {"version", 1}, {"role", "agent"}, {"game", "clicking"}});
  EXPECT_EQ(twice.next_of("error").at("code"), "ProtocolViolation");
  EXPECT_TRUE(twice.closed_within(2s));
}

// --- adapters ---------------------------------------------------------------------------

TEST(AdapterBridge, DeclaredBoundsDriveCoordinateValidation) {
  Served served;
  LoopbackAdapter adapter(std::make_unique<ConsoleStub>(), "127.0.0.1", served.port());
  Peer human(served.port());
  auto hello = human.open("human", {{"game", "console"}});
  ASSERT_EQ(hello.at("type"), "hello") << hello.dump();
  EXPECT_EQ(hello.at("bounds"), json({160, 144}));
  EXPECT_EQ(human.act("move 160,144", 1).second.at("type"), "ack");
  auto [frames, error] = human.act("move 161,100", 2);
  EXPECT_EQ(error.at("code"), "ParseError");
  EXPECT_EQ(error.at("message"), parse_failure("move 161,100", {160, 144}));
  // Within the desktop surface but outside the console: still refused.
  EXPECT_EQ(human.act("move 300,300", 3).second.at("code"), "ParseError");
}

TEST(AdapterBridge, LiteSessionsHoldTheEmulator) {
  Served served;
  LoopbackAdapter adapter(std::make_unique<ConsoleStub>(), "127.0.0.1", served.port());
  Peer agent(served.port());
  agent.hello("agent", {{"game", "console"}});
  agent.next_of("frame");
  EXPECT_TRUE(adapter.paused());
}

TEST(AdapterBridge, SilentAdapterTimesOut) {
  GatewayOptions options;
  options.adapter_deadline = 300ms;
  Served served(options);
  LoopbackAdapter adapter(std::make_unique<ConsoleStub>(), "127.0.0.1", served.port());
  Peer agent(served.port());
  agent.open("agent", {{"game", "console"}});
  adapter.set_silent(true);
  const auto start = std::chrono::steady_clock::now();
  auto [frames, error] = agent.act("click", 1);
  const auto waited = std::chrono::steady_clock::now() - start;
  EXPECT_EQ(error.at("code"), "AdapterTimeout");
  EXPECT_GE(waited, 300ms);
  EXPECT_LT(waited, 3s);
}

TEST(AdapterBridge, SilentAdapterAbortsAnInProcessRun) {
  GatewayOptions options;
  options.adapter_deadline = 200ms;
  Served served(options);
  LoopbackAdapter adapter(practice::make_practice_game("clicking"), "127.0.0.1", served.port());
  auto link = served.gateway.wait_for_adapter("clicking", 5s);
  ASSERT_TRUE(link);
  RemoteEnvironment remote(link, true);
  auto driver = env::make_lite_driver(remote);
  driver->reset(0);
  adapter.set_silent(true);
  auto oracle = agent::make_oracle_model(adapter.environment());
  agent::AgentConfig config;
  config.system_prompt = "oracle";
  agent::Agent agent(*oracle, config);
  auto record = run::run(arcade::testing::oracle_config("clicking", 0), *driver, agent, nullptr);
  EXPECT_EQ(record.footer.termination, run::Termination::Aborted);
}

TEST(AdapterBridge, PackRegisteredForAnAdapterGameScoresItsFrames) {
  auto pack = std::make_shared<checkpoint::CheckpointPack>();
  pack->game_id = "console";
  pack->walkthrough_length_ms = 1000;
  ConsoleStub probe;
  probe.reset(0);
  probe.apply(action::Click{});
  pack->checkpoints.push_back({0, phash::difference_hash(probe.snapshot()), 400, std::nullopt, "one click", std::nullopt});
  Gateway gw;
  gw.register_game("console", {nullptr, pack});
  gw.start();
  Peer early(gw.port());
  EXPECT_EQ(early.hello("agent", {{"game", "console"}}).at("code"), "AdapterMissing");

  LoopbackAdapter adapter(std::make_unique<ConsoleStub>(), "127.0.0.1", gw.port());
  Peer agent(gw.port());
  agent.open("agent", {{"game", "console"}});
  auto [frames, ack] = agent.act("click", 1);
  ASSERT_EQ(ack.at("type"), "ack");
  auto score = agent.next_of("score");
  EXPECT_DOUBLE_EQ(score.at("progress").get<double>(), 0.4);
  EXPECT_EQ(score.at("label"), "one click");
}

TEST(AdapterBridge, DefaultDeadlineIsFiveSeconds) {
  EXPECT_EQ(kDefaultAdapterDeadline, 5000ms);
  EXPECT_EQ(GatewayOptions{}.adapter_deadline, 5000ms);
}

TEST(AdapterBridge, SecondAdapterForTheSameGameIsRefused) {
  Served served;
  LoopbackAdapter first(std::make_unique<ConsoleStub>(), "127.0.0.1", served.port());
  EXPECT_THROW(LoopbackAdapter(std::make_unique<ConsoleStub>(), "127.0.0.1", served.port()), std::runtime_error);
}

TEST(AdapterBridge, AdapterSessionIsBusyWhileControlled) {
  Served served;
  LoopbackAdapter adapter(std::make_unique<ConsoleStub>(), "127.0.0.1", served.port());
  Peer first(served.port());
  EXPECT_EQ(first.open("agent", {{"game", "console"}}).at("type"), "hello");
  Peer second(served.port());
  EXPECT_EQ(second.open("agent", {{"game", "console"}}).at("code"), "GameBusy");
}

TEST(LoopbackEquivalence, ClickingRunMatchesInProcessRun) {
  auto direct = arcade::testing::direct_oracle_run("clicking", 11);
  auto bridged = arcade::testing::bridged_oracle_run("clicking", 11);
  ASSERT_EQ(direct.footer.termination, run::Termination::Completed);
  ASSERT_EQ(direct.turns.size(), bridged.turns.size());
  for (std::size_t i = 0; i < direct.turns.size(); ++i) {
    EXPECT_EQ(direct.turns[i].frames, bridged.turns[i].frames) << "turn " << i;
  }
  run::LogOptions no_clock{false};
  std::ostringstream a, b;
  run::write_log(direct, a, no_clock);
  run::write_log(bridged, b, no_clock);
  EXPECT_EQ(a.str(), b.str());
}

TEST(LoopbackEquivalence, NavigationRunMatchesInProcessRun) {
  run::LogOptions no_clock{false};
  std::ostringstream a, b;
  run::write_log(arcade::testing::direct_oracle_run("navigation", 2), a, no_clock);
  run::write_log(arcade::testing::bridged_oracle_run("navigation", 2), b, no_clock);
  EXPECT_EQ(a.str(), b.str());
}

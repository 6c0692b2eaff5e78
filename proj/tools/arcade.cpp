// Command-line front end: pack building, runs, scoring, replay, practice play and the gateway.

#include <csignal>
#include <fstream>
#include <iostream>
#include <mutex>

#include <CLI11.hpp>
#include <json.hpp>

#include "arcade/action/parse.hpp"
#include "arcade/agent/oracle_model.hpp"
#include "arcade/checkpoint/pack.hpp"
#include "arcade/gateway/server.hpp"
#include "arcade/image/image_io.hpp"
#include "arcade/practice/games.hpp"
#include "arcade/run/log.hpp"
#include "arcade/run/replay.hpp"

using namespace arcade;
using json = nlohmann::json;

namespace {

bool is_practice_game(const std::string& id) {
  const auto ids = practice::practice_game_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

// --- build-pack, score --------------------------------------------------------------------

struct BuildPackArgs {
  std::string manifest;
  std::string out;
};

int build_pack_cmd(const BuildPackArgs& a) {
  const auto pack = checkpoint::build_pack(checkpoint::load_manifest_file(a.manifest));
  checkpoint::save_pack_file(pack, a.out);
  std::cout << "wrote " << a.out << ": " << pack.checkpoints.size() << " checkpoints for " << pack.game_id << " ("
            << phash::algorithm_tag(pack.algorithm) << ")\n";
  return 0;
}

struct ScoreArgs {
  std::string log;
  std::string pack;
};

int score_cmd(const ScoreArgs& a) {
  const auto record = run::read_log_file(a.log);
  const auto pack = checkpoint::load_pack_file(a.pack);
  const auto report = run::score_log(record, pack);
  json out{{"game", record.header.config.game_id},
           {"progress", report.progress},
           {"furthest_index", report.furthest_index ? json(*report.furthest_index) : json(nullptr)},
           {"label", report.furthest_index ? json(report.furthest_label) : json(nullptr)},
           {"matches", report.matches.size()},
           {"termination", run::termination_name(record.footer.termination)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

// --- run ----------------------------------------------------------------------------------

struct RunArgs {
  std::string game;
  std::string pack;
  std::string mode = "lite";
  std::uint64_t seed = 0;
  std::string endpoint;
  bool oracle = false;
  std::string model = "default";
  std::string api_key_env = "ARCADE_API_KEY";
  double temperature = 0.7;
  int max_tokens = 1024;
  bool long_output = false;
  int timeout_s = 120;
  std::string prompts_dir = ARCADE_DEFAULT_PROMPTS_DIR;
  std::string prompt_file;
  std::string interface = "desktop";
  std::size_t context_steps = 20;
  bool downscale_history = false;
  int frames = 1;
  std::int64_t spacing_ms = 0;
  std::int64_t delay_ms = 500;
  std::optional<std::uint64_t> max_steps;
  std::optional<double> cost_budget;
  double price_prompt = 0;
  double price_completion = 0;
  std::string log_out;
  std::string adapter_bind;
  int adapter_wait_s = 60;
};

/// Exchanges reported by the HTTP client, handed to the run log turn by turn.
class ExchangeBuffer {
 public:
  void push(const agent::Exchange& e) {
    std::lock_guard lock(mutex_);
    pending_.push_back(e);
  }
  std::vector<agent::Exchange> drain() {
    std::lock_guard lock(mutex_);
    return std::exchange(pending_, {});
  }

 private:
  std::mutex mutex_;
  std::vector<agent::Exchange> pending_;
};

int run_cmd(const RunArgs& a) {
  if (a.oracle == !a.endpoint.empty()) throw std::invalid_argument("give exactly one of --model-endpoint or --oracle");
  const bool realtime = a.mode == "realtime";
  if (a.oracle && realtime) throw std::invalid_argument("--oracle reads game state directly and needs --mode lite");

  std::optional<checkpoint::CheckpointPack> pack;
  if (!a.pack.empty()) pack = checkpoint::load_pack_file(a.pack);

  // The game is local for practice ids; anything else must arrive through an adapter.
  std::unique_ptr<gateway::Gateway> gw;
  std::unique_ptr<env::Environment> game;
  if (!a.adapter_bind.empty()) {
    auto [host, port] = gateway::parse_bind_address(a.adapter_bind);
    gateway::GatewayOptions options;
    options.host = host;
    options.port = port;
    gw = std::make_unique<gateway::Gateway>(options);
    gw->register_game(a.game, {nullptr, pack ? std::make_shared<checkpoint::CheckpointPack>(*pack) : nullptr});
    gw->start();
    std::cerr << "waiting for an adapter serving " << a.game << " on port " << gw->port() << "\n";
    auto link = gw->wait_for_adapter(a.game, std::chrono::seconds(a.adapter_wait_s));
    if (!link) {
      std::cerr << "no adapter connected within " << a.adapter_wait_s << " s\n";
      return 2;
    }
    game = std::make_unique<gateway::RemoteEnvironment>(link, !realtime);
  } else if (is_practice_game(a.game)) {
    game = practice::make_practice_game(a.game);
  } else {
    throw std::invalid_argument("\"" + a.game + "\" is not a practice game; serve it with --adapter-bind");
  }
  if (a.oracle && !a.adapter_bind.empty()) throw std::invalid_argument("--oracle needs a local practice game");

  env::SystemTimeSource clock;
  auto driver = realtime ? env::make_realtime_driver(*game, clock) : env::make_lite_driver(*game);

  ExchangeBuffer exchanges;
  std::unique_ptr<agent::ModelClient> model;
  if (a.oracle) {
    model = agent::make_oracle_model(*game);
  } else {
    model = std::make_unique<agent::HttpModelClient>(
        agent::HttpModelClient::Config{a.endpoint, a.api_key_env, a.timeout_s},
        [&exchanges](const agent::Exchange& e) { exchanges.push(e); });
  }

  agent::AgentConfig agent_config;
  agent_config.interface = a.interface == "console" ? agent::Interface::Console : agent::Interface::Desktop;
  if (!a.prompt_file.empty()) {
    std::ifstream in(a.prompt_file);
    if (!in) throw std::runtime_error("cannot read " + a.prompt_file);
    agent_config.system_prompt.assign(std::istreambuf_iterator<char>(in), {});
  } else {
    agent_config.system_prompt = agent::load_prompt(a.prompts_dir, a.game);
  }
  agent_config.context_steps = a.context_steps;
  agent_config.settings = {a.oracle ? "oracle" : a.model, a.temperature, a.max_tokens, a.long_output};
  agent_config.bounds = game->surface_bounds();
  agent_config.prompt.downscale_history = a.downscale_history;
  agent::Agent agent(*model, agent_config);

  run::RunConfig config;
  config.game_id = a.game;
  config.mode = realtime ? env::ClockMode::Realtime : env::ClockMode::Lite;
  config.seed = a.seed;
  config.observation = {a.frames, a.spacing_ms, a.delay_ms};
  config.max_lite_steps = a.max_steps;
  config.cost_budget = a.cost_budget;
  env::validate(config.observation);

  run::PriceTable prices;
  if (a.price_prompt > 0 || a.price_completion > 0) prices[agent_config.settings.model] = {a.price_prompt, a.price_completion};

  std::ofstream log_file(a.log_out);
  if (!log_file) throw std::runtime_error("cannot write " + a.log_out);
  auto hooks = run::streaming_hooks(log_file);
  hooks.drain_exchanges = [&exchanges] { return exchanges.drain(); };
  auto on_turn = hooks.on_turn;
  hooks.on_turn = [&on_turn](const run::TurnRecord& t) {
    on_turn(t);
    std::cerr << "turn " << t.step << ": " << (t.errored ? "(no action) " + t.error : t.action_name + " " + t.action_input)
              << "  progress " << t.progress << "\n";
  };

  const auto record = run::run(config, *driver, agent, pack ? &*pack : nullptr, hooks, prices);
  const auto& f = record.footer;
  std::cout << run::termination_name(f.termination) << " after " << f.turns << " turns, progress " << f.progress;
  if (!f.furthest_label.empty()) std::cout << " (" << f.furthest_label << ")";
  if (!f.detail.empty()) std::cout << ": " << f.detail;
  std::cout << "\n";
  const bool failed = f.termination == run::Termination::Aborted || f.termination == run::Termination::ModelUnavailable;
  return failed ? 1 : 0;
}

// --- replay -------------------------------------------------------------------------------

int replay_cmd(const std::string& log) {
  const auto record = run::read_log_file(log);
  const auto& game_id = record.header.config.game_id;
  if (!is_practice_game(game_id)) {
    std::cerr << "replay needs a local game; \"" << game_id << "\" is not one\n";
    return 2;
  }
  auto game = practice::make_practice_game(game_id);
  const auto result = run::replay(record, *game);
  if (result.identical) {
    std::cout << "identical: " << result.turns_replayed << " turns reproduced\n";
    return 0;
  }
  std::cout << "diverged at step " << result.first_divergence.value_or(0) << ": " << result.detail << "\n";
  return 1;
}

// --- practice -----------------------------------------------------------------------------

struct PracticeArgs {
  std::string game;
  std::uint64_t seed = 0;
  std::string frame_out;
};

int practice_cmd(const PracticeArgs& a) {
  auto game = practice::make_practice_game(a.game);
  auto driver = env::make_lite_driver(*game);
  auto frame = driver->reset(a.seed);
  auto show = [&](const Frame& f) {
    if (!a.frame_out.empty()) image::save_png(f, a.frame_out);
    const auto status = driver->status();
    std::cout << "progress " << driver->native_progress().value_or(0) << "  game time " << driver->game_time_ms()
              << " ms  " << env::outcome_name(status.outcome) << std::endl;
  };
  show(frame);
  std::string line;
  while (driver->status().outcome == env::Outcome::Running && std::getline(std::cin, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (line == "quit") break;
    try {
      driver->execute(action::parse_command(line, {}, driver->surface_bounds()));
    } catch (const action::ActionError& e) {
      std::cout << "error: " << e.what() << std::endl;
      continue;
    } catch (const env::CommandRejected& e) {
      std::cout << "rejected: " << e.what() << std::endl;
      continue;
    }
    show(driver->observe({1, 0, 0}).back());
  }
  return driver->status().outcome == env::Outcome::Completed ? 0 : 1;
}

// --- serve --------------------------------------------------------------------------------

struct ServeArgs {
  std::string bind = "127.0.0.1:8765";
  std::vector<std::string> packs;
  bool allow_realtime_humans = false;
  int adapter_deadline_ms = 5000;
  int frame_interval_ms = 100;
};

int serve_cmd(const ServeArgs& a) {
  auto [host, port] = gateway::parse_bind_address(a.bind);
  gateway::GatewayOptions options;
  options.host = host;
  options.port = port;
  options.allow_realtime_humans = a.allow_realtime_humans;
  options.adapter_deadline = std::chrono::milliseconds(a.adapter_deadline_ms);
  options.realtime_frame_interval = std::chrono::milliseconds(a.frame_interval_ms);

  std::map<std::string, gateway::GameEntry> entries;
  for (const auto& id : practice::practice_game_ids()) {
    entries[id].make = [id] { return practice::make_practice_game(id); };
  }
  for (const auto& path : a.packs) {
    auto pack = std::make_shared<checkpoint::CheckpointPack>(checkpoint::load_pack_file(path));
    entries[pack->game_id].pack = pack;
  }
  gateway::Gateway gw(options);
  for (auto& [id, entry] : entries) gw.register_game(id, std::move(entry));

  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  gw.start();
  std::cout << "serving on " << host << ":" << gw.port() << std::endl;
  int received = 0;
  sigwait(&stop_signals, &received);
  std::cout << "stopping" << std::endl;
  gw.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video-game agent harness: runs, checkpoint packs, practice games and the gateway"};
  app.require_subcommand(1);

  BuildPackArgs build;
  auto* build_cmd = app.add_subcommand("build-pack", "Hash a manifest of reference frames into a checkpoint pack");
  build_cmd->add_option("--manifest", build.manifest, "Manifest file")->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--out", build.out, "Pack file to write")->required();

  ScoreArgs score;
  auto* score_sub = app.add_subcommand("score", "Score a run log against a checkpoint pack");
  score_sub->add_option("--log", score.log, "Run log")->required()->check(CLI::ExistingFile);
  score_sub->add_option("--pack", score.pack, "Checkpoint pack")->required()->check(CLI::ExistingFile);

  RunArgs run_args;
  auto* run_sub = app.add_subcommand("run", "Play one game with an agent and write its run log");
  run_sub->add_option("--game", run_args.game, "Game id")->required();
  run_sub->add_option("--pack", run_args.pack, "Checkpoint pack for scoring")->check(CLI::ExistingFile);
  run_sub->add_option("--mode", run_args.mode, "Clock mode")->check(CLI::IsMember({"lite", "realtime"}))->capture_default_str();
  run_sub->add_option("--seed", run_args.seed, "Game seed")->capture_default_str();
  run_sub->add_option("--model-endpoint", run_args.endpoint, "Chat-completions URL");
  run_sub->add_flag("--oracle", run_args.oracle, "Play a practice game with the full-state oracle instead of a model");
  run_sub->add_option("--model", run_args.model, "Model name sent to the endpoint")->capture_default_str();
  run_sub->add_option("--api-key-env", run_args.api_key_env, "Environment variable holding the credential")
      ->capture_default_str();
  run_sub->add_option("--temperature", run_args.temperature)->capture_default_str();
  run_sub->add_option("--max-tokens", run_args.max_tokens, "Output token cap")->capture_default_str();
  run_sub->add_flag("--long-output", run_args.long_output, "Double the output token cap");
  run_sub->add_option("--timeout", run_args.timeout_s, "Model request timeout, seconds")->capture_default_str();
  run_sub->add_option("--prompts", run_args.prompts_dir, "Directory of <game>.txt system prompts")->capture_default_str();
  run_sub->add_option("--prompt", run_args.prompt_file, "System prompt file, overriding --prompts")
      ->check(CLI::ExistingFile);
  run_sub->add_option("--interface", run_args.interface, "Response format")
      ->check(CLI::IsMember({"desktop", "console"}))
      ->capture_default_str();
  run_sub->add_option("--context-steps", run_args.context_steps, "Turns of history in each prompt")->capture_default_str();
  run_sub->add_flag("--downscale-history", run_args.downscale_history, "Halve history frames");
  run_sub->add_option("--frames", run_args.frames, "Frames per observation")->capture_default_str();
  run_sub->add_option("--frame-spacing-ms", run_args.spacing_ms, "Gap between observed frames")->capture_default_str();
  run_sub->add_option("--action-delay-ms", run_args.delay_ms, "Wait after an action before observing")
      ->capture_default_str();
  run_sub->add_option("--max-steps", run_args.max_steps, "Step cap (defaults from the pack's walkthrough length)");
  run_sub->add_option("--cost-budget", run_args.cost_budget, "Spend allowed without progress");
  run_sub->add_option("--price-prompt", run_args.price_prompt, "Prompt price per million tokens");
  run_sub->add_option("--price-completion", run_args.price_completion, "Completion price per million tokens");
  run_sub->add_option("--log-out", run_args.log_out, "Run log to write")->required();
  run_sub->add_option("--adapter-bind", run_args.adapter_bind, "Serve host:port and play the game an adapter brings");
  run_sub->add_option("--adapter-wait", run_args.adapter_wait_s, "Seconds to wait for the adapter")->capture_default_str();

  std::string replay_log;
  auto* replay_sub = app.add_subcommand("replay", "Re-execute a Lite run log and check every frame hash");
  replay_sub->add_option("--log", replay_log, "Run log")->required()->check(CLI::ExistingFile);

  PracticeArgs practice_args;
  auto* practice_sub = app.add_subcommand("practice", "Play a practice game from stdin, one command per line");
  practice_sub->add_option("--game", practice_args.game)
      ->required()
      ->check(CLI::IsMember(practice::practice_game_ids()));
  practice_sub->add_option("--seed", practice_args.seed)->capture_default_str();
  practice_sub->add_option("--frame-out", practice_args.frame_out, "PNG rewritten after every command");

  ServeArgs serve;
  auto* serve_sub = app.add_subcommand("serve", "Run the gateway for agents, humans, observers and adapters");
  serve_sub->add_option("--bind", serve.bind, "host:port")->capture_default_str();
  serve_sub->add_option("--pack", serve.packs, "Checkpoint pack to score its game's sessions (repeatable)")
      ->check(CLI::ExistingFile);
  serve_sub->add_flag("--allow-realtime-humans", serve.allow_realtime_humans);
  serve_sub->add_option("--adapter-deadline-ms", serve.adapter_deadline_ms)->capture_default_str();
  serve_sub->add_option("--frame-interval-ms", serve.frame_interval_ms, "Realtime frame push interval")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build_cmd) return build_pack_cmd(build);
    if (*score_sub) return score_cmd(score);
    if (*run_sub) return run_cmd(run_args);
    if (*replay_sub) return replay_cmd(replay_log);
    if (*practice_sub) return practice_cmd(practice_args);
    if (*serve_sub) return serve_cmd(serve);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

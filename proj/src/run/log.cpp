#include "arcade/run/log.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace arcade::run {

using json = nlohmann::json;

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

json hashes_json(const std::vector<FrameHashes>& frames) {
  json out = json::array();
  for (const auto& f : frames) out.push_back({phash::to_string(f.average), phash::to_string(f.difference)});
  return out;
}

std::vector<FrameHashes> hashes_from(const json& j) {
  std::vector<FrameHashes> out;
  for (const auto& f : j) {
    FrameHashes h{phash::parse_hash(f.at(0).get<std::string>()), phash::parse_hash(f.at(1).get<std::string>())};
    if (h.average.algorithm != phash::HashAlgorithm::Average ||
        h.difference.algorithm != phash::HashAlgorithm::Difference) {
      throw std::invalid_argument("frame hashes must be [ahash, dhash]");
    }
    out.push_back(h);
  }
  return out;
}

json matches_json(const std::vector<checkpoint::MatchEvent>& events) {
  json out = json::array();
  for (const auto& e : events) out.push_back({e.step, e.checkpoint, e.distance});
  return out;
}

std::vector<checkpoint::MatchEvent> matches_from(const json& j) {
  std::vector<checkpoint::MatchEvent> out;
  for (const auto& e : j) {
    out.push_back({e.at(0).get<std::uint64_t>(), e.at(1).get<std::size_t>(), e.at(2).get<int>()});
  }
  return out;
}

json usage_json(const agent::TokenUsage& u) { return {{"prompt", u.prompt_tokens}, {"completion", u.completion_tokens}}; }

agent::TokenUsage usage_from(const json& j) {
  return {j.at("prompt").get<std::int64_t>(), j.at("completion").get<std::int64_t>()};
}

std::string_view mode_name(env::ClockMode m) { return m == env::ClockMode::Lite ? "lite" : "realtime"; }

env::ClockMode mode_from(const std::string& s) {
  if (s == "lite") return env::ClockMode::Lite;
  if (s == "realtime") return env::ClockMode::Realtime;
  throw std::invalid_argument("unknown clock mode \"" + s + "\"");
}

json config_json(const RunConfig& c) {
  return {{"game_id", c.game_id},
          {"mode", mode_name(c.mode)},
          {"seed", c.seed},
          {"walkthrough_length_ms", opt(c.walkthrough_length_ms)},
          {"max_game_time_ms", opt(c.max_game_time_ms)},
          {"max_lite_steps", opt(c.max_lite_steps)},
          {"stuck_step_limit", c.stuck_step_limit},
          {"no_progress_step_limit", c.no_progress_step_limit},
          {"same_spot_loss_limit", c.same_spot_loss_limit},
          {"observation",
           {{"frames", c.observation.frames_per_observation},
            {"spacing_ms", c.observation.frame_spacing_ms},
            {"delay_ms", c.observation.post_action_delay_ms}}},
          {"cost_budget", opt(c.cost_budget)}};
}

RunConfig config_from(const json& j) {
  RunConfig c;
  c.game_id = j.at("game_id").get<std::string>();
  c.mode = mode_from(j.at("mode").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.walkthrough_length_ms = get_opt<std::int64_t>(j, "walkthrough_length_ms");
  c.max_game_time_ms = get_opt<std::int64_t>(j, "max_game_time_ms");
  c.max_lite_steps = get_opt<std::uint64_t>(j, "max_lite_steps");
  c.stuck_step_limit = j.at("stuck_step_limit").get<std::uint64_t>();
  c.no_progress_step_limit = j.at("no_progress_step_limit").get<std::uint64_t>();
  c.same_spot_loss_limit = j.at("same_spot_loss_limit").get<std::uint32_t>();
  const auto& o = j.at("observation");
  c.observation = {o.at("frames").get<int>(), o.at("spacing_ms").get<std::int64_t>(),
                   o.at("delay_ms").get<std::int64_t>()};
  c.cost_budget = get_opt<double>(j, "cost_budget");
  return c;
}

json limits_json(const Limits& l) {
  return {{"max_game_time_ms", opt(l.max_game_time_ms)}, {"max_steps", opt(l.max_steps)},
          {"stuck_steps", l.stuck_steps},                {"no_progress_steps", l.no_progress_steps},
          {"same_spot_losses", l.same_spot_losses},      {"cost_budget", opt(l.cost_budget)}};
}

Limits limits_from(const json& j) {
  Limits l;
  l.max_game_time_ms = get_opt<std::int64_t>(j, "max_game_time_ms");
  l.max_steps = get_opt<std::uint64_t>(j, "max_steps");
  l.stuck_steps = j.at("stuck_steps").get<std::uint64_t>();
  l.no_progress_steps = j.at("no_progress_steps").get<std::uint64_t>();
  l.same_spot_losses = j.at("same_spot_losses").get<std::uint32_t>();
  l.cost_budget = get_opt<double>(j, "cost_budget");
  return l;
}

RunHeader header_from(const json& j) {
  RunHeader h;
  h.version = j.at("version").get<int>();
  if (h.version != 1) throw std::invalid_argument("unsupported log version " + std::to_string(h.version));
  h.config = config_from(j.at("config"));
  h.limits = limits_from(j.at("limits"));
  const auto& m = j.at("model");
  h.model = m.at("name").get<std::string>();
  h.temperature = m.at("temperature").get<double>();
  h.max_output_tokens = m.at("max_output_tokens").get<int>();
  h.pack_game_id = j.at("pack").get<std::string>();
  h.initial_frames = hashes_from(j.at("frames"));
  h.initial_matches = matches_from(j.at("matches"));
  h.started_at_ms = j.at("started_at_ms").get<std::int64_t>();
  return h;
}

TurnRecord turn_from(const json& j) {
  TurnRecord t;
  t.step = j.at("step").get<std::uint64_t>();
  t.thought = j.at("thought").get<std::string>();
  t.action_name = j.at("action").get<std::string>();
  t.action_input = j.at("action_input").get<std::string>();
  t.memory_update = j.at("memory").get<std::string>();
  t.raw_response = j.at("raw").get<std::string>();
  t.commands = j.at("commands").get<std::vector<std::string>>();
  t.errored = j.at("errored").get<bool>();
  t.error = j.at("error").get<std::string>();
  t.start_select_hazard = j.at("start_select").get<bool>();
  t.rejected = j.at("rejected").get<std::string>();
  t.attempts = j.at("attempts").get<int>();
  t.usage = usage_from(j.at("usage"));
  t.cost = j.at("cost").get<double>();
  t.frames = hashes_from(j.at("frames"));
  t.matches = matches_from(j.at("matches"));
  t.furthest_index = get_opt<std::size_t>(j, "furthest");
  t.progress = j.at("progress").get<double>();
  t.game_time_ms = j.at("game_time_ms").get<std::int64_t>();
  t.losses = j.at("losses").get<std::uint32_t>();
  for (const auto& e : j.at("exchanges")) {
    t.exchanges.push_back(
        {e.at("request").get<std::string>(), e.at("response").get<std::string>(), e.at("status").get<int>()});
  }
  t.wall_ms = j.at("wall_ms").get<std::int64_t>();
  t.model_ms = j.at("model_ms").get<std::int64_t>();
  return t;
}

RunFooter footer_from(const json& j) {
  RunFooter f;
  f.termination = termination_from_name(j.at("termination").get<std::string>());
  f.detail = j.at("detail").get<std::string>();
  f.turns = j.at("turns").get<std::uint64_t>();
  f.progress = j.at("progress").get<double>();
  f.furthest_index = get_opt<std::size_t>(j, "furthest");
  f.furthest_label = j.at("furthest_label").get<std::string>();
  f.game_time_ms = j.at("game_time_ms").get<std::int64_t>();
  f.usage = usage_from(j.at("usage"));
  f.cost = j.at("cost").get<double>();
  f.wall_duration_ms = j.at("wall_duration_ms").get<std::int64_t>();
  return f;
}

}  // namespace

std::string header_line(const RunHeader& h, const LogOptions& options) {
  json j = {{"type", "header"},
            {"version", h.version},
            {"config", config_json(h.config)},
            {"limits", limits_json(h.limits)},
            {"model", {{"name", h.model}, {"temperature", h.temperature}, {"max_output_tokens", h.max_output_tokens}}},
            {"pack", h.pack_game_id},
            {"frames", hashes_json(h.initial_frames)},
            {"matches", matches_json(h.initial_matches)},
            {"started_at_ms", options.include_wall_clock ? h.started_at_ms : 0}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string turn_line(const TurnRecord& t, const LogOptions& options) {
  json exchanges = json::array();
  for (const auto& e : t.exchanges) {
    exchanges.push_back({{"request", e.request}, {"response", e.response}, {"status", e.status}});
  }
  json j = {{"type", "turn"},
            {"step", t.step},
            {"thought", t.thought},
            {"action", t.action_name},
            {"action_input", t.action_input},
            {"memory", t.memory_update},
            {"raw", t.raw_response},
            {"commands", t.commands},
            {"errored", t.errored},
            {"error", t.error},
            {"start_select", t.start_select_hazard},
            {"rejected", t.rejected},
            {"attempts", t.attempts},
            {"usage", usage_json(t.usage)},
            {"cost", t.cost},
            {"frames", hashes_json(t.frames)},
            {"matches", matches_json(t.matches)},
            {"furthest", opt(t.furthest_index)},
            {"progress", t.progress},
            {"game_time_ms", t.game_time_ms},
            {"losses", t.losses},
            {"exchanges", std::move(exchanges)},
            {"wall_ms", options.include_wall_clock ? t.wall_ms : 0},
            {"model_ms", options.include_wall_clock ? t.model_ms : 0}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string footer_line(const RunFooter& f, const LogOptions& options) {
  json j = {{"type", "footer"},
            {"termination", termination_name(f.termination)},
            {"detail", f.detail},
            {"turns", f.turns},
            {"progress", f.progress},
            {"furthest", opt(f.furthest_index)},
            {"furthest_label", f.furthest_label},
            {"game_time_ms", f.game_time_ms},
            {"usage", usage_json(f.usage)},
            {"cost", f.cost},
            {"wall_duration_ms", options.include_wall_clock ? f.wall_duration_ms : 0}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_log(const RunRecord& record, std::ostream& out, const LogOptions& options) {
  out << header_line(record.header, options) << '\n';
  for (const auto& t : record.turns) out << turn_line(t, options) << '\n';
  out << footer_line(record.footer, options) << '\n';
}

RunRecord read_log(std::istream& in) {
  RunRecord record;
  enum class Expect { Header, Body, Done } expect = Expect::Header;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    if (expect == Expect::Done) throw CorruptLog(n, "content after footer");
    try {
      const auto j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (expect == Expect::Header) {
        if (type != "header") throw CorruptLog(n, "expected header, found \"" + type + "\"");
        record.header = header_from(j);
        expect = Expect::Body;
      } else if (type == "turn") {
        auto turn = turn_from(j);
        if (turn.step != record.turns.size() + 1) throw CorruptLog(n, "turn steps out of order");
        record.turns.push_back(std::move(turn));
      } else if (type == "footer") {
        record.footer = footer_from(j);
        if (record.footer.turns != record.turns.size()) throw CorruptLog(n, "footer turn count disagrees");
        expect = Expect::Done;
      } else {
        throw CorruptLog(n, "unexpected record type \"" + type + "\"");
      }
    } catch (const CorruptLog&) {
      throw;
    } catch (const std::exception& e) {
      throw CorruptLog(n, e.what());
    }
  }
  if (expect == Expect::Header) throw CorruptLog(n + 1, "missing header");
  if (expect == Expect::Body) throw CorruptLog(n + 1, "missing footer");
  return record;
}

RunRecord read_log_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run log " + path.string());
  return read_log(in);
}

RunHooks streaming_hooks(std::ostream& out, const LogOptions& options) {
  RunHooks hooks;
  hooks.on_header = [&out, options](const RunHeader& h) { out << header_line(h, options) << '\n' << std::flush; };
  hooks.on_turn = [&out, options](const TurnRecord& t) { out << turn_line(t, options) << '\n' << std::flush; };
  hooks.on_footer = [&out, options](const RunFooter& f) { out << footer_line(f, options) << '\n' << std::flush; };
  return hooks;
}

}  // namespace arcade::run

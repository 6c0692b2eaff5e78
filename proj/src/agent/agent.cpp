#include "arcade/agent/agent.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace arcade::agent {

using json = nlohmann::json;

ContextWindow::ContextWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("context window needs room for at least one step");
}

void ContextWindow::push(HistoryEntry entry) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(entry));
}

Frame downscale_2x(const Frame& frame) {
  const int w = std::max(1, frame.width() / 2), h = std::max(1, frame.height() / 2);
  if (frame.width() < 2 || frame.height() < 2) return frame;
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb p[4] = {frame.at(2 * x, 2 * y), frame.at(2 * x + 1, 2 * y), frame.at(2 * x, 2 * y + 1),
                        frame.at(2 * x + 1, 2 * y + 1)};
      out.push_back(static_cast<std::uint8_t>((p[0].r + p[1].r + p[2].r + p[3].r + 2) / 4));
      out.push_back(static_cast<std::uint8_t>((p[0].g + p[1].g + p[2].g + p[3].g + 2) / 4));
      out.push_back(static_cast<std::uint8_t>((p[0].b + p[1].b + p[2].b + p[3].b + 2) / 4));
    }
  }
  return Frame(w, h, std::move(out), frame.captured_at_ms());
}

std::vector<Message> build_messages(const std::string& system_prompt, const ContextWindow& window,
                                    const Scratchpad& memory, const std::vector<Frame>& frames,
                                    const PromptOptions& options) {
  std::vector<Message> out;
  out.push_back({Role::System, {ContentPart{system_prompt, std::nullopt}}});
  for (const auto& entry : window.entries()) {
    auto frame = options.downscale_history ? downscale_2x(entry.frame) : entry.frame;
    out.push_back({Role::User, {ContentPart{{}, std::move(frame)}}});
    out.push_back({Role::Assistant, {ContentPart{"Thought: " + entry.thought + "\nAction: " + entry.action, {}}}});
  }
  Message current{Role::User, {}};
  for (const auto& f : frames) current.parts.push_back({{}, f});
  current.parts.push_back({"Memory:\n" + memory.text(), std::nullopt});
  out.push_back(std::move(current));
  return out;
}

// --- response parsing ---------------------------------------------------------

namespace {

// Escapes raw control characters that appear inside JSON strings.
std::string escape_raw_controls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  bool escaped = false;
  for (char c : text) {
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      } else if (c == '\n') {
        out += "\\n";
        continue;
      } else if (c == '\r') {
        out += "\\r";
        continue;
      } else if (c == '\t') {
        out += "\\t";
        continue;
      }
    } else if (c == '"') {
      in_string = true;
    }
    out += c;
  }
  return out;
}

std::string string_field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number()) return it->dump();
  throw MalformedResponse(std::string("field \"") + key + "\" is not a string");
}

}  // namespace

AgentTurn parse_desktop_response(const std::string& text, const action::DefaultTimings& timings,
                                 const action::SurfaceBounds& bounds) {
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw MalformedResponse("no JSON object in response");
  }
  json doc;
  try {
    doc = json::parse(escape_raw_controls(std::string_view(text).substr(open, close - open + 1)));
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("unparseable JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("action")) throw MalformedResponse("response object has no \"action\"");

  AgentTurn turn;
  turn.raw_response = text;
  turn.thought = string_field(doc, "thought");
  turn.action_name = string_field(doc, "action");
  turn.action_input = string_field(doc, "action_input");
  turn.memory_update = string_field(doc, "memory");
  turn.parsed.push_back(action::parse_dos_action(turn.action_name, turn.action_input, timings, bounds));
  return turn;
}

AgentTurn parse_console_response(const std::string& text, const action::DefaultTimings& timings) {
  auto list = action::parse_gameboy_actions(text, timings);
  AgentTurn turn;
  turn.raw_response = text;
  turn.thought = list.outside_text;
  turn.start_select_hazard = list.start_select_hazard;
  action::ActionCommand cmd = action::ButtonSequence{std::move(list.chords)};
  auto line = action::serialize(cmd, timings);
  turn.action_name = std::string(action::action_name(cmd));
  turn.action_input = line.size() > turn.action_name.size() ? line.substr(turn.action_name.size() + 1) : "";
  turn.parsed.push_back(std::move(cmd));
  return turn;
}

std::string load_prompt(const std::filesystem::path& dir, const std::string& game_id) {
  std::ifstream in(dir / (game_id + ".txt"));
  if (!in) throw std::runtime_error("no prompt asset for game \"" + game_id + "\" in " + dir.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// --- Agent ----------------------------------------------------------------------

Agent::Agent(ModelClient& model, AgentConfig config)
    : model_(model), config_(std::move(config)), window_(config_.context_steps) {
  if (config_.max_retries < 0) throw std::invalid_argument("max_retries must be non-negative");
}

AgentTurn Agent::parse(const std::string& text) const {
  if (config_.interface == Interface::Console) return parse_console_response(text, config_.timings);
  return parse_desktop_response(text, config_.timings, config_.bounds);
}

AgentTurn Agent::step(const std::vector<Frame>& frames) {
  if (frames.empty()) throw std::invalid_argument("an agent step needs at least one frame");
  const auto messages = build_messages(config_.system_prompt, window_, memory_, frames, config_.prompt);
  const int transport_attempts = std::max(1, config_.max_retries);

  AgentTurn turn;
  TokenUsage usage;
  int attempts = 0;
  int transport_failures = 0;
  int malformed = 0;
  std::string last_raw;
  for (;;) {
    ModelReply reply;
    ++attempts;
    try {
      reply = model_.complete(messages, config_.settings);
    } catch (const TransportError& e) {
      if (++transport_failures >= transport_attempts) {
        throw ModelUnavailable("model unavailable after " + std::to_string(transport_failures) +
                               " attempts: " + e.what());
      }
      continue;
    }
    usage.prompt_tokens += reply.usage.prompt_tokens;
    usage.completion_tokens += reply.usage.completion_tokens;
    try {
      turn = parse(reply.text);
      break;
    } catch (const std::exception& e) {
      if (!dynamic_cast<const MalformedResponse*>(&e) && !dynamic_cast<const action::ActionError*>(&e)) throw;
      if (malformed++ >= config_.max_retries) {
        turn = AgentTurn{};
        turn.raw_response = reply.text;
        turn.errored = true;
        turn.error = e.what();
        break;
      }
    }
  }
  turn.attempts = attempts;
  turn.usage = usage;

  memory_.update(turn.memory_update);
  std::string action_text = turn.errored ? "(no valid action: " + turn.error + ")"
                                         : action::serialize(turn.parsed.front(), config_.timings);
  window_.push({frames.back(), turn.thought, std::move(action_text)});
  return turn;
}

}  // namespace arcade::agent

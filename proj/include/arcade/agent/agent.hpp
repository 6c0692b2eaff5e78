#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcade/action/parse.hpp"
#include "arcade/agent/model.hpp"

namespace arcade::agent {

/// Agent-maintained notes. Only a non-empty update replaces the text.
class Scratchpad {
 public:
  const std::string& text() const { return text_; }
  void update(const std::string& memory) {
    if (!memory.empty()) text_ = memory;
  }

 private:
  std::string text_;
};

struct HistoryEntry {
  Frame frame;
  std::string thought;
  std::string action;  // canonical command text, or a marker for a failed turn
  bool operator==(const HistoryEntry&) const = default;
};

/// The last `capacity` steps, oldest first; pushing beyond capacity evicts the oldest.
class ContextWindow {
 public:
  explicit ContextWindow(std::size_t capacity = 20);
  void push(HistoryEntry entry);
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  const std::deque<HistoryEntry>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::deque<HistoryEntry> entries_;
};

struct PromptOptions {
  /// Halve the resolution of frames in the history to bound request size.
  bool downscale_history = false;
};

/// System prompt, then the history as alternating user (frame) and assistant (thought, action)
/// messages, then one user message holding the current frames and the memory text.
std::vector<Message> build_messages(const std::string& system_prompt, const ContextWindow& window,
                                    const Scratchpad& memory, const std::vector<Frame>& frames,
                                    const PromptOptions& options = {});

/// 2x box downsample (odd trailing rows/columns are dropped).
Frame downscale_2x(const Frame& frame);

enum class Interface : std::uint8_t { Desktop, Console };

struct AgentTurn {
  std::string thought;
  std::string action_name;
  std::string action_input;
  std::string memory_update;
  std::string raw_response;
  std::vector<action::ActionCommand> parsed;
  bool start_select_hazard = false;
  bool errored = false;  // no usable response after all retries
  std::string error;     // last parse error when errored
  int attempts = 0;      // model calls made for this turn
  TokenUsage usage;      // summed over attempts
};

class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads the JSON object {thought, action, action_input, memory}. Throws MalformedResponse or
/// ActionError.
AgentTurn parse_desktop_response(const std::string& text, const action::DefaultTimings& timings = {},
                                 const action::SurfaceBounds& bounds = action::kDesktopSurface);
/// Reads a ```actions block; the thought is the text around it. Throws ActionError.
AgentTurn parse_console_response(const std::string& text, const action::DefaultTimings& timings = {});

/// Reads prompts/<game_id>.txt from `dir`. Throws std::runtime_error when missing.
std::string load_prompt(const std::filesystem::path& dir, const std::string& game_id);

struct AgentConfig {
  Interface interface = Interface::Desktop;
  std::string system_prompt;
  std::size_t context_steps = 20;
  int max_retries = 3;  // extra calls after a malformed response; also total transport attempts
  ModelSettings settings;
  action::DefaultTimings timings;
  action::SurfaceBounds bounds = action::kDesktopSurface;
  PromptOptions prompt;
};

/// ReAct loop state for one run. Calls into the model strictly one at a time.
class Agent {
 public:
  Agent(ModelClient& model, AgentConfig config);

  /// Builds the prompt from `frames`, queries the model and parses its answer. Malformed
  /// answers are retried up to max_retries times, after which a no-op turn is returned.
  /// Throws ModelUnavailable after max_retries consecutive transport failures.
  AgentTurn step(const std::vector<Frame>& frames);

  const Scratchpad& memory() const { return memory_; }
  const ContextWindow& window() const { return window_; }
  const AgentConfig& config() const { return config_; }

 private:
  AgentTurn parse(const std::string& text) const;

  ModelClient& model_;
  AgentConfig config_;
  Scratchpad memory_;
  ContextWindow window_;
};

}  // namespace arcade::agent

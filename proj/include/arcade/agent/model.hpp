#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcade/env/clock.hpp"
#include "arcade/image/frame.hpp"

namespace arcade::agent {

enum class Role : std::uint8_t { System, User, Assistant };
std::string_view role_name(Role role);

struct ContentPart {
  std::string text;          // used when image is empty
  std::optional<Frame> image;
  bool operator==(const ContentPart&) const = default;
};

struct Message {
  Role role = Role::User;
  std::vector<ContentPart> parts;
  bool operator==(const Message&) const = default;
};

struct ModelSettings {
  std::string model = "mock";
  double temperature = 0.7;
  int max_output_tokens = 1024;
  /// Some models spend much of their budget on reflection; this doubles the output cap.
  bool long_output = false;

  int effective_max_tokens() const { return long_output ? 2 * max_output_tokens : max_output_tokens; }
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool operator==(const TokenUsage&) const = default;
};

struct ModelReply {
  std::string text;
  TokenUsage usage;
};

/// Raised by a client when the endpoint cannot be reached or answers with a transport error.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual ModelReply complete(const std::vector<Message>& messages, const ModelSettings& settings) = 0;
};

/// Plays back a fixed transcript. Each step may sleep on a time source first (simulated
/// inference latency) and may fail with a TransportError instead of answering.
class MockModel final : public ModelClient {
 public:
  struct Step {
    std::string text;
    std::int64_t delay_ms = 0;
    bool transport_failure = false;
  };

  explicit MockModel(std::vector<Step> script, env::TimeSource* time = nullptr, bool repeat_last = true);
  static MockModel replying(std::string text, std::int64_t delay_ms = 0, env::TimeSource* time = nullptr);

  ModelReply complete(const std::vector<Message>& messages, const ModelSettings& settings) override;

  std::size_t calls() const { return calls_; }
  /// Largest number of complete() calls that were ever running at once.
  int max_in_flight() const { return max_in_flight_; }
  const std::vector<std::size_t>& message_counts() const { return message_counts_; }

 private:
  std::vector<Step> script_;
  env::TimeSource* time_;
  bool repeat_last_;
  std::size_t calls_ = 0;
  std::atomic<int> in_flight_{0};
  int max_in_flight_ = 0;
  std::vector<std::size_t> message_counts_;
};

/// Answers every call with whatever `respond` returns; used for scripted and oracle players.
class CallbackModel final : public ModelClient {
 public:
  explicit CallbackModel(std::function<std::string(const std::vector<Message>&)> respond)
      : respond_(std::move(respond)) {}
  ModelReply complete(const std::vector<Message>& messages, const ModelSettings&) override {
    return {respond_(messages), {}};
  }

 private:
  std::function<std::string(const std::vector<Message>&)> respond_;
};

/// One request/response exchange, as written to the run log.
struct Exchange {
  std::string request;   // JSON body with credentials and image payloads elided
  std::string response;  // raw response body
  int status = 0;
  bool operator==(const Exchange&) const = default;
};

/// Chat-completions style HTTP client. The credential comes from an environment variable and
/// never appears in logged bodies.
class HttpModelClient final : public ModelClient {
 public:
  struct Config {
    std::string endpoint;  // e.g. "https://host/v1/chat/completions"
    std::string api_key_env = "ARCADE_API_KEY";
    int timeout_s = 120;
  };

  explicit HttpModelClient(Config config, std::function<void(const Exchange&)> log = {});
  ModelReply complete(const std::vector<Message>& messages, const ModelSettings& settings) override;

  /// Request body for the given conversation, with images as base64 PNG data URLs.
  static std::string request_body(const std::vector<Message>& messages, const ModelSettings& settings,
                                  bool elide_images);

 private:
  Config config_;
  std::function<void(const Exchange&)> log_;
};

}  // namespace arcade::agent

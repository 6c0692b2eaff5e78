#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "arcade/env/environment.hpp"
#include "arcade/image/frame.hpp"

namespace arcade::gateway {

using json = nlohmann::json;

inline constexpr int kProtocolVersion = 1;

enum class Role : std::uint8_t { Agent, Human, Observer, Adapter };
std::string_view role_name(Role role);
std::optional<Role> role_from_name(std::string_view name);
inline bool is_controller(Role role) { return role == Role::Agent || role == Role::Human; }

/// Message types. The first nine form the client protocol; reset, press, release and advance
/// are sent only from the gateway to emulator adapters.
enum class MessageType : std::uint8_t {
  Hello,
  Frame,
  Action,
  Ack,
  Pause,
  Resume,
  Score,
  Error,
  Bye,
  Reset,
  Press,
  Release,
  Advance,
};
std::string_view type_name(MessageType type);
std::optional<MessageType> type_from_name(std::string_view name);

/// A message the peer should not have sent (bad JSON, unknown type, missing fields, wrong
/// role). The gateway answers with an error and closes that connection only.
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses one message and checks that it is an object with a known "type".
json parse_message(std::string_view text);
MessageType message_type(const json& message);

/// Field access that turns absence or a wrong JSON type into ProtocolViolation.
template <typename T>
T field(const json& message, const char* key) {
  auto it = message.find(key);
  if (it == message.end()) throw ProtocolViolation(std::string("missing field \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ProtocolViolation(std::string("field \"") + key + "\" has the wrong type");
  }
}

template <typename T>
T field_or(const json& message, const char* key, T fallback) {
  return message.contains(key) ? field<T>(message, key) : fallback;
}

/// Lossless frame payload: base64 PNG plus dimensions and capture time.
json encode_frame(const Frame& frame);
Frame decode_frame(const json& payload);

std::string outcome_tag(env::Outcome outcome);
env::Outcome outcome_from_tag(std::string_view tag);

json error_message(std::string_view code, std::string_view message, const json& id = nullptr);

}  // namespace arcade::gateway

#include "arcade/gateway/protocol.hpp"

#include <array>

#include "arcade/image/image_io.hpp"

namespace arcade::gateway {

namespace {

constexpr std::array<std::string_view, 4> kRoles = {"agent", "human", "observer", "adapter"};
constexpr std::array<std::string_view, 13> kTypes = {"hello", "frame", "action",  "ack",     "pause",
                                                     "resume", "score", "error",  "bye",     "reset",
                                                     "press", "release", "advance"};
constexpr std::array<std::string_view, 4> kOutcomes = {"running", "completed", "locked", "exhausted"};

}  // namespace

std::string_view role_name(Role role) { return kRoles.at(static_cast<std::size_t>(role)); }

std::optional<Role> role_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kRoles.size(); ++i) {
    if (kRoles[i] == name) return static_cast<Role>(i);
  }
  return std::nullopt;
}

std::string_view type_name(MessageType type) { return kTypes.at(static_cast<std::size_t>(type)); }

std::optional<MessageType> type_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTypes.size(); ++i) {
    if (kTypes[i] == name) return static_cast<MessageType>(i);
  }
  return std::nullopt;
}

json parse_message(std::string_view text) {
  json message = json::parse(text, nullptr, false);
  if (message.is_discarded()) throw ProtocolViolation("message is not valid JSON");
  if (!message.is_object()) throw ProtocolViolation("message must be a JSON object");
  message_type(message);
  return message;
}

MessageType message_type(const json& message) {
  const auto name = field<std::string>(message, "type");
  auto type = type_from_name(name);
  if (!type) throw ProtocolViolation("unknown message type \"" + name + "\"");
  return *type;
}

json encode_frame(const Frame& frame) {
  return {{"width", frame.width()},
          {"height", frame.height()},
          {"captured_at_ms", frame.captured_at_ms()},
          {"png", image::base64_encode(image::encode_png(frame))}};
}

Frame decode_frame(const json& payload) {
  try {
    auto frame = image::decode_png(image::base64_decode(field<std::string>(payload, "png")));
    if (frame.width() != field<int>(payload, "width") || frame.height() != field<int>(payload, "height")) {
      throw ProtocolViolation("frame dimensions disagree with the image");
    }
    return frame.with_timestamp(field_or<std::int64_t>(payload, "captured_at_ms", 0));
  } catch (const ProtocolViolation&) {
    throw;
  } catch (const std::exception& e) {
    throw ProtocolViolation(std::string("unreadable frame image: ") + e.what());
  }
}

std::string outcome_tag(env::Outcome outcome) { return std::string(kOutcomes.at(static_cast<std::size_t>(outcome))); }

env::Outcome outcome_from_tag(std::string_view tag) {
  for (std::size_t i = 0; i < kOutcomes.size(); ++i) {
    if (kOutcomes[i] == tag) return static_cast<env::Outcome>(i);
  }
  throw ProtocolViolation("unknown outcome \"" + std::string(tag) + "\"");
}

json error_message(std::string_view code, std::string_view message, const json& id) {
  json out = {{"type", "error"}, {"code", code}, {"message", message}};
  if (!id.is_null()) out["id"] = id;
  return out;
}

}  // namespace arcade::gateway

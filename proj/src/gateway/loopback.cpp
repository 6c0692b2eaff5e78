#include "arcade/gateway/loopback.hpp"

#include "arcade/action/parse.hpp"
#include "arcade/gateway/protocol.hpp"

namespace arcade::gateway {

LoopbackAdapter::LoopbackAdapter(std::unique_ptr<env::Environment> env, const std::string& host, unsigned short port,
                                 std::string game_id)
    : env_(std::move(env)), game_id_(game_id.empty() ? env_->game_id() : std::move(game_id)), client_(host, port) {
  const auto bounds = env_->surface_bounds();
  client_.send(json{{"type", "hello"},
                    {"version", kProtocolVersion},
                    {"role", "adapter"},
                    {"game", game_id_},
                    {"bounds", {bounds.width, bounds.height}},
                    {"capabilities", {"reset", "action", "press", "release", "advance", "pause"}}}
                   .dump());
  auto reply = client_.receive();
  if (!reply) throw std::runtime_error("gateway did not answer the adapter hello");
  auto message = parse_message(*reply);
  if (message_type(message) != MessageType::Hello) {
    throw std::runtime_error("gateway refused the adapter: " + field_or<std::string>(message, "message", *reply));
  }
  thread_ = std::thread([this] { serve(); });
}

LoopbackAdapter::~LoopbackAdapter() {
  stop_ = true;
  client_.close();
  thread_.join();
}

void LoopbackAdapter::serve() {
  while (!stop_) {
    auto text = client_.receive(std::chrono::milliseconds(50));
    if (!text) {
      if (!client_.is_open()) return;
      continue;
    }
    handle(*text);
  }
}

void LoopbackAdapter::handle(const std::string& text) {
  json message;
  MessageType type;
  try {
    message = parse_message(text);
    type = message_type(message);
  } catch (const ProtocolViolation&) {
    return;
  }
  if (type == MessageType::Pause || type == MessageType::Resume) {
    paused_ = type == MessageType::Pause;
    return;
  }
  if (silent_) return;
  const auto seq = message.value("seq", json(nullptr));
  auto fail = [&](std::string_view code, std::string_view why) {
    auto err = error_message(code, why);
    err["seq"] = seq;
    client_.send(err.dump());
  };
  try {
    switch (type) {
      case MessageType::Reset:
        env_->reset(field<std::uint64_t>(message, "seed"));
        step_ = 0;
        game_time_ms_ = 0;
        break;
      case MessageType::Action:
        env_->apply(action::parse_command(field<std::string>(message, "text"), {}, env_->surface_bounds()));
        break;
      case MessageType::Press: {
        env::HeldInputs inputs;
        for (const auto& name : field<std::vector<std::string>>(message, "buttons")) {
          auto b = action::button_from_name(name);
          if (!b) throw ProtocolViolation("unknown button " + name);
          inputs.buttons.push_back(*b);
        }
        inputs.keys = field<std::vector<std::string>>(message, "keys");
        env_->press(inputs);
        break;
      }
      case MessageType::Release:
        env_->release();
        break;
      case MessageType::Advance: {
        const auto ms = field<std::int64_t>(message, "ms");
        env_->advance(ms);
        game_time_ms_ += ms;
        break;
      }
      default:
        return;
    }
  } catch (const env::CommandRejected& e) {
    fail("ExecutionRejected", e.what());
    return;
  } catch (const std::exception& e) {
    fail("AdapterFault", e.what());
    return;
  }
  const auto status = env_->status();
  const auto progress = env_->native_progress();
  const auto frame = env_->snapshot();
  json reply{{"type", "frame"},
             {"seq", seq},
             {"step", ++step_},
             {"game_time_ms", game_time_ms_},
             {"captured_at_ms", frame.captured_at_ms()},
             {"outcome", outcome_tag(status.outcome)},
             {"losses", status.losses},
             {"progress", progress ? json(*progress) : json(nullptr)}};
  if (type == MessageType::Reset || !last_sent_ || !last_sent_->same_pixels(frame)) {
    reply["frame"] = encode_frame(frame);
    last_sent_ = frame;
  }
  client_.send(reply.dump());
  ++served_;
}

}  // namespace arcade::gateway

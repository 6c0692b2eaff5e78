#include "arcade/gateway/remote_env.hpp"

#include "arcade/action/parse.hpp"

namespace arcade::gateway {

AdapterLink::AdapterLink(AdapterInfo info, std::function<void(std::string)> send, std::chrono::milliseconds deadline)
    : info_(std::move(info)), send_(std::move(send)), deadline_(deadline) {}

json AdapterLink::request(json message) {
  std::unique_lock lock(mutex_);
  if (!connected_) throw AdapterTimeout("adapter for \"" + info_.game_id + "\" is disconnected");
  const auto seq = next_seq_++;
  message["seq"] = seq;
  send_(message.dump());
  const bool answered = cv_.wait_for(lock, deadline_, [&] { return replies_.count(seq) > 0 || !connected_; });
  auto it = replies_.find(seq);
  if (it == replies_.end()) {
    throw AdapterTimeout(answered ? "adapter disconnected" : "no reply from adapter within " +
                                                                 std::to_string(deadline_.count()) + " ms");
  }
  auto reply = std::move(it->second);
  replies_.erase(it);
  return reply;
}

void AdapterLink::notify(const json& message) {
  std::lock_guard lock(mutex_);
  if (connected_) send_(message.dump());
}

void AdapterLink::deliver(json message) {
  auto seq = message.find("seq");
  if (seq == message.end() || !seq->is_number_unsigned()) return;
  const auto key = seq->get<std::uint64_t>();
  std::lock_guard lock(mutex_);
  replies_[key] = std::move(message);
  cv_.notify_all();
}

void AdapterLink::disconnect() {
  std::lock_guard lock(mutex_);
  connected_ = false;
  cv_.notify_all();
}

bool AdapterLink::connected() const {
  std::lock_guard lock(mutex_);
  return connected_;
}

RemoteEnvironment::RemoteEnvironment(std::shared_ptr<AdapterLink> link, bool lite) : link_(std::move(link)) {
  link_->notify({{"type", lite ? "pause" : "resume"}});
}

void RemoteEnvironment::exchange(json message) {
  auto reply = link_->request(std::move(message));
  try {
    if (message_type(reply) == MessageType::Error) {
      const auto code = field_or<std::string>(reply, "code", "");
      const auto text = field_or<std::string>(reply, "message", "");
      if (code == "ExecutionRejected") throw env::CommandRejected(text);
      throw std::runtime_error("adapter error " + code + ": " + text);
    }
    if (message_type(reply) != MessageType::Frame) throw ProtocolViolation("adapter replied with a non-frame");
    // Adapters may omit unchanged pixels; the capture time is always sent.
    if (reply.contains("frame")) {
      frame_ = decode_frame(field<json>(reply, "frame"));
    } else if (frame_) {
      frame_ = frame_->with_timestamp(field<std::int64_t>(reply, "captured_at_ms"));
    } else {
      throw ProtocolViolation("first adapter reply carries no frame");
    }
    status_.outcome = outcome_from_tag(field_or<std::string>(reply, "outcome", "running"));
    status_.losses = field_or<std::uint32_t>(reply, "losses", 0);
    progress_ = reply.contains("progress") && !reply["progress"].is_null()
                    ? std::optional<double>(field<double>(reply, "progress"))
                    : std::nullopt;
  } catch (const ProtocolViolation& e) {
    throw std::runtime_error(std::string("bad adapter reply: ") + e.what());
  }
}

Frame RemoteEnvironment::reset(std::uint64_t seed) {
  exchange({{"type", "reset"}, {"seed", seed}});
  return *frame_;
}

void RemoteEnvironment::apply(const action::ActionCommand& command) {
  exchange({{"type", "action"}, {"text", action::serialize(command)}});
}

void RemoteEnvironment::press(const env::HeldInputs& inputs) {
  json buttons = json::array();
  for (auto b : inputs.buttons) buttons.push_back(action::button_name(b));
  exchange({{"type", "press"}, {"buttons", std::move(buttons)}, {"keys", inputs.keys}});
}

void RemoteEnvironment::release() { exchange({{"type", "release"}}); }

void RemoteEnvironment::advance(std::int64_t dt_ms) {
  if (dt_ms == 0) return;
  exchange({{"type", "advance"}, {"ms", dt_ms}});
}

Frame RemoteEnvironment::snapshot() const {
  if (!frame_) throw std::logic_error("remote environment has not been reset");
  return *frame_;
}

}  // namespace arcade::gateway

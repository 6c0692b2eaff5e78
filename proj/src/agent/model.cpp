#include "arcade/agent/model.hpp"

#include <algorithm>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "arcade/image/image_io.hpp"

namespace arcade::agent {

using json = nlohmann::json;

std::string_view role_name(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

// --- MockModel ----------------------------------------------------------------

MockModel::MockModel(std::vector<Step> script, env::TimeSource* time, bool repeat_last)
    : script_(std::move(script)), time_(time), repeat_last_(repeat_last) {}

MockModel MockModel::replying(std::string text, std::int64_t delay_ms, env::TimeSource* time) {
  return MockModel({Step{std::move(text), delay_ms, false}}, time, true);
}

ModelReply MockModel::complete(const std::vector<Message>& messages, const ModelSettings&) {
  struct InFlight {
    std::atomic<int>& n;
    explicit InFlight(std::atomic<int>& counter) : n(counter) { ++n; }
    ~InFlight() { --n; }
  } guard(in_flight_);
  max_in_flight_ = std::max(max_in_flight_, in_flight_.load());

  const auto index = calls_++;
  message_counts_.push_back(messages.size());
  if (script_.empty() || (!repeat_last_ && index >= script_.size())) throw TransportError("mock script exhausted");
  const auto& step = script_[std::min(index, script_.size() - 1)];
  if (time_ && step.delay_ms > 0) time_->sleep_for(step.delay_ms);
  if (step.transport_failure) throw TransportError("mock transport failure");
  return {step.text, {static_cast<std::int64_t>(messages.size()) * 100, static_cast<std::int64_t>(step.text.size())}};
}

// --- HttpModelClient -----------------------------------------------------------

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("endpoint must start with http:// or https://");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

HttpModelClient::HttpModelClient(Config config, std::function<void(const Exchange&)> log)
    : config_(std::move(config)), log_(std::move(log)) {
  split_endpoint(config_.endpoint);
}

std::string HttpModelClient::request_body(const std::vector<Message>& messages, const ModelSettings& settings,
                                          bool elide_images) {
  json list = json::array();
  for (const auto& m : messages) {
    const bool text_only = std::all_of(m.parts.begin(), m.parts.end(), [](const auto& p) { return !p.image; });
    json content;
    if (text_only) {
      std::string text;
      for (const auto& p : m.parts) text += p.text;
      content = text;
    } else {
      content = json::array();
      for (const auto& p : m.parts) {
        if (!p.image) {
          content.push_back({{"type", "text"}, {"text", p.text}});
          continue;
        }
        auto png = image::encode_png(*p.image);
        std::string url = elide_images ? "data:image/png;base64,<" + std::to_string(png.size()) + " bytes elided>"
                                       : "data:image/png;base64," + image::base64_encode(png);
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", std::move(url)}}}});
      }
    }
    list.push_back({{"role", std::string(role_name(m.role))}, {"content", std::move(content)}});
  }
  json body = {{"model", settings.model},
               {"temperature", settings.temperature},
               {"max_tokens", settings.effective_max_tokens()},
               {"messages", std::move(list)}};
  return body.dump();
}

ModelReply HttpModelClient::complete(const std::vector<Message>& messages, const ModelSettings& settings) {
  const auto endpoint = split_endpoint(config_.endpoint);
  httplib::Client client(endpoint.base);
  client.set_connection_timeout(config_.timeout_s);
  client.set_read_timeout(config_.timeout_s);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const auto body = request_body(messages, settings, false);
  auto res = client.Post(endpoint.path, headers, body, "application/json");

  Exchange exchange;
  if (log_) exchange.request = request_body(messages, settings, true);
  if (!res) {
    exchange.response = "transport error: " + httplib::to_string(res.error());
    if (log_) log_(exchange);
    throw TransportError(exchange.response);
  }
  exchange.status = res->status;
  exchange.response = res->body;
  if (log_) log_(exchange);
  if (res->status != 200) throw TransportError("HTTP status " + std::to_string(res->status));

  try {
    auto doc = json::parse(res->body);
    ModelReply reply;
    reply.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
      reply.usage.prompt_tokens = usage->value("prompt_tokens", std::int64_t{0});
      reply.usage.completion_tokens = usage->value("completion_tokens", std::int64_t{0});
    }
    return reply;
  } catch (const json::exception& e) {
    throw TransportError(std::string("unreadable completion body: ") + e.what());
  }
}

}  // namespace arcade::agent

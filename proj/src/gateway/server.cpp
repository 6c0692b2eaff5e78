#include "arcade/gateway/server.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/websocket.hpp>

#include "arcade/action/parse.hpp"
#include "arcade/checkpoint/tracker.hpp"
#include "arcade/gateway/protocol.hpp"
#include "arcade/gateway/ws.hpp"
#include "arcade/practice/games.hpp"

namespace arcade::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::pair<std::string, unsigned short> parse_bind_address(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) throw std::invalid_argument("expected host:port, got \"" + text + "\"");
  const auto port_text = text.substr(colon + 1);
  std::size_t used = 0;
  int port = -1;
  try {
    port = std::stoi(port_text, &used);
  } catch (const std::exception&) {
  }
  if (used != port_text.size() || port < 0 || port > 65535) {
    throw std::invalid_argument("bad port in \"" + text + "\"");
  }
  return {text.substr(0, colon), static_cast<unsigned short>(port)};
}

namespace {

/// Runs one client's messages in order, off the network thread.
class Worker {
 public:
  Worker() : thread_([this] { loop(); }) {}
  ~Worker() {
    stop();
    if (thread_.joinable()) thread_.join();
  }

  void post(std::function<void()> task) {
    std::lock_guard lock(mutex_);
    if (stopping_) return;
    tasks_.push_back(std::move(task));
    cv_.notify_one();
  }
  /// Runs what is already queued, then exits.
  void stop() {
    std::lock_guard lock(mutex_);
    stopping_ = true;
    cv_.notify_one();
  }
  bool finished() const { return finished_; }

 private:
  void loop() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return stopping_ || !tasks_.empty(); });
        if (tasks_.empty()) break;
        task = std::move(tasks_.front());
        tasks_.pop_front();
      }
      task();
    }
    finished_ = true;
  }

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> tasks_;
  bool stopping_ = false;
  std::atomic<bool> finished_{false};
  std::thread thread_;
};

struct Session;

struct Client {
  std::uint64_t id = 0;
  std::shared_ptr<WsConnection> conn;
  // Touched only by the worker.
  std::optional<Role> role;
  std::shared_ptr<Session> session;
  bool closed = false;
  // Set by the worker before adapter_ready; read by the network thread after.
  std::shared_ptr<AdapterLink> link;
  std::atomic<bool> adapter_ready{false};
  // Guarded by the session's publish mutex.
  std::uint64_t last_step = 0;
  Worker worker;

  void send(const json& message) const { conn->send(message.dump()); }
};

struct Session {
  std::string id;
  std::string game_id;
  env::ClockMode mode = env::ClockMode::Lite;
  env::ObservationPolicy policy;
  std::shared_ptr<const checkpoint::CheckpointPack> pack;
  std::shared_ptr<AdapterLink> adapter;

  // Declaration order matters: the pusher must stop before the driver, the driver before
  // its environment.
  std::unique_ptr<env::Environment> environment;
  std::unique_ptr<env::TimeSource> time;
  std::unique_ptr<env::GameDriver> driver;
  std::unique_ptr<env::Periodic> pusher;

  /// Held by the controller for the whole of an action.
  std::mutex env_mutex;
  bool closed = false;  // guarded by env_mutex; a newer session took the adapter

  std::mutex publish_mutex;
  std::uint64_t step = 0;
  checkpoint::ProgressState progress;
  std::optional<Frame> last_frame;
  std::string latest_frame_message;
  std::weak_ptr<Client> controller;
  std::vector<std::weak_ptr<Client>> observers;

  template <typename Fn>
  void for_members_locked(Fn&& fn) {
    if (auto c = controller.lock()) fn(*c);
    for (auto& weak : observers) {
      if (auto o = weak.lock()) fn(*o);
    }
  }

  json score_locked() const {
    json score{{"type", "score"}, {"session", id}};
    if (pack) {
      score["progress"] = checkpoint::progress_score(progress, *pack);
      if (progress.furthest_index) {
        score["furthest_index"] = *progress.furthest_index;
        score["label"] = pack->checkpoints[*progress.furthest_index].label;
      } else {
        score["furthest_index"] = nullptr;
        score["label"] = nullptr;
      }
    } else {
      const auto native = driver->native_progress();
      score["progress"] = native ? json(*native) : json(nullptr);
      score["furthest_index"] = nullptr;
      score["label"] = nullptr;
    }
    return score;
  }

  /// Numbers the frame and sends it to every member; steps are strictly increasing per client.
  void publish(const Frame& frame) {
    std::lock_guard lock(publish_mutex);
    ++step;
    if (pack) progress = checkpoint::match_frame(std::move(progress), *pack, frame, step);
    last_frame = frame;
    const auto status = driver->status();
    json message{{"type", "frame"},
                 {"session", id},
                 {"step", step},
                 {"game_time_ms", driver->game_time_ms()},
                 {"frame", encode_frame(frame)},
                 {"outcome", outcome_tag(status.outcome)},
                 {"score", score_locked()}};
    message["score"].erase("type");
    message["score"].erase("session");
    latest_frame_message = message.dump();
    for_members_locked([&](Client& c) {
      if (c.last_step < step) {
        c.conn->send(latest_frame_message);
        c.last_step = step;
      }
    });
  }

  void broadcast(const json& message) {
    const auto text = message.dump();
    std::lock_guard lock(publish_mutex);
    for_members_locked([&](Client& c) { c.conn->send(text); });
  }

  /// Sends the current frame to a newly attached client.
  void attach_locked(Client& c) {
    if (!latest_frame_message.empty() && c.last_step < step) {
      c.conn->send(latest_frame_message);
      c.last_step = step;
    }
  }

  void detach(const Client* c) {
    std::lock_guard lock(publish_mutex);
    if (controller.lock().get() == c) controller.reset();
    std::erase_if(observers, [c](const std::weak_ptr<Client>& w) {
      auto o = w.lock();
      return !o || o.get() == c;
    });
  }

  bool has_live_controller() {
    std::lock_guard lock(publish_mutex);
    auto c = controller.lock();
    return c && c->conn->is_open();
  }
};

/// Protocol-level error sent to one client; `fatal` also closes its connection.
struct Refusal {
  std::string code;
  std::string message;
  bool fatal = false;
};

}  // namespace

struct Gateway::Impl {
  explicit Impl(GatewayOptions o) : options(std::move(o)) {}

  GatewayOptions options;
  std::map<std::string, GameEntry> games;

  asio::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::thread io_thread;
  unsigned short bound_port = 0;
  bool running = false;

  std::mutex clients_mutex;
  std::uint64_t next_client = 1;
  std::map<std::uint64_t, std::shared_ptr<Client>> clients;
  std::vector<std::shared_ptr<Client>> retired;

  mutable std::mutex sessions_mutex;
  std::uint64_t next_session = 1;
  std::map<std::string, std::shared_ptr<Session>> sessions;

  std::mutex adapters_mutex;
  std::condition_variable adapters_cv;
  std::map<std::string, std::shared_ptr<AdapterLink>> adapters;
  std::map<const AdapterLink*, std::weak_ptr<Session>> adapter_sessions;

  // --- connections -----------------------------------------------------------------------

  void accept_next() {
    acceptor->async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (acceptor->is_open()) accept_next();
        return;
      }
      auto ws = std::make_shared<WsStream>(std::move(socket));
      ws->set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws->async_accept([this, ws](beast::error_code ec) {
        if (!ec) open_client(std::move(*ws));
      });
      accept_next();
    });
  }

  void open_client(WsStream stream) {
    auto client = std::make_shared<Client>();
    client->conn = std::make_shared<WsConnection>(std::move(stream));
    {
      std::lock_guard lock(clients_mutex);
      client->id = next_client++;
      clients[client->id] = client;
      std::erase_if(retired, [](const std::shared_ptr<Client>& c) { return c->worker.finished(); });
    }
    std::weak_ptr<Client> weak = client;
    client->conn->start([this, weak](std::string text) { on_message(weak, std::move(text)); },
                        [this, weak] { on_close(weak); });
  }

  void on_message(const std::weak_ptr<Client>& weak, std::string text) {
    auto client = weak.lock();
    if (!client) return;
    if (client->adapter_ready) {
      // Adapter replies go straight to the waiting request; the worker may be blocked on one.
      try {
        client->link->deliver(parse_message(text));
      } catch (const ProtocolViolation& e) {
        client->send(error_message("ProtocolViolation", e.what()));
        client->conn->close();
      }
      return;
    }
    client->worker.post([this, client, text = std::move(text)] { handle(client, text); });
  }

  void on_close(const std::weak_ptr<Client>& weak) {
    auto client = weak.lock();
    if (!client) return;
    if (client->adapter_ready) {
      client->link->disconnect();
      std::lock_guard lock(adapters_mutex);
      auto it = adapters.find(client->link->info().game_id);
      if (it != adapters.end() && it->second == client->link) adapters.erase(it);
    }
    client->worker.post([client] {
      client->closed = true;
      if (client->session) client->session->detach(client.get());
    });
    client->worker.stop();
    std::lock_guard lock(clients_mutex);
    clients.erase(client->id);
    retired.push_back(client);
  }

  // --- messages --------------------------------------------------------------------------

  void handle(const std::shared_ptr<Client>& client, const std::string& text) {
    if (client->closed) return;
    try {
      const auto message = parse_message(text);
      switch (message_type(message)) {
        case MessageType::Hello:
          hello(client, message);
          break;
        case MessageType::Action:
          action(*client, message);
          break;
        case MessageType::Pause:
        case MessageType::Resume:
          pause(*client, message_type(message) == MessageType::Pause);
          break;
        case MessageType::Bye:
          client->send({{"type", "bye"}});
          client->conn->close();
          client->closed = true;
          break;
        default:
          throw ProtocolViolation("clients may not send \"" + std::string(type_name(message_type(message))) + "\"");
      }
    } catch (const ProtocolViolation& e) {
      refuse(*client, {"ProtocolViolation", e.what(), true});
    } catch (const Refusal& r) {
      refuse(*client, r);
    } catch (const std::exception& e) {
      refuse(*client, {"InternalError", e.what(), true});
    }
  }

  static void refuse(Client& client, const Refusal& r, const json& id = nullptr) {
    client.send(error_message(r.code, r.message, id));
    if (r.fatal) {
      client.conn->close();
      client.closed = true;
    }
  }

  void hello(const std::shared_ptr<Client>& client, const json& message) {
    if (client->role) throw ProtocolViolation("hello sent twice");
    const auto version = field<int>(message, "version");
    if (version != kProtocolVersion) {
      throw Refusal{"VersionMismatch",
                    "gateway speaks version " + std::to_string(kProtocolVersion) + ", not " + std::to_string(version),
                    true};
    }
    const auto role = role_from_name(field<std::string>(message, "role"));
    if (!role) throw ProtocolViolation("unknown role \"" + field<std::string>(message, "role") + "\"");
    switch (*role) {
      case Role::Adapter:
        adapter_hello(client, message);
        return;
      case Role::Observer:
        observer_hello(client, message);
        return;
      case Role::Agent:
      case Role::Human:
        controller_hello(client, *role, message);
        return;
    }
  }

  void adapter_hello(const std::shared_ptr<Client>& client, const json& message) {
    AdapterInfo info;
    info.game_id = field<std::string>(message, "game");
    if (info.game_id.empty()) throw ProtocolViolation("adapter game id is empty");
    const auto bounds = field<std::vector<int>>(message, "bounds");
    if (bounds.size() != 2 || bounds[0] <= 0 || bounds[1] <= 0) {
      throw ProtocolViolation("bounds must be [width, height] with both positive");
    }
    info.bounds = {bounds[0], bounds[1]};
    info.capabilities = field_or<std::vector<std::string>>(message, "capabilities", {});
    auto conn = client->conn;
    auto link = std::make_shared<AdapterLink>(
        std::move(info), [conn](std::string text) { conn->send(std::move(text)); }, options.adapter_deadline);
    {
      std::lock_guard lock(adapters_mutex);
      auto& slot = adapters[link->info().game_id];
      if (slot && slot->connected()) {
        throw Refusal{"AdapterExists", "an adapter already serves \"" + link->info().game_id + "\"", true};
      }
      slot = link;
    }
    client->role = Role::Adapter;
    client->link = link;
    client->send({{"type", "hello"},
                  {"version", kProtocolVersion},
                  {"role", "adapter"},
                  {"session", "adapter-" + std::to_string(client->id)}});
    client->adapter_ready = true;
    adapters_cv.notify_all();
  }

  std::shared_ptr<Session> find_session(const std::string& id) const {
    std::lock_guard lock(sessions_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw Refusal{"UnknownSession", "no session \"" + id + "\"", true};
    return it->second;
  }

  static json hello_reply(const Session& s, Role role) {
    const auto bounds = s.driver->surface_bounds();
    return {{"type", "hello"},
            {"version", kProtocolVersion},
            {"role", role_name(role)},
            {"session", s.id},
            {"game", s.game_id},
            {"mode", s.mode == env::ClockMode::Lite ? "lite" : "realtime"},
            {"bounds", {bounds.width, bounds.height}}};
  }

  void observer_hello(const std::shared_ptr<Client>& client, const json& message) {
    auto session = find_session(field<std::string>(message, "session"));
    client->role = Role::Observer;
    client->session = session;
    client->send(hello_reply(*session, Role::Observer));
    std::lock_guard lock(session->publish_mutex);
    session->observers.push_back(client);
    session->attach_locked(*client);
  }

  void controller_hello(const std::shared_ptr<Client>& client, Role role, const json& message) {
    std::shared_ptr<Session> session;
    if (message.contains("session")) {
      session = find_session(field<std::string>(message, "session"));
    } else {
      session = create_session(role, message);
    }
    {
      std::lock_guard lock(session->publish_mutex);
      auto current = session->controller.lock();
      if (current && current->conn->is_open()) {
        throw Refusal{"ControllerTaken", "session \"" + session->id + "\" already has a controller", true};
      }
      session->controller = client;
    }
    client->role = role;
    client->session = session;
    client->send(hello_reply(*session, role));
    std::lock_guard lock(session->publish_mutex);
    session->attach_locked(*client);
    client->send(session->score_locked());
  }

  env::ObservationPolicy policy_from(Role role, const json& message) const {
    if (role == Role::Human) return {1, 0, 0};
    auto policy = options.agent_policy;
    if (auto it = message.find("observation"); it != message.end()) {
      policy.frames_per_observation = field_or<int>(*it, "frames", policy.frames_per_observation);
      policy.frame_spacing_ms = field_or<std::int64_t>(*it, "spacing_ms", policy.frame_spacing_ms);
      policy.post_action_delay_ms = field_or<std::int64_t>(*it, "delay_ms", policy.post_action_delay_ms);
    }
    try {
      env::validate(policy);
    } catch (const std::invalid_argument& e) {
      throw ProtocolViolation(e.what());
    }
    return policy;
  }

  std::shared_ptr<Session> create_session(Role role, const json& message) {
    const auto game_id = field<std::string>(message, "game");
    const auto requested = field_or<std::string>(message, "mode", "lite");
    if (requested != "lite" && requested != "realtime") throw ProtocolViolation("mode must be lite or realtime");
    const bool realtime = requested == "realtime" && (role == Role::Agent || options.allow_realtime_humans);

    auto session = std::make_shared<Session>();
    session->game_id = game_id;
    session->mode = realtime ? env::ClockMode::Realtime : env::ClockMode::Lite;
    session->policy = policy_from(role, message);

    std::shared_ptr<Session> superseded;
    {
      std::lock_guard lock(adapters_mutex);
      if (auto it = adapters.find(game_id); it != adapters.end() && it->second->connected()) {
        session->adapter = it->second;
        auto& holder = adapter_sessions[session->adapter.get()];
        if (auto previous = holder.lock()) {
          if (previous->has_live_controller()) {
            throw Refusal{"GameBusy", "the adapter for \"" + game_id + "\" is serving another session", true};
          }
          superseded = previous;
        }
        holder = session;
      }
    }
    if (superseded) {
      std::lock_guard lock(superseded->env_mutex);
      superseded->closed = true;
      superseded->pusher.reset();
    }
    const auto entry = games.find(game_id);
    if (entry != games.end()) session->pack = entry->second.pack;
    if (session->adapter) {
      session->environment = std::make_unique<RemoteEnvironment>(session->adapter, !realtime);
    } else if (entry != games.end() && entry->second.make) {
      session->environment = entry->second.make();
    } else if (entry != games.end()) {
      throw Refusal{"AdapterMissing", "no adapter is serving \"" + game_id + "\"", true};
    } else {
      throw Refusal{"UnknownGame", "no game \"" + game_id + "\"", true};
    }

    if (realtime) {
      session->time = std::make_unique<env::SystemTimeSource>();
      session->driver = env::make_realtime_driver(*session->environment, *session->time);
    } else {
      session->driver = env::make_lite_driver(*session->environment);
    }
    {
      std::lock_guard lock(sessions_mutex);
      session->id = "s" + std::to_string(next_session++);
    }
    Frame first = [&] {
      try {
        return session->driver->reset(field_or<std::uint64_t>(message, "seed", 0));
      } catch (const AdapterTimeout& e) {
        throw Refusal{"AdapterTimeout", e.what(), true};
      }
    }();
    session->publish(first);
    if (realtime) start_pusher(*session);
    {
      std::lock_guard lock(sessions_mutex);
      sessions[session->id] = session;
    }
    return session;
  }

  void start_pusher(Session& session) {
    Session* s = &session;
    session.pusher = session.time->every(options.realtime_frame_interval.count(), [s] {
      auto frame = s->driver->snapshot();
      {
        std::lock_guard lock(s->publish_mutex);
        if (s->last_frame && s->last_frame->same_pixels(frame)) return;
      }
      s->publish(frame);
    });
  }

  static Session& controlled_session(Client& client) {
    if (!client.role || !is_controller(*client.role) || !client.session) {
      throw Refusal{"NotController", "only the session's controller may do that", false};
    }
    return *client.session;
  }

  void action(Client& client, const json& message) {
    const auto id = message.value("id", json(nullptr));
    Session* session = nullptr;
    try {
      session = &controlled_session(client);
    } catch (const Refusal& r) {
      return refuse(client, r, id);
    }
    auto& s = *session;
    const auto text = field<std::string>(message, "text");
    std::lock_guard env_lock(s.env_mutex);
    if (s.closed) return refuse(client, {"SessionClosed", "another session has taken this game", false}, id);
    const auto status = s.driver->status();
    if (status.outcome != env::Outcome::Running) {
      return refuse(client, {"GameOver", "game has ended: " + outcome_tag(status.outcome), false}, id);
    }
    action::ActionCommand command;
    try {
      command = action::parse_command(text, {}, s.driver->surface_bounds());
    } catch (const action::ActionError& e) {
      return refuse(client, {"ParseError", e.what(), false}, id);
    }
    std::vector<Frame> frames;
    try {
      s.driver->execute(command);
      frames = s.driver->observe(s.policy);
    } catch (const env::CommandRejected& e) {
      return refuse(client, {"ExecutionRejected", e.what(), false}, id);
    } catch (const AdapterTimeout& e) {
      return refuse(client, {"AdapterTimeout", e.what(), false}, id);
    } catch (const std::exception& e) {
      return refuse(client, {"ExecutionFailed", e.what(), false}, id);
    }
    for (const auto& frame : frames) s.publish(frame);
    json ack{{"type", "ack"},
             {"id", id},
             {"game_time_ms", s.driver->game_time_ms()},
             {"outcome", outcome_tag(s.driver->status().outcome)}};
    json score;
    {
      std::lock_guard lock(s.publish_mutex);
      ack["step"] = s.step;
      score = s.score_locked();
    }
    client.send(ack);
    s.broadcast(score);
  }

  void pause(Client& client, bool paused) {
    auto& s = controlled_session(client);
    std::lock_guard env_lock(s.env_mutex);
    if (s.mode == env::ClockMode::Realtime) {
      s.driver->set_paused(paused);
      if (s.adapter) s.adapter->notify({{"type", paused ? "pause" : "resume"}});
    }
    // Lite sessions are held between actions regardless of what was asked.
    const bool held = s.mode == env::ClockMode::Lite || s.driver->paused();
    s.broadcast({{"type", held ? "pause" : "resume"}, {"session", s.id}, {"paused", held}});
  }

  // --- lifecycle -------------------------------------------------------------------------

  void stop() {
    if (!running) return;
    running = false;
    {
      std::lock_guard lock(adapters_mutex);
      for (auto& [_, link] : adapters) link->disconnect();
    }
    std::vector<std::shared_ptr<Session>> all;
    {
      std::lock_guard lock(sessions_mutex);
      for (auto& [_, s] : sessions) all.push_back(s);
    }
    for (auto& s : all) {
      if (s->adapter) s->adapter->disconnect();
      s->pusher.reset();
    }
    std::vector<std::shared_ptr<Client>> open;
    {
      std::lock_guard lock(clients_mutex);
      for (auto& [_, c] : clients) open.push_back(c);
    }
    asio::post(ioc, [this] {
      beast::error_code ignored;
      acceptor->close(ignored);
    });
    for (auto& c : open) c->conn->close();
    // Give close frames a moment to go out before the loop stops.
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    ioc.stop();
    io_thread.join();
    std::vector<std::shared_ptr<Client>> done;
    {
      std::lock_guard lock(clients_mutex);
      for (auto& [_, c] : clients) done.push_back(c);
      clients.clear();
      for (auto& c : retired) done.push_back(c);
      retired.clear();
    }
    for (auto& c : done) c->worker.stop();
    done.clear();  // joins workers
    std::lock_guard lock(sessions_mutex);
    sessions.clear();
  }
};

Gateway::Gateway(GatewayOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Gateway::~Gateway() { stop(); }

void Gateway::register_game(const std::string& id, GameEntry entry) {
  if (impl_->running) throw std::logic_error("games must be registered before start()");
  if (!entry.make && !entry.pack) throw std::invalid_argument("game \"" + id + "\" has neither a factory nor a pack");
  if (entry.pack && entry.pack->game_id != id) {
    throw std::invalid_argument("pack for \"" + entry.pack->game_id + "\" registered as \"" + id + "\"");
  }
  impl_->games[id] = std::move(entry);
}

void Gateway::register_practice_games() {
  for (const auto& id : practice::practice_game_ids()) {
    register_game(id, {[id] { return practice::make_practice_game(id); }, nullptr});
  }
}

void Gateway::start() {
  auto& m = *impl_;
  if (m.running) throw std::logic_error("gateway already started");
  if (m.games.empty()) throw std::logic_error("no games registered");
  try {
    const auto address = asio::ip::make_address(m.options.host);
    m.acceptor.emplace(m.ioc);
    tcp::endpoint endpoint(address, m.options.port);
    m.acceptor->open(endpoint.protocol());
    m.acceptor->set_option(asio::socket_base::reuse_address(true));
    m.acceptor->bind(endpoint);
    m.acceptor->listen();
    m.bound_port = m.acceptor->local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    m.acceptor.reset();
    throw BindFailure("cannot listen on " + m.options.host + ":" + std::to_string(m.options.port) + ": " + e.what());
  }
  m.running = true;
  m.accept_next();
  m.io_thread = std::thread([&m] { m.ioc.run(); });
}

void Gateway::stop() { impl_->stop(); }

unsigned short Gateway::port() const { return impl_->bound_port; }

std::shared_ptr<AdapterLink> Gateway::wait_for_adapter(const std::string& game_id, std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->adapters_mutex);
  std::shared_ptr<AdapterLink> found;
  impl_->adapters_cv.wait_for(lock, timeout, [&] {
    auto it = impl_->adapters.find(game_id);
    if (it != impl_->adapters.end() && it->second->connected()) found = it->second;
    return found != nullptr;
  });
  return found;
}

std::size_t Gateway::session_count() const {
  std::lock_guard lock(impl_->sessions_mutex);
  return impl_->sessions.size();
}

}  // namespace arcade::gateway

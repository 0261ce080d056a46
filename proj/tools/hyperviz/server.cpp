#include "hyperviz/server.hpp"

#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>

#include "hyperviz/embedded_assets.hpp"
#include "hyperviz/error.hpp"
#include "hyperviz/link.hpp"
#include "hyperviz/mapping.hpp"
#include "hyperviz/scene_io.hpp"
#include "hyperviz/session_codec.hpp"
#include "hyperviz/spatial_index.hpp"
#include "hyperviz/throttle.hpp"

namespace hyperviz::serve {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using session::Delivery;
using session::Envelope;

void ServeConfig::validate() const {
  if (budget == 0) throw Error(ErrorCode::InvalidArgument, "point budget must be at least 1");
  if (!(viewpoint_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "viewpoint rate must be positive");
  if (io_threads == 0) throw Error(ErrorCode::InvalidArgument, "need at least one I/O thread");
}

std::pair<std::string, unsigned short> parse_bind(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorCode::InvalidArgument, "bind address must look like host:port, got '" + std::string(text) + "'");
  }
  const std::string_view port_text = text.substr(colon + 1);
  unsigned port = 0;
  const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || end != port_text.data() + port_text.size() || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "bad port '" + std::string(port_text) + "'");
  }
  std::string host(text.substr(0, colon));
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  return {host, static_cast<unsigned short>(port)};
}

std::string describe_event(std::string_view room, std::string_view user, std::string_view type,
                           const std::vector<Delivery>& outbox) {
  std::string line = fmt::format("event room={} user={} type={} ->", room, user, type);
  if (outbox.empty()) return line + " (none)";
  for (std::size_t i = 0; i < outbox.size(); ++i) {
    line += i == 0 ? " " : ",";
    line += outbox[i].message.type;
    if (outbox[i].message.type == "error") line += "(" + outbox[i].message.payload.value("code", "") + ")";
  }
  return line;
}

namespace {

// Scene as served for one mapping version; immutable once published.
struct Published {
  std::uint64_t version = 0;
  Scene scene;
  SpatialIndex index;
  std::string hvsc;
};

std::shared_ptr<const Published> publish(const Catalog& catalog, ChannelMapping mapping, std::uint64_t version,
                                         std::size_t budget) {
  mapping.set_version(version);
  Scene full = build_scene(catalog, mapping);
  Scene shown = full.count() > budget ? decimate(full, budget) : std::move(full);
  SpatialIndex index(shown);
  const auto columns = catalog.column_names();
  std::string bytes = encode_hvsc(shown, mapping, columns);
  return std::make_shared<const Published>(Published{version, std::move(shown), std::move(index), std::move(bytes)});
}

bool valid_name(std::string_view s) {
  if (s.empty() || s.size() > 64) return false;
  for (unsigned char c : s) {
    if (!(std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '@')) return false;
  }
  return true;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i] == '+' ? ' ' : s[i];
    }
  }
  return out;
}

struct Target {
  std::string path;
  std::map<std::string, std::string> query;
};

Target split_target(std::string_view target) {
  Target t;
  const auto q = target.find('?');
  t.path = std::string(target.substr(0, q));
  if (q == std::string_view::npos) return t;
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const std::string_view pair = rest.substr(0, amp);
    const auto eq = pair.find('=');
    t.query[percent_decode(pair.substr(0, eq))] =
        eq == std::string_view::npos ? "" : percent_decode(pair.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return t;
}

std::string_view mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".wasm") return "application/wasm";
  return "application/octet-stream";
}

class WsSession;

struct Room {
  Room(std::string id, net::io_context& ioc, double rate, std::shared_ptr<const Published> initial)
      : state(session::make_room(std::move(id))), throttle(rate), timer(ioc), published(std::move(initial)) {}

  std::mutex mu;
  session::SessionState state;
  session::ViewpointThrottle throttle;
  net::steady_timer timer;
  bool timer_armed = false;
  std::map<std::string, std::shared_ptr<WsSession>> connections;
  std::shared_ptr<const Published> published;
  bool rebuilding = false;
  std::vector<std::function<void(std::shared_ptr<const Published>)>> waiters;
};

class Services final : public session::RoomServices {
 public:
  Services(const Catalog& catalog, const std::optional<LinkTemplate>& link, const Published* scene)
      : catalog_(catalog), link_(link), scene_(scene) {}

  void validate_mapping(const ChannelMapping& mapping) const override { mapping.validate(catalog_); }

  void validate_row(std::uint64_t row_id) const override {
    if (row_id >= catalog_.n_rows()) {
      throw Error(ErrorCode::RowOutOfRange,
                  fmt::format("row {} is out of range (catalog has {} rows)", row_id, catalog_.n_rows()));
    }
  }

  std::optional<std::uint64_t> pick(const Ray& ray, double pick_radius) const override {
    if (!scene_) return std::nullopt;
    const auto hit = scene_->index.pick(ray, pick_radius);
    if (!hit) return std::nullopt;
    return scene_->scene.row_ids[*hit];
  }

  std::optional<std::string> link_for(std::uint64_t row_id) const override {
    if (!link_) return std::nullopt;
    return resolve_link(*link_, catalog_, row_id);
  }

 private:
  const Catalog& catalog_;
  const std::optional<LinkTemplate>& link_;
  const Published* scene_;
};

}  // namespace

struct Server::Impl {
  Impl(ServeConfig cfg, Catalog cat, std::shared_ptr<spdlog::logger> logger)
      : config(std::move(cfg)), catalog(std::move(cat)), log(std::move(logger)), acceptor(ioc) {
    config.validate();
    if (config.link_template) {
      link.emplace(*config.link_template);
      link->validate(catalog);
    }
    default_scene = publish(catalog, ChannelMapping{}, 0, config.budget);
  }

  // Declared first so it is destroyed last.
  net::io_context ioc;
  ServeConfig config;
  Catalog catalog;
  std::shared_ptr<spdlog::logger> log;
  std::optional<LinkTemplate> link;
  std::shared_ptr<const Published> default_scene;
  tcp::acceptor acceptor;
  std::optional<net::signal_set> signals;
  std::vector<std::thread> threads;
  net::thread_pool rebuild_pool{1};
  std::atomic<bool> stopped{false};
  std::atomic<std::uint64_t> guests{0};

  mutable std::mutex rooms_mu;
  std::map<std::string, std::shared_ptr<Room>> rooms;

  void do_accept();

  std::shared_ptr<Room> find_room(const std::string& id) const {
    std::lock_guard lock(rooms_mu);
    const auto it = rooms.find(id);
    return it == rooms.end() ? nullptr : it->second;
  }

  // Registers a connection for `user`, creating the room on demand. Returns
  // null when the user already has a live connection in that room.
  std::shared_ptr<Room> attach(const std::string& room_id, const std::string& user,
                               const std::function<std::shared_ptr<WsSession>()>& make_session) {
    std::lock_guard lock(rooms_mu);
    auto& slot = rooms[room_id];
    if (!slot) {
      slot = std::make_shared<Room>(room_id, ioc, config.viewpoint_rate, default_scene);
      log->info("room {} opened", room_id);
    }
    std::lock_guard room_lock(slot->mu);
    if (slot->connections.contains(user)) return nullptr;
    slot->connections.emplace(user, make_session());
    return slot;
  }

  void handle_text(const std::shared_ptr<Room>& room, const std::string& user, const std::string& text);
  void handle_disconnect(const std::shared_ptr<Room>& room, const std::string& user, const WsSession* ws);
  void dispatch(const std::shared_ptr<Room>& room, std::vector<Delivery>& out);
  void deliver(Room& room, const Delivery& d);
  void arm_throttle(const std::shared_ptr<Room>& room);
  void schedule_rebuild(const std::shared_ptr<Room>& room);
  void scene_for(const std::string& room_id, std::function<void(std::shared_ptr<const Published>)> done);

  void drop_if_empty(const std::shared_ptr<Room>& room) {
    std::lock_guard lock(rooms_mu);
    std::lock_guard room_lock(room->mu);
    if (!room->connections.empty() || !room->state.users.empty()) return;
    const auto it = rooms.find(room->state.room_id);
    if (it != rooms.end() && it->second == room) {
      rooms.erase(it);
      room->timer.cancel();
      log->info("room {} closed", room->state.room_id);
    }
  }
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(Server::Impl& server, tcp::socket&& socket, std::string user)
      : server_(server), ws_(std::move(socket)), user_(std::move(user)) {}

  const std::string& user() const noexcept { return user_; }

  void accept(std::shared_ptr<Room> room, http::request<http::string_body> req) {
    room_ = std::move(room);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) {
        self->server_.handle_disconnect(self->room_, self->user_, self.get());
        return;
      }
      self->server_.log->debug("ws open room={} user={}", self->room_->state.room_id, self->user_);
      self->do_read();
    });
  }

  void send(std::shared_ptr<const std::string> text) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)] {
      self->queue_.push_back(text);
      if (!self->writing_) self->do_write();
    });
  }

 private:
  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server_.log->debug("ws closed room={} user={}: {}", self->room_->state.room_id, self->user_,
                                 ec.message());
        self->server_.handle_disconnect(self->room_, self->user_, self.get());
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_.handle_text(self->room_, self->user_, text);
      self->do_read();
    });
  }

  void do_write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->queue_.clear();
        self->writing_ = false;
        return;
      }
      self->queue_.pop_front();
      if (self->queue_.empty()) {
        self->writing_ = false;
      } else {
        self->do_write();
      }
    });
  }

  Server::Impl& server_;
  websocket::stream<beast::tcp_stream> ws_;
  std::string user_;
  std::shared_ptr<Room> room_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool writing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(Server::Impl& server, tcp::socket&& socket) : server_(server), stream_(std::move(socket)) {}

  void run() {
    net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->do_read(); });
  }

 private:
  using Response = http::response<http::string_body>;

  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec == http::error::end_of_stream) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      if (ec) return;
      self->on_request();
    });
  }

  Response make(http::status status, std::string body, std::string_view type) const {
    Response res{status, req_.version()};
    res.set(http::field::server, "hyperviz");
    res.set(http::field::content_type, type);
    res.set(http::field::access_control_allow_origin, "*");
    res.keep_alive(req_.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  Response error(http::status status, std::string message) const {
    return make(status, std::move(message) + "\n", "text/plain; charset=utf-8");
  }

  void on_request() {
    const Target target = split_target(req_.target());

    if (websocket::is_upgrade(req_)) {
      upgrade(target);
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      send(error(http::status::method_not_allowed, "only GET is supported"));
      return;
    }
    constexpr std::string_view kScene = "/scene/";
    if (target.path.starts_with(kScene)) {
      const std::string room = percent_decode(std::string_view(target.path).substr(kScene.size()));
      if (!valid_name(room)) {
        send(error(http::status::bad_request, "bad room name"));
        return;
      }
      server_.scene_for(room, [self = shared_from_this()](std::shared_ptr<const Published> scene) {
        net::post(self->stream_.get_executor(), [self, scene = std::move(scene)] { self->send_scene(scene); });
      });
      return;
    }
    send_asset(target.path);
  }

  void send_scene(const std::shared_ptr<const Published>& scene) {
    if (!scene) {
      send(error(http::status::internal_server_error, "scene rebuild failed"));
      return;
    }
    Response res = make(http::status::ok, req_.method() == http::verb::head ? std::string{} : scene->hvsc,
                        "application/octet-stream");
    res.set("X-Hyperviz-Mapping-Version", std::to_string(scene->version));
    res.set(http::field::access_control_expose_headers, "X-Hyperviz-Mapping-Version");
    res.set(http::field::cache_control, "no-store");
    if (req_.method() == http::verb::head) res.content_length(scene->hvsc.size());
    send(std::move(res));
  }

  void send_asset(const std::string& path) {
    const auto& assets = server_.config.assets;
    if (!assets) {
      if (path == "/" || path == "/index.html") {
        send(make(http::status::ok, std::string(embedded_index_html()), "text/html; charset=utf-8"));
      } else {
        send(error(http::status::not_found, "not found"));
      }
      return;
    }
    const std::filesystem::path rel =
        std::filesystem::path(percent_decode(path == "/" ? "/index.html" : path)).relative_path().lexically_normal();
    for (const auto& part : rel) {
      if (part == "..") {
        send(error(http::status::bad_request, "bad path"));
        return;
      }
    }
    const std::filesystem::path file = *assets / rel;
    std::error_code ec;
    if (rel.empty() || !std::filesystem::is_regular_file(file, ec)) {
      send(error(http::status::not_found, "not found"));
      return;
    }
    std::ifstream in(file, std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    send(make(http::status::ok, body.str(), mime_type(file)));
  }

  void upgrade(const Target& target) {
    constexpr std::string_view kWs = "/ws/";
    if (!target.path.starts_with(kWs)) {
      send(error(http::status::not_found, "websocket endpoint is /ws/<room>"));
      return;
    }
    const std::string room_id = percent_decode(std::string_view(target.path).substr(kWs.size()));
    std::string user;
    if (const auto it = target.query.find("user"); it != target.query.end()) {
      user = it->second;
    } else {
      user = fmt::format("guest-{}", ++server_.guests);
    }
    if (!valid_name(room_id) || !valid_name(user)) {
      send(error(http::status::bad_request, "room and user must be 1-64 characters from [A-Za-z0-9._@-]"));
      return;
    }
    std::shared_ptr<WsSession> ws;
    auto room = server_.attach(room_id, user, [&] {
      stream_.expires_never();
      ws = std::make_shared<WsSession>(server_, stream_.release_socket(), user);
      return ws;
    });
    if (!room) {
      Response res = error(http::status::conflict, "user '" + user + "' is already connected to this room");
      res.keep_alive(false);
      send(std::move(res));
      return;
    }
    ws->accept(std::move(room), std::move(req_));
  }

  void send(Response res) {
    auto sp = std::make_shared<Response>(std::move(res));
    const bool keep_alive = sp->keep_alive();
    http::async_write(stream_, *sp, [self = shared_from_this(), sp, keep_alive](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!keep_alive) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->do_read();
    });
  }

  Server::Impl& server_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void Server::Impl::do_accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (!ec) {
      std::make_shared<HttpSession>(*this, std::move(socket))->run();
    } else if (ec == net::error::operation_aborted) {
      return;
    } else {
      log->warn("accept failed: {}", ec.message());
    }
    if (acceptor.is_open()) do_accept();
  });
}

void Server::Impl::handle_text(const std::shared_ptr<Room>& room, const std::string& user, const std::string& text) {
  std::lock_guard lock(room->mu);
  std::vector<Delivery> out;
  std::string type = "invalid";
  try {
    const Envelope request = session::parse_envelope(text);
    type = request.type;
    const Services services(catalog, link, room->published.get());
    const std::uint64_t version = room->state.mapping_version;
    session::apply_message(room->state, user, request, services, out);
    if (room->state.mapping_version != version) schedule_rebuild(room);
  } catch (const Error& e) {
    // Not an envelope at all: answer like any other rejected request.
    Envelope reply;
    reply.type = "error";
    reply.seq = room->state.next_message_seq++;
    reply.mapping_version = room->state.mapping_version;
    reply.payload = {{"code", std::string(error_code_name(e.code()))},
                     {"message", e.what()},
                     {"in_reply_to", nullptr},
                     {"request_type", nullptr}};
    out.push_back(Delivery{{user}, std::move(reply)});
  }
  log->info(describe_event(room->state.room_id, user, type, out));
  dispatch(room, out);
}

void Server::Impl::handle_disconnect(const std::shared_ptr<Room>& room, const std::string& user, const WsSession* ws) {
  bool now_empty = false;
  {
    std::lock_guard lock(room->mu);
    const auto it = room->connections.find(user);
    if (it == room->connections.end() || it->second.get() != ws) return;
    room->connections.erase(it);
    if (room->state.users.contains(user)) {
      std::vector<Delivery> out;
      session::apply_disconnect(room->state, user, out);
      log->info(describe_event(room->state.room_id, user, "disconnect", out));
      dispatch(room, out);
    }
    now_empty = room->connections.empty() && room->state.users.empty();
  }
  if (now_empty) drop_if_empty(room);
}

void Server::Impl::deliver(Room& room, const Delivery& d) {
  auto text = std::make_shared<const std::string>(session::serialize_envelope(d.message));
  for (const auto& user : d.recipients) {
    if (const auto it = room.connections.find(user); it != room.connections.end()) it->second->send(text);
  }
}

// Caller holds room->mu. viewpoint_bcast passes through the room throttle;
// everything else goes out immediately.
void Server::Impl::dispatch(const std::shared_ptr<Room>& room, std::vector<Delivery>& out) {
  for (auto& d : out) {
    if (d.message.type == "broadcast_stopped") {
      room->throttle.discard();
      room->timer.cancel();
      room->timer_armed = false;
    }
    if (d.message.type == "viewpoint_bcast") {
      if (auto ready = room->throttle.offer(std::chrono::steady_clock::now(), std::move(d))) deliver(*room, *ready);
      arm_throttle(room);
      continue;
    }
    deliver(*room, d);
  }
}

void Server::Impl::arm_throttle(const std::shared_ptr<Room>& room) {
  if (room->timer_armed || !room->throttle.holding()) return;
  room->timer_armed = true;
  room->timer.expires_at(*room->throttle.next_release());
  room->timer.async_wait([this, room](beast::error_code ec) {
    if (ec == net::error::operation_aborted) return;
    std::lock_guard lock(room->mu);
    room->timer_armed = false;
    if (auto held = room->throttle.poll(std::chrono::steady_clock::now())) {
      held->message.mapping_version = room->state.mapping_version;
      deliver(*room, *held);
    }
    arm_throttle(room);
  });
}

// Caller holds room->mu. At most one rebuild per room is in flight; when it
// finishes against an outdated version another one starts for the latest.
void Server::Impl::schedule_rebuild(const std::shared_ptr<Room>& room) {
  if (room->rebuilding) return;
  room->rebuilding = true;
  net::post(rebuild_pool, [this, room, mapping = room->state.mapping, version = room->state.mapping_version] {
    const auto t0 = std::chrono::steady_clock::now();
    std::shared_ptr<const Published> scene;
    try {
      scene = publish(catalog, mapping, version, config.budget);
    } catch (const std::exception& e) {
      log->error("scene rebuild for room {} v{} failed: {}", room->state.room_id, version, e.what());
    }
    std::lock_guard lock(room->mu);
    room->rebuilding = false;
    if (scene) {
      room->published = scene;
      log->info("scene room={} version={} points={} bytes={} in {:.3f} s", room->state.room_id, version,
                scene->scene.count(), scene->hvsc.size(),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    if (room->state.mapping_version != version) {
      schedule_rebuild(room);
      return;
    }
    auto waiters = std::move(room->waiters);
    room->waiters.clear();
    for (auto& w : waiters) w(scene);
  });
}

void Server::Impl::scene_for(const std::string& room_id,
                             std::function<void(std::shared_ptr<const Published>)> done) {
  const auto room = find_room(room_id);
  if (!room) {
    done(default_scene);
    return;
  }
  std::unique_lock lock(room->mu);
  if (room->published && room->published->version == room->state.mapping_version) {
    auto scene = room->published;
    lock.unlock();
    done(std::move(scene));
    return;
  }
  room->waiters.push_back(std::move(done));
  schedule_rebuild(room);
}

Server::Server(ServeConfig config, Catalog catalog, std::shared_ptr<spdlog::logger> log)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(catalog), std::move(log))) {}

Server::~Server() { stop(); }

void Server::start() {
  Impl& s = *impl_;
  const tcp::endpoint endpoint(net::ip::make_address(s.config.address), s.config.port);
  s.acceptor.open(endpoint.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(endpoint);
  s.acceptor.listen(net::socket_base::max_listen_connections);
  s.do_accept();
  for (std::size_t i = 0; i < s.config.io_threads; ++i) s.threads.emplace_back([&s] { s.ioc.run(); });
  s.log->info("listening on http://{}:{} ({} catalog rows, budget {})", s.config.address, port(),
              s.catalog.n_rows(), s.config.budget);
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::stop_on_signals() {
  Impl& s = *impl_;
  s.signals.emplace(s.ioc, SIGINT, SIGTERM);
  s.signals->async_wait([&s](beast::error_code ec, int signal) {
    if (ec) return;
    s.log->info("signal {} received, shutting down", signal);
    s.ioc.stop();
  });
}

void Server::wait() {
  for (auto& t : impl_->threads) {
    if (t.joinable()) t.join();
  }
}

void Server::stop() {
  Impl& s = *impl_;
  if (s.stopped.exchange(true)) return;
  s.ioc.stop();
  wait();
  s.rebuild_pool.stop();
  s.rebuild_pool.join();
  std::lock_guard lock(s.rooms_mu);
  for (auto& [id, room] : s.rooms) {
    std::lock_guard room_lock(room->mu);
    room->connections.clear();  // sessions point back at the room
  }
  s.rooms.clear();
}

std::size_t Server::room_count() const {
  std::lock_guard lock(impl_->rooms_mu);
  return impl_->rooms.size();
}

}  // namespace hyperviz::serve

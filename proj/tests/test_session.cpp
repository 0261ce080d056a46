#include <doctest.h>

#include <algorithm>

#include "hyperviz/error.hpp"
#include "hyperviz/replica.hpp"
#include "hyperviz/session.hpp"
#include "hyperviz/session_codec.hpp"
#include "hyperviz/throttle.hpp"
#include "support/simulation.hpp"

using namespace hyperviz;
using namespace hyperviz::session;

namespace {

// Drives one room, keeps every delivery and each user's inbox.
struct Room {
  SessionState state = make_room("lab");
  std::vector<Delivery> log;
  std::uint64_t seq = 0;

  std::vector<Delivery> send(const UserId& who, const ClientMessage& m,
                             const RoomServices& services = RoomServices{}) {
    return raw(who, encode_client_message(m, ++seq), services);
  }
  std::vector<Delivery> raw(const UserId& who, const Envelope& e, const RoomServices& services = RoomServices{}) {
    Transition t = handle_message(state, who, e, services);
    state = std::move(t.state);
    CHECK(invariants_hold(state));
    for (const auto& d : t.outbox) {
      REQUIRE(d.message.mapping_version.has_value());
      CHECK(*d.message.mapping_version == state.mapping_version);
    }
    log.insert(log.end(), t.outbox.begin(), t.outbox.end());
    return t.outbox;
  }
  std::vector<Envelope> inbox(const UserId& who) const {
    std::vector<Envelope> out;
    for (const auto& d : log) {
      if (std::find(d.recipients.begin(), d.recipients.end(), who) != d.recipients.end()) {
        out.push_back(d.message);
      }
    }
    return out;
  }
};

std::vector<UserId> sorted(std::vector<UserId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

Viewpoint looking_at(double x) {
  Viewpoint v;
  v.position = {x, 0.5, 2.0};
  return v;
}

ChannelMapping mapping_on(const std::string& column) {
  ChannelMapping m;
  m.assign(VisualChannel::pos_x, column);
  return m;
}

struct Services : RoomServices {
  void validate_row(std::uint64_t row) const override {
    if (row >= 10) throw Error(ErrorCode::RowOutOfRange, "row out of range");
  }
  std::optional<std::uint64_t> pick(const Ray& ray, double) const override {
    if (ray.direction()[2] > 0) return std::nullopt;
    return 3;
  }
  std::optional<std::string> link_for(std::uint64_t row) const override {
    return "http://db/obj?id=" + std::to_string(row);
  }
};

}  // namespace

TEST_SUITE("session") {

TEST_CASE("join on an empty room") {
  Room room;
  const auto out = room.send("alice", msg::Join{});
  REQUIRE(out.size() == 1);  // nobody else to tell
  CHECK(out[0].recipients == std::vector<UserId>{"alice"});
  CHECK(out[0].message.type == "welcome");
  const auto& p = out[0].message.payload;
  CHECK(p.at("mapping_version") == 0);
  CHECK(p.at("annotations").empty());
  CHECK(p.at("broadcast_navigator").is_null());
  CHECK(p.at("you") == "alice");
  CHECK(p.at("users").size() == 1);
}

TEST_CASE("second member gets welcome, first gets user_joined") {
  Room room;
  room.send("alice", msg::Join{});
  const auto out = room.send("bob", msg::Join{looking_at(0.2)});
  REQUIRE(out.size() == 2);
  CHECK(out[0].recipients == std::vector<UserId>{"bob"});
  CHECK(out[1].recipients == std::vector<UserId>{"alice"});
  CHECK(out[1].message.payload.at("user") == "bob");
  CHECK(viewpoint_from_json(out[1].message.payload.at("viewpoint")) == looking_at(0.2));
  CHECK(room.state.users.at("bob") == looking_at(0.2));
}

TEST_CASE("set_mapping twice reaches version 2 with the second mapping last") {
  Room room;
  room.send("alice", msg::Join{});
  room.send("bob", msg::Join{});
  room.send("alice", msg::SetMapping{mapping_on("a")});
  room.send("bob", msg::SetMapping{mapping_on("b")});
  CHECK(room.state.mapping_version == 2);
  for (const UserId u : {"alice", "bob"}) {
    const auto in = room.inbox(u);
    const auto last = std::find_if(in.rbegin(), in.rend(), [](const Envelope& e) { return e.type == "mapping_changed"; });
    REQUIRE(last != in.rend());
    CHECK(last->payload.at("mapping_version") == 2);
    CHECK(mapping_from_json(last->payload.at("mapping")) == mapping_on("b"));
    CHECK(last->payload.at("author") == "bob");
  }
}

TEST_CASE("broadcast, relay and contention") {
  Room room;
  for (const UserId u : {"a", "b", "c"}) room.send(u, msg::Join{});
  auto out = room.send("a", msg::BroadcastStart{});
  REQUIRE(out.size() == 1);
  CHECK(out[0].message.type == "broadcast_started");
  CHECK(sorted(out[0].recipients) == std::vector<UserId>{"a", "b", "c"});
  CHECK(room.state.broadcast_navigator == "a");

  out = room.send("a", msg::ViewpointUpdate{looking_at(0.9)});
  REQUIRE(out.size() == 1);
  CHECK(out[0].message.type == "viewpoint_bcast");
  CHECK(sorted(out[0].recipients) == std::vector<UserId>{"b", "c"});
  CHECK(out[0].message.payload.at("user") == "a");
  CHECK(out[0].message.payload.at("source_seq") == room.seq);
  CHECK(viewpoint_from_json(out[0].message.payload.at("viewpoint")) == looking_at(0.9));

  out = room.send("b", msg::ViewpointUpdate{looking_at(0.1)});
  CHECK(out.empty());
  CHECK(room.state.users.at("b") == looking_at(0.1));

  out = room.send("b", msg::BroadcastStart{});
  REQUIRE(out.size() == 1);
  CHECK(out[0].message.type == "error");
  CHECK(out[0].message.payload.at("code") == "BUSY");
  CHECK(out[0].message.payload.at("in_reply_to") == room.seq);
  CHECK(out[0].recipients == std::vector<UserId>{"b"});
  CHECK(room.state.broadcast_navigator == "a");

  out = room.send("b", msg::BroadcastStop{});
  CHECK(out[0].message.payload.at("code") == "NotNavigator");
  out = room.send("a", msg::BroadcastStop{});
  CHECK(out[0].message.type == "broadcast_stopped");
  CHECK(out[0].message.payload.at("reason") == "stopped");
  CHECK_FALSE(room.state.broadcast_navigator.has_value());
  CHECK(room.send("b", msg::BroadcastStart{})[0].message.type == "broadcast_started");
}

TEST_CASE("navigator leaving stops the broadcast first") {
  for (bool abrupt : {false, true}) {
    Room room;
    room.send("a", msg::Join{});
    room.send("b", msg::Join{});
    room.send("a", msg::BroadcastStart{});
    std::vector<Delivery> out;
    if (abrupt) {
      apply_disconnect(room.state, "a", out);
    } else {
      out = room.send("a", msg::Leave{});
    }
    REQUIRE(out.size() == 2);
    CHECK(out[0].message.type == "broadcast_stopped");
    CHECK(out[0].message.payload.at("reason") == "navigator_left");
    CHECK(out[0].recipients == std::vector<UserId>{"b"});
    CHECK(out[1].message.type == "user_left");
    CHECK_FALSE(room.state.broadcast_navigator.has_value());
    CHECK(invariants_hold(room.state));
  }
}

TEST_CASE("disconnect of a stranger does nothing") {
  SessionState s = make_room("r");
  std::vector<Delivery> out;
  apply_disconnect(s, "ghost", out);
  CHECK(out.empty());
  CHECK(s == make_room("r"));
}

TEST_CASE("requests from non-members and malformed payloads") {
  Room room;
  auto out = room.send("x", msg::Annotate{1, "hi"});
  REQUIRE(out.size() == 1);
  CHECK(out[0].message.payload.at("code") == "NotInRoom");
  CHECK(out[0].recipients == std::vector<UserId>{"x"});

  room.send("a", msg::Join{});
  const SessionState before = room.state;
  auto reject = [&](Envelope e) {
    const auto r = room.raw("a", e);
    REQUIRE(r.size() == 1);
    CHECK(r[0].message.payload.at("code") == "BadPayload");
    CHECK(r[0].message.payload.at("request_type") == e.type);
    SessionState cmp = room.state;
    cmp.next_message_seq = before.next_message_seq;
    CHECK(cmp == before);
  };
  reject(Envelope{"dance", 1});
  reject(Envelope{"viewpoint", 2, {{"position", {0, 0}}}});
  Envelope bad_fov = encode_client_message(msg::ViewpointUpdate{}, 3);
  bad_fov.payload["field_of_view"] = 5;
  reject(bad_fov);
  Envelope bad_quat = encode_client_message(msg::ViewpointUpdate{}, 4);
  bad_quat.payload["orientation"] = {1, 1, 0, 0};
  reject(bad_quat);
  reject(encode_client_message(msg::Annotate{1, std::string(kMaxAnnotationBytes + 1, 'x')}, 5));
  reject(encode_client_message(msg::Annotate{1, "\xc0\xaf"}, 6));
  reject(Envelope{"pick_link", 7});
  reject(encode_client_message(msg::Join{}, 8));  // already joined
}

TEST_CASE("unknown fields are ignored") {
  const Envelope e = parse_envelope(R"({"type":"join","seq":4,"payload":{"extra":1},"colour":"red"})");
  CHECK(e.type == "join");
  CHECK(e.seq == 4);
  CHECK(std::holds_alternative<msg::Join>(decode_client_message(e)));
  CHECK_THROWS_AS(parse_envelope("[1]"), Error);
  CHECK_THROWS_AS(parse_envelope("{\"seq\":1}"), Error);
  CHECK_THROWS_AS(parse_envelope("{\"type\":\"join\",\"seq\":-1}"), Error);
  CHECK_THROWS_AS(parse_envelope("{nope"), Error);
}

TEST_CASE("annotations get increasing server_seq and reach everyone") {
  Room room;
  Services services;
  room.send("a", msg::Join{});
  room.send("b", msg::Join{});
  room.send("a", msg::Annotate{3, "first"}, services);
  room.send("b", msg::Annotate{4, std::string(kMaxAnnotationBytes, 'y')}, services);
  room.send("a", msg::Annotate{5, "\xe2\x98\x85 star"}, services);
  REQUIRE(room.state.annotations.size() == 3);
  CHECK(room.state.annotations[0].server_seq == 1);
  CHECK(room.state.annotations[2].server_seq == 3);
  CHECK(room.state.annotations[1].author == "b");
  const auto out = room.send("a", msg::Annotate{10, "nope"}, services);
  CHECK(out[0].message.payload.at("code") == "RowOutOfRange");
  CHECK(room.state.annotations.size() == 3);

  const Snapshot s = snapshot(room.state);
  CHECK(s.annotations == room.state.annotations);
  CHECK(snapshot_from_json(to_json(s)) == s);
}

TEST_CASE("pick_link answers only the sender") {
  Room room;
  Services services;
  room.send("a", msg::Join{});
  room.send("b", msg::Join{});
  auto out = room.send("a", msg::PickLink{std::nullopt, Ray({0.5, 0.5, 2}, {0, 0, -1}), 0.5}, services);
  REQUIRE(out.size() == 1);
  CHECK(out[0].recipients == std::vector<UserId>{"a"});
  CHECK(out[0].message.type == "link");
  CHECK(out[0].message.payload.at("row_id") == 3);
  CHECK(out[0].message.payload.at("url") == "http://db/obj?id=3");

  out = room.send("a", msg::PickLink{std::nullopt, Ray({0.5, 0.5, -2}, {0, 0, 1}), 0.5}, services);
  CHECK(out[0].message.payload.at("row_id").is_null());
  CHECK(out[0].message.payload.at("url").is_null());

  out = room.send("b", msg::PickLink{7, std::nullopt, 1.0}, services);
  CHECK(out[0].message.payload.at("url") == "http://db/obj?id=7");
  out = room.send("b", msg::PickLink{12, std::nullopt, 1.0}, services);
  CHECK(out[0].message.type == "error");

  // Default services resolve no URL.
  out = room.send("b", msg::PickLink{1, std::nullopt, 1.0});
  CHECK(out[0].message.payload.at("url").is_null());
}

TEST_CASE("rejected mapping leaves the version alone") {
  struct Picky : RoomServices {
    void validate_mapping(const ChannelMapping& m) const override {
      if (m[VisualChannel::pos_x] && m[VisualChannel::pos_x]->column == "bad") {
        throw Error(ErrorCode::UnknownColumn, "no column 'bad'");
      }
    }
  } picky;
  Room room;
  room.send("a", msg::Join{});
  const auto out = room.send("a", msg::SetMapping{mapping_on("bad")}, picky);
  CHECK(out[0].message.payload.at("code") == "UnknownColumn");
  CHECK(room.state.mapping_version == 0);
}

TEST_CASE("snapshot of a fresh room") {
  const Snapshot s = snapshot(make_room("r"));
  CHECK(s.room_id == "r");
  CHECK(s.users.empty());
  CHECK(s.annotations.empty());
  CHECK(s.mapping_version == 0);
  CHECK_FALSE(s.broadcast_navigator.has_value());
}

TEST_CASE("late joiner reconstructs the same view as an observer who was always there") {
  Room room;
  Services services;
  SessionReplica observer("obs");
  room.send("obs", msg::Join{});
  room.send("a", msg::Join{});
  room.send("b", msg::Join{});
  room.send("a", msg::SetMapping{mapping_on("x")});
  room.send("a", msg::Annotate{1, "one"}, services);
  room.send("b", msg::BroadcastStart{});
  room.send("b", msg::ViewpointUpdate{looking_at(0.7)});
  room.send("a", msg::SetMapping{mapping_on("y")});
  room.send("b", msg::Annotate{2, "two"}, services);
  room.send("a", msg::Leave{});
  room.send("late", msg::Join{});

  SessionReplica late("late");
  for (const auto& e : room.inbox("obs")) observer.receive(parse_envelope(serialize_envelope(e)));
  for (const auto& e : room.inbox("late")) late.receive(parse_envelope(serialize_envelope(e)));
  CHECK(late.view() == observer.view());
  CHECK(late.navigator() == "b");
  CHECK(late.displayed_viewpoint() == looking_at(0.7));
  CHECK(observer.displayed_viewpoint() == looking_at(0.7));
  CHECK(late.mapping_version() == 2);
  CHECK(late.annotations().size() == 2);

  Snapshot server = snapshot(room.state);
  for (auto& [id, vp] : server.users) vp = Viewpoint{};
  server.room_id.clear();
  CHECK(late.view() == server);
}

TEST_CASE("replica ignores traffic before welcome and follows only the navigator") {
  SessionReplica r("me");
  Envelope stray{"mapping_changed", 1, {{"mapping", nlohmann::json::object()}, {"mapping_version", 4}}, 4};
  r.receive(stray);
  CHECK_FALSE(r.joined());
  CHECK(r.mapping_version() == 0);

  Room room;
  room.send("me", msg::Join{});
  room.send("nav", msg::Join{});
  room.send("nav", msg::BroadcastStart{});
  room.send("nav", msg::ViewpointUpdate{looking_at(0.3)});
  for (const auto& e : room.inbox("me")) r.receive(e);
  CHECK(r.displayed_viewpoint() == looking_at(0.3));
  CHECK(r.last_broadcast_seq() == room.seq);
  r.set_following(false);
  r.set_local_viewpoint(looking_at(0.1));
  CHECK(r.displayed_viewpoint() == looking_at(0.1));
}

TEST_CASE("throttle passes at most one per interval and keeps the latest") {
  using namespace std::chrono_literals;
  ViewpointThrottle t(30.0);
  const auto t0 = ViewpointThrottle::Clock::time_point{} + 1s;
  auto d = [](std::uint64_t seq) { return Delivery{{"b"}, Envelope{"viewpoint_bcast", seq}}; };
  REQUIRE(t.offer(t0, d(1)).has_value());
  CHECK_FALSE(t.offer(t0 + 5ms, d(2)).has_value());
  CHECK_FALSE(t.offer(t0 + 10ms, d(3)).has_value());
  CHECK(t.holding());
  CHECK(*t.next_release() == t0 + t.min_interval());
  CHECK_FALSE(t.poll(t0 + 20ms).has_value());
  const auto released = t.poll(t0 + 34ms);
  REQUIRE(released.has_value());
  CHECK(released->message.seq == 3);
  CHECK_FALSE(t.holding());

  // An offer arriving with a held message and an open slot releases the newest.
  CHECK_FALSE(t.offer(t0 + 40ms, d(4)).has_value());
  const auto late = t.offer(t0 + 80ms, d(5));
  REQUIRE(late.has_value());
  CHECK(late->message.seq == 5);

  CHECK_FALSE(t.offer(t0 + 85ms, d(6)).has_value());
  t.discard();
  CHECK_FALSE(t.poll(t0 + 1s).has_value());
  CHECK_THROWS_AS(ViewpointThrottle(0.0), Error);
}

TEST_CASE("throttle rate over one simulated second") {
  using namespace std::chrono_literals;
  ViewpointThrottle t(30.0);
  const auto t0 = ViewpointThrottle::Clock::time_point{};
  std::size_t sent = 0;
  for (int ms = 0; ms < 1000; ++ms) {
    const auto now = t0 + std::chrono::milliseconds(ms);
    if (t.offer(now, Delivery{{"b"}, Envelope{"viewpoint_bcast", static_cast<std::uint64_t>(ms)}})) ++sent;
  }
  CHECK(sent <= 31);
  CHECK(sent >= 29);
}

TEST_CASE("codec round trips") {
  const std::vector<ClientMessage> all = {
      msg::Join{looking_at(0.4)}, msg::Join{}, msg::Leave{}, msg::SetMapping{mapping_on("x")},
      msg::ViewpointUpdate{looking_at(0.6)}, msg::BroadcastStart{}, msg::BroadcastStop{},
      msg::Annotate{9, "note"}, msg::PickLink{5, std::nullopt, 1.0},
  };
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Envelope e = encode_client_message(all[i], i);
    const Envelope back = parse_envelope(serialize_envelope(e));
    CHECK(back == e);
    CHECK(encode_client_message(decode_client_message(back), i) == e);
  }
  const Annotation a{4, "u", "t\xc3\xa9xt", 8};
  CHECK(annotation_from_json(to_json(a)) == a);
  CHECK(is_valid_utf8("plain"));
  CHECK_FALSE(is_valid_utf8("\xed\xa0\x80"));  // surrogate
  CHECK_FALSE(is_valid_utf8("\xe2\x82"));
}

TEST_CASE("simulation seeds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = testing::run_simulation({seed});
    INFO("seed " << seed << ": " << r.failure);
    CHECK(r.ok());
    CHECK(r.messages_sent >= 200);
  }
}

TEST_CASE("simulation exercises contention and navigator loss") {
  std::size_t busy = 0, lost = 0, started = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto r = testing::run_simulation({seed});
    busy += r.busy_errors;
    lost += r.navigator_disconnects;
    started += r.broadcasts_started;
  }
  CHECK(busy > 0);
  CHECK(lost > 0);
  CHECK(started > 0);
}

}  // TEST_SUITE

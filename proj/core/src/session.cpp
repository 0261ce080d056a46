#include "hyperviz/session.hpp"

#include <cmath>

#include "hyperviz/error.hpp"
#include "hyperviz/session_codec.hpp"

namespace hyperviz::session {

using nlohmann::json;

void Viewpoint::validate() const {
  for (double v : position) {
    if (!std::isfinite(v)) throw Error(ErrorCode::BadPayload, "viewpoint position must be finite");
  }
  double norm2 = 0.0;
  for (double q : orientation) {
    if (!std::isfinite(q)) throw Error(ErrorCode::BadPayload, "orientation must be finite");
    norm2 += q * q;
  }
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6) {
    throw Error(ErrorCode::BadPayload, "orientation must be a unit quaternion");
  }
  if (!(field_of_view > 10.0 && field_of_view < 170.0)) {
    throw Error(ErrorCode::BadPayload, "field_of_view must lie in (10, 170) degrees");
  }
}

void RoomServices::validate_mapping(const ChannelMapping&) const {}
void RoomServices::validate_row(std::uint64_t) const {}
std::optional<std::uint64_t> RoomServices::pick(const Ray&, double) const { return std::nullopt; }
std::optional<std::string> RoomServices::link_for(std::uint64_t) const { return std::nullopt; }

Snapshot snapshot(const SessionState& state) {
  Snapshot s;
  s.room_id = state.room_id;
  s.users = state.users;
  s.mapping = state.mapping;
  s.mapping_version = state.mapping_version;
  s.annotations = state.annotations;
  s.broadcast_navigator = state.broadcast_navigator;
  return s;
}

SessionState make_room(std::string room_id) {
  SessionState state;
  state.room_id = std::move(room_id);
  return state;
}

namespace {

class Outbox {
 public:
  Outbox(SessionState& state, std::vector<Delivery>& out) : state_(state), out_(out) {}

  void send(std::vector<UserId> recipients, std::string type, json payload) {
    if (recipients.empty()) return;
    Envelope e;
    e.type = std::move(type);
    e.seq = state_.next_message_seq++;
    e.payload = std::move(payload);
    e.mapping_version = state_.mapping_version;
    out_.push_back(Delivery{std::move(recipients), std::move(e)});
  }

  std::vector<UserId> everyone() const {
    std::vector<UserId> ids;
    ids.reserve(state_.users.size());
    for (const auto& [id, vp] : state_.users) ids.push_back(id);
    return ids;
  }

  std::vector<UserId> everyone_but(const UserId& user) const {
    std::vector<UserId> ids;
    for (const auto& [id, vp] : state_.users) {
      if (id != user) ids.push_back(id);
    }
    return ids;
  }

  void error(const UserId& to, const Envelope& request, ErrorCode code, const std::string& message) {
    send({to}, "error",
         {{"code", std::string(error_code_name(code))},
          {"message", message},
          {"in_reply_to", request.seq},
          {"request_type", request.type}});
  }

 private:
  SessionState& state_;
  std::vector<Delivery>& out_;
};

void remove_user(SessionState& state, const UserId& user, Outbox& out) {
  state.users.erase(user);
  if (state.broadcast_navigator == user) {
    state.broadcast_navigator.reset();
    out.send(out.everyone(), "broadcast_stopped", {{"navigator", user}, {"reason", "navigator_left"}});
  }
  out.send(out.everyone(), "user_left", {{"user", user}});
}

}  // namespace

void apply_message(SessionState& state, const UserId& sender, const Envelope& message,
                   const RoomServices& services, std::vector<Delivery>& outbox) {
  Outbox out(state, outbox);

  ClientMessage decoded;
  try {
    decoded = decode_client_message(message);
  } catch (const Error& e) {
    out.error(sender, message, ErrorCode::BadPayload, e.what());
    return;
  }

  const bool member = state.users.contains(sender);
  if (!member && !std::holds_alternative<msg::Join>(decoded)) {
    out.error(sender, message, ErrorCode::NotInRoom, "user '" + sender + "' has not joined");
    return;
  }

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;

        if constexpr (std::is_same_v<T, msg::Join>) {
          if (member) {
            out.error(sender, message, ErrorCode::BadPayload, "already joined");
            return;
          }
          const Viewpoint vp = m.viewpoint.value_or(Viewpoint{});
          state.users.emplace(sender, vp);
          json welcome = to_json(snapshot(state));
          welcome["you"] = sender;
          out.send({sender}, "welcome", std::move(welcome));
          out.send(out.everyone_but(sender), "user_joined",
                   {{"user", sender}, {"viewpoint", to_json(vp)}});

        } else if constexpr (std::is_same_v<T, msg::Leave>) {
          remove_user(state, sender, out);

        } else if constexpr (std::is_same_v<T, msg::SetMapping>) {
          try {
            services.validate_mapping(m.mapping);
          } catch (const Error& e) {
            out.error(sender, message, e.code(), e.what());
            return;
          }
          state.mapping = m.mapping;
          state.mapping_version += 1;
          state.mapping.set_version(state.mapping_version);
          out.send(out.everyone(), "mapping_changed",
                   {{"mapping", mapping_to_json(state.mapping)},
                    {"mapping_version", state.mapping_version},
                    {"author", sender}});

        } else if constexpr (std::is_same_v<T, msg::ViewpointUpdate>) {
          state.users[sender] = m.viewpoint;
          if (state.broadcast_navigator == sender) {
            out.send(out.everyone_but(sender), "viewpoint_bcast",
                     {{"user", sender}, {"viewpoint", to_json(m.viewpoint)}, {"source_seq", message.seq}});
          }

        } else if constexpr (std::is_same_v<T, msg::BroadcastStart>) {
          if (state.broadcast_navigator) {
            out.error(sender, message, ErrorCode::Busy,
                      "user '" + *state.broadcast_navigator + "' is already broadcasting");
            return;
          }
          state.broadcast_navigator = sender;
          out.send(out.everyone(), "broadcast_started",
                   {{"navigator", sender}, {"viewpoint", to_json(state.users.at(sender))}});

        } else if constexpr (std::is_same_v<T, msg::BroadcastStop>) {
          if (state.broadcast_navigator != sender) {
            out.error(sender, message, ErrorCode::NotNavigator,
                      "only the navigator can stop the broadcast");
            return;
          }
          state.broadcast_navigator.reset();
          out.send(out.everyone(), "broadcast_stopped", {{"navigator", sender}, {"reason", "stopped"}});

        } else if constexpr (std::is_same_v<T, msg::Annotate>) {
          try {
            services.validate_row(m.row_id);
          } catch (const Error& e) {
            out.error(sender, message, e.code(), e.what());
            return;
          }
          Annotation a{m.row_id, sender, m.text, state.next_annotation_seq++};
          state.annotations.push_back(a);
          out.send(out.everyone(), "annotation_added", {{"annotation", to_json(a)}});

        } else if constexpr (std::is_same_v<T, msg::PickLink>) {
          std::optional<std::uint64_t> row = m.row_id;
          std::optional<std::string> url;
          try {
            if (!row && m.ray) row = services.pick(*m.ray, m.pick_radius);
            if (row) {
              services.validate_row(*row);
              url = services.link_for(*row);
            }
          } catch (const Error& e) {
            out.error(sender, message, e.code(), e.what());
            return;
          }
          out.send({sender}, "link",
                   {{"row_id", row ? json(*row) : json(nullptr)},
                    {"url", url ? json(*url) : json(nullptr)},
                    {"in_reply_to", message.seq}});
        }
      },
      decoded);
}

Transition handle_message(const SessionState& state, const UserId& sender, const Envelope& message,
                          const RoomServices& services) {
  Transition t{state, {}};
  apply_message(t.state, sender, message, services, t.outbox);
  return t;
}

void apply_disconnect(SessionState& state, const UserId& user, std::vector<Delivery>& outbox) {
  if (!state.users.contains(user)) return;
  Outbox out(state, outbox);
  remove_user(state, user, out);
}

bool invariants_hold(const SessionState& state) {
  if (state.broadcast_navigator && !state.users.contains(*state.broadcast_navigator)) return false;
  if (state.mapping.version() != state.mapping_version) return false;
  for (std::size_t i = 1; i < state.annotations.size(); ++i) {
    if (state.annotations[i].server_seq <= state.annotations[i - 1].server_seq) return false;
  }
  if (!state.annotations.empty() && state.annotations.back().server_seq >= state.next_annotation_seq) {
    return false;
  }
  return true;
}

}  // namespace hyperviz::session

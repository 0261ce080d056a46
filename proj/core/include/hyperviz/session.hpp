#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperviz/mapping.hpp"
#include "hyperviz/spatial_index.hpp"

namespace hyperviz::session {

using UserId = std::string;

/// Camera pose. Orientation is a unit quaternion stored (w, x, y, z).
struct Viewpoint {
  std::array<double, 3> position = {0.5, 0.5, 2.5};
  std::array<double, 4> orientation = {1.0, 0.0, 0.0, 0.0};
  double field_of_view = 60.0;

  /// Throws Error(BadPayload) unless the quaternion norm is 1 within 1e-6,
  /// the field of view lies in (10, 170) degrees and everything is finite.
  void validate() const;

  bool operator==(const Viewpoint&) const = default;
};

inline constexpr std::size_t kMaxAnnotationBytes = 1024;

struct Annotation {
  std::uint64_t row_id = 0;
  UserId author;
  std::string text;
  std::uint64_t server_seq = 0;

  bool operator==(const Annotation&) const = default;
};

/// Authoritative state of one room.
struct SessionState {
  std::string room_id;
  std::map<UserId, Viewpoint> users;
  ChannelMapping mapping;
  std::uint64_t mapping_version = 0;
  std::vector<Annotation> annotations;  // ascending server_seq
  std::optional<UserId> broadcast_navigator;
  std::uint64_t next_annotation_seq = 1;
  std::uint64_t next_message_seq = 1;

  bool operator==(const SessionState&) const = default;
};

/// Wire envelope. Server-to-client envelopes also carry the room's
/// mapping_version at the time they were produced.
struct Envelope {
  std::string type;
  std::uint64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();
  std::optional<std::uint64_t> mapping_version;

  bool operator==(const Envelope&) const = default;
};

namespace msg {
struct Join {
  std::optional<Viewpoint> viewpoint;
};
struct Leave {};
struct SetMapping {
  ChannelMapping mapping;
};
struct ViewpointUpdate {
  Viewpoint viewpoint;
};
struct BroadcastStart {};
struct BroadcastStop {};
struct Annotate {
  std::uint64_t row_id = 0;
  std::string text;
};
/// Either a row id or a ray to pick against the room's current scene.
struct PickLink {
  std::optional<std::uint64_t> row_id;
  std::optional<Ray> ray;
  double pick_radius = 1.0;
};
}  // namespace msg

using ClientMessage = std::variant<msg::Join, msg::Leave, msg::SetMapping, msg::ViewpointUpdate,
                                   msg::BroadcastStart, msg::BroadcastStop, msg::Annotate,
                                   msg::PickLink>;

struct Delivery {
  std::vector<UserId> recipients;
  Envelope message;

  bool operator==(const Delivery&) const = default;
};

/// Catalog-dependent checks and lookups the state machine delegates. The
/// defaults accept every mapping and row and resolve nothing.
class RoomServices {
 public:
  virtual ~RoomServices() = default;
  /// Throws hyperviz::Error (UnknownColumn, KindMismatch, ...) to reject.
  virtual void validate_mapping(const ChannelMapping& mapping) const;
  /// Throws Error(RowOutOfRange) to reject.
  virtual void validate_row(std::uint64_t row_id) const;
  virtual std::optional<std::uint64_t> pick(const Ray& ray, double pick_radius) const;
  virtual std::optional<std::string> link_for(std::uint64_t row_id) const;
};

/// Late-joiner snapshot carried by `welcome`.
struct Snapshot {
  std::string room_id;
  std::map<UserId, Viewpoint> users;
  ChannelMapping mapping;
  std::uint64_t mapping_version = 0;
  std::vector<Annotation> annotations;
  std::optional<UserId> broadcast_navigator;

  bool operator==(const Snapshot&) const = default;
};

Snapshot snapshot(const SessionState& state);

struct Transition {
  SessionState state;
  std::vector<Delivery> outbox;
};

SessionState make_room(std::string room_id);

/// Pure transition: returns the next state and the messages to deliver.
/// Rejected requests leave the state unchanged apart from the outgoing
/// message counter and produce a single `error` to the sender.
Transition handle_message(const SessionState& state, const UserId& sender, const Envelope& message,
                          const RoomServices& services = RoomServices{});

/// In-place variant of handle_message; appends to `outbox`.
void apply_message(SessionState& state, const UserId& sender, const Envelope& message,
                   const RoomServices& services, std::vector<Delivery>& outbox);

/// Transport-level disconnect: behaves like `leave` for members and is a
/// no-op otherwise.
void apply_disconnect(SessionState& state, const UserId& user, std::vector<Delivery>& outbox);

/// True when the state satisfies the room invariants (navigator is a member,
/// annotation sequence numbers strictly increase, versions agree).
bool invariants_hold(const SessionState& state);

}  // namespace hyperviz::session

#include "hyperviz/replica.hpp"

#include "hyperviz/session_codec.hpp"

namespace hyperviz::session {

void SessionReplica::receive(const Envelope& message) {
  if (message.mapping_version) {
    last_seen_version_ = std::max(last_seen_version_, *message.mapping_version);
  }
  const auto& p = message.payload;
  const std::string& type = message.type;

  if (type == "error") {
    errors_.push_back(message);
    return;
  }
  if (type == "welcome") {
    const Snapshot s = snapshot_from_json(p);
    joined_ = true;
    mapping_ = s.mapping;
    mapping_version_ = s.mapping_version;
    annotations_ = s.annotations;
    navigator_ = s.broadcast_navigator;
    users_.clear();
    for (const auto& [id, vp] : s.users) users_.insert(id);
    navigator_viewpoint_.reset();
    last_bcast_seq_.reset();
    if (navigator_) {
      if (auto it = s.users.find(*navigator_); it != s.users.end()) navigator_viewpoint_ = it->second;
    }
    return;
  }
  if (!joined_) return;

  if (type == "user_joined") {
    users_.insert(p.at("user").get<std::string>());
  } else if (type == "user_left") {
    users_.erase(p.at("user").get<std::string>());
  } else if (type == "mapping_changed") {
    mapping_version_ = p.at("mapping_version").get<std::uint64_t>();
    mapping_ = mapping_from_json(p.at("mapping"));
    mapping_.set_version(mapping_version_);
  } else if (type == "viewpoint_bcast") {
    if (navigator_ && p.at("user").get<std::string>() == *navigator_) {
      navigator_viewpoint_ = viewpoint_from_json(p.at("viewpoint"));
      last_bcast_seq_ = p.at("source_seq").get<std::uint64_t>();
    }
  } else if (type == "broadcast_started") {
    navigator_ = p.at("navigator").get<std::string>();
    navigator_viewpoint_ = viewpoint_from_json(p.at("viewpoint"));
    last_bcast_seq_.reset();
  } else if (type == "broadcast_stopped") {
    navigator_.reset();
    navigator_viewpoint_.reset();
    last_bcast_seq_.reset();
  } else if (type == "annotation_added") {
    annotations_.push_back(annotation_from_json(p.at("annotation")));
  } else if (type == "link") {
    links_.push_back(message);
  }
}

Viewpoint SessionReplica::displayed_viewpoint() const {
  if (following_ && navigator_ && *navigator_ != self_ && navigator_viewpoint_) {
    return *navigator_viewpoint_;
  }
  return local_;
}

Snapshot SessionReplica::view() const {
  Snapshot s;
  s.mapping = mapping_;
  s.mapping_version = mapping_version_;
  s.annotations = annotations_;
  s.broadcast_navigator = navigator_;
  for (const auto& id : users_) s.users.emplace(id, Viewpoint{});
  return s;
}

}  // namespace hyperviz::session

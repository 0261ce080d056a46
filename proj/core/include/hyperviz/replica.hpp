#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "hyperviz/session.hpp"

namespace hyperviz::session {

/// Client-side view of a room rebuilt purely from server messages.
///
/// The replica never changes state on its own; it only folds in what the
/// server sends. When following and a navigator is active, the displayed
/// viewpoint is the navigator's most recent viewpoint received.
class SessionReplica {
 public:
  explicit SessionReplica(UserId self) : self_(std::move(self)) {}

  /// Applies one server message. Messages before `welcome` are ignored;
  /// a second `welcome` resets the replica.
  void receive(const Envelope& message);

  const UserId& self() const noexcept { return self_; }
  bool joined() const noexcept { return joined_; }

  const ChannelMapping& mapping() const noexcept { return mapping_; }
  std::uint64_t mapping_version() const noexcept { return mapping_version_; }
  const std::vector<Annotation>& annotations() const noexcept { return annotations_; }
  const std::optional<UserId>& navigator() const noexcept { return navigator_; }
  const std::set<UserId>& users() const noexcept { return users_; }

  void set_following(bool follow) noexcept { following_ = follow; }
  bool following() const noexcept { return following_; }
  void set_local_viewpoint(const Viewpoint& vp) noexcept { local_ = vp; }

  /// What the client would render.
  Viewpoint displayed_viewpoint() const;
  /// source_seq of the last viewpoint_bcast applied, if any since the
  /// broadcast started.
  std::optional<std::uint64_t> last_broadcast_seq() const noexcept { return last_bcast_seq_; }

  /// Highest mapping_version carried by any envelope received.
  std::uint64_t last_seen_version() const noexcept { return last_seen_version_; }
  const std::vector<Envelope>& errors() const noexcept { return errors_; }
  const std::vector<Envelope>& links() const noexcept { return links_; }

  /// Snapshot-equivalent view used to compare replicas with the server.
  Snapshot view() const;

 private:
  UserId self_;
  bool joined_ = false;
  bool following_ = true;
  ChannelMapping mapping_;
  std::uint64_t mapping_version_ = 0;
  std::vector<Annotation> annotations_;
  std::optional<UserId> navigator_;
  std::set<UserId> users_;
  Viewpoint local_;
  std::optional<Viewpoint> navigator_viewpoint_;
  std::optional<std::uint64_t> last_bcast_seq_;
  std::uint64_t last_seen_version_ = 0;
  std::vector<Envelope> errors_;
  std::vector<Envelope> links_;
};

}  // namespace hyperviz::session

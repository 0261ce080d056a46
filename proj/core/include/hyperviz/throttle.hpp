#pragma once

#include <chrono>
#include <optional>

#include "hyperviz/session.hpp"

namespace hyperviz::session {

/// Per-room rate limiter for viewpoint_bcast fan-out.
///
/// At most `max_per_second` deliveries pass per second. An offer that
/// arrives too early is held; a later offer replaces the held one, so the
/// most recent viewpoint is what eventually goes out. Time is supplied by
/// the caller.
class ViewpointThrottle {
 public:
  using Clock = std::chrono::steady_clock;

  explicit ViewpointThrottle(double max_per_second = 30.0);

  /// Returns the delivery when it may be sent now, otherwise holds it.
  std::optional<Delivery> offer(Clock::time_point now, Delivery delivery);

  /// Releases the held delivery once its slot has arrived.
  std::optional<Delivery> poll(Clock::time_point now);

  /// When the held delivery becomes sendable; nullopt if nothing is held.
  std::optional<Clock::time_point> next_release() const;

  /// Drops any held delivery (e.g. when the broadcast stops).
  void discard() noexcept { held_.reset(); }

  bool holding() const noexcept { return held_.has_value(); }
  Clock::duration min_interval() const noexcept { return interval_; }

 private:
  Clock::duration interval_;
  std::optional<Clock::time_point> last_sent_;
  std::optional<Delivery> held_;
};

}  // namespace hyperviz::session

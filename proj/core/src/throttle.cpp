#include "hyperviz/throttle.hpp"

#include "hyperviz/error.hpp"

namespace hyperviz::session {

ViewpointThrottle::ViewpointThrottle(double max_per_second) {
  if (!(max_per_second > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "viewpoint rate limit must be positive");
  }
  interval_ = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(1.0 / max_per_second));
}

std::optional<Delivery> ViewpointThrottle::offer(Clock::time_point now, Delivery delivery) {
  if (!held_ && (!last_sent_ || now - *last_sent_ >= interval_)) {
    last_sent_ = now;
    return delivery;
  }
  held_ = std::move(delivery);
  return poll(now);
}

std::optional<Delivery> ViewpointThrottle::poll(Clock::time_point now) {
  if (!held_) return std::nullopt;
  if (last_sent_ && now - *last_sent_ < interval_) return std::nullopt;
  last_sent_ = now;
  std::optional<Delivery> out = std::move(held_);
  held_.reset();
  return out;
}

std::optional<ViewpointThrottle::Clock::time_point> ViewpointThrottle::next_release() const {
  if (!held_) return std::nullopt;
  return last_sent_ ? *last_sent_ + interval_ : Clock::time_point{};
}

}  // namespace hyperviz::session

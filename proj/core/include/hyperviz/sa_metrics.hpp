#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace hyperviz::sa {

/// Wraps any finite angle into [0, 360).
double normalize_bearing(double degrees) noexcept;

/// Smallest absolute difference between two bearings, in [0, 180].
double angle_difference(double a_deg, double b_deg) noexcept;

/// Landmark position in observer-centred polar form.
class Landmark {
 public:
  /// Normalizes the bearing into [0, 360). Throws Error(InvalidArgument)
  /// unless the bearing is finite and the range is finite and positive.
  Landmark(std::string id, double bearing_deg, double range_m);

  const std::string& id() const noexcept { return id_; }
  double bearing() const noexcept { return bearing_; }
  double range() const noexcept { return range_; }

  Landmark rotated(double delta_deg) const { return Landmark(id_, bearing_ + delta_deg, range_); }

 private:
  std::string id_;
  double bearing_;
  double range_;
};

class LandmarkSet {
 public:
  LandmarkSet() = default;
  /// Throws Error(InvalidArgument) on duplicate ids.
  explicit LandmarkSet(std::vector<Landmark> landmarks);

  const std::vector<Landmark>& landmarks() const noexcept { return landmarks_; }
  std::size_t size() const noexcept { return landmarks_.size(); }
  bool empty() const noexcept { return landmarks_.empty(); }
  const Landmark* find(std::string_view id) const;

  LandmarkSet rotated(double delta_deg) const;

 private:
  std::vector<Landmark> landmarks_;
};

struct LandmarkError {
  double distance_error = 0.0;  // meters
  double angle_error = 0.0;     // degrees, [0, 180]

  bool operator==(const LandmarkError&) const = default;
};

struct MapScore {
  std::map<std::string, LandmarkError> per_landmark;
  double total_distance_error = 0.0;
  double total_angle_error = 0.0;
  /// Global offset added to every drawn bearing, reported in (-180, 180].
  double rotation_applied = 0.0;
};

/// Throws Error(IdMismatch) when the ids differ.
LandmarkError landmark_errors(const Landmark& truth, const Landmark& drawn);

/// Offset in [0, 360) minimizing the summed angle error once added to every
/// drawn bearing; the smallest such offset when several tie. The objective
/// is piecewise linear, so only its breakpoints (each landmark's exact-match
/// offset and the antipode of it) and 0 need evaluating.
/// Errors: IdSetMismatch, Empty.
double best_rotation(const LandmarkSet& truth, const LandmarkSet& drawn);

/// Summed per-landmark errors, optionally after the best global rotation.
/// Errors: IdSetMismatch (message lists the offending ids), Empty.
MapScore score_map(const LandmarkSet& truth, const LandmarkSet& drawn, bool align);

/// Reads a CSV with header `id,bearing_deg,range_m` (columns in any order).
LandmarkSet parse_landmarks_csv(std::string_view text);
LandmarkSet load_landmarks_csv(const std::filesystem::path& path);

nlohmann::json to_json(const MapScore& score);

}  // namespace hyperviz::sa

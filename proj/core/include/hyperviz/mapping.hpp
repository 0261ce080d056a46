#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hyperviz/catalog.hpp"
#include "hyperviz/scene.hpp"

namespace hyperviz {

enum class VisualChannel : std::uint8_t {
  pos_x,
  pos_y,
  pos_z,
  color,
  size,
  shape,
  alpha,
  orientation,
};

inline constexpr std::size_t kChannelCount = 8;

inline constexpr std::array<VisualChannel, kChannelCount> kAllChannels = {
    VisualChannel::pos_x, VisualChannel::pos_y, VisualChannel::pos_z,
    VisualChannel::color, VisualChannel::size,  VisualChannel::shape,
    VisualChannel::alpha, VisualChannel::orientation,
};

std::string_view to_string(VisualChannel channel) noexcept;
/// Throws Error(UnknownChannel).
VisualChannel parse_channel(std::string_view name);
constexpr bool is_positional(VisualChannel c) noexcept {
  return c == VisualChannel::pos_x || c == VisualChannel::pos_y || c == VisualChannel::pos_z;
}

enum class TransformKind : std::uint8_t { linear, log, rank };

std::string_view to_string(TransformKind kind) noexcept;
/// Throws Error(InvalidTransform).
TransformKind parse_transform_kind(std::string_view name);

/// Normalization of one source column onto [0, 1]. Clip bounds are
/// percentiles of the present values (linear interpolation between order
/// statistics); the rank transform ignores them.
struct ChannelTransform {
  TransformKind kind = TransformKind::linear;
  double clip_lo = 0.0;
  double clip_hi = 100.0;

  /// Throws Error(InvalidTransform) unless 0 <= clip_lo < clip_hi <= 100.
  void validate() const;

  bool operator==(const ChannelTransform&) const = default;
};

struct ChannelAssignment {
  std::string column;
  ChannelTransform transform;

  bool operator==(const ChannelAssignment&) const = default;
};

/// Channel -> column assignment. A column may feed several channels.
class ChannelMapping {
 public:
  ChannelMapping() = default;

  const std::optional<ChannelAssignment>& operator[](VisualChannel c) const noexcept {
    return slots_[static_cast<std::size_t>(c)];
  }
  void assign(VisualChannel c, std::string column, ChannelTransform transform = {});
  void clear(VisualChannel c) noexcept { slots_[static_cast<std::size_t>(c)].reset(); }
  bool empty() const noexcept;

  std::uint64_t version() const noexcept { return version_; }
  void set_version(std::uint64_t v) noexcept { version_ = v; }

  /// Checks every assignment against the catalog schema: UnknownColumn,
  /// KindMismatch (categorical outside the shape channel) and
  /// NonPositiveForLog. Error messages name the channel.
  void validate(const Catalog& catalog) const;

  bool operator==(const ChannelMapping&) const = default;

 private:
  std::array<std::optional<ChannelAssignment>, kChannelCount> slots_{};
  std::uint64_t version_ = 0;
};

/// JSON form: an object keyed by channel name. Each value is either a column
/// name (linear transform) or {"column", "transform", "clip_lo", "clip_hi"}.
/// The version is not part of the object. Throws Error(BadPayload),
/// Error(UnknownChannel) or Error(InvalidTransform).
ChannelMapping mapping_from_json(const nlohmann::json& j);
nlohmann::json mapping_to_json(const ChannelMapping& mapping);

/// Value used for rows whose non-positional channel cell is missing, or
/// for unassigned channels.
struct ChannelDefaults {
  Rgba8 color = {128, 128, 128, 255};
  float size = 0.6f;
  std::uint8_t shape = 0;
  float alpha = 1.0f;
  float orientation = 0.0f;
};

/// Normalizes a numeric column onto [0, 1]; missing stays missing.
///
/// linear: clamp((v - lo) / (hi - lo), 0, 1) with lo/hi the clip percentiles;
/// log: the linear rule applied to log10(v); rank: average rank / (n - 1).
/// A degenerate range (hi == lo, or a single present value for rank) maps
/// every present value to 0.5.
/// Errors: AllMissing, NonPositiveForLog, KindMismatch (categorical input),
/// InvalidTransform.
std::vector<std::optional<double>> apply_transform(const Column& column,
                                                   const ChannelTransform& transform);

/// Percentile with linear interpolation between closest ranks over an
/// ascending, non-empty sequence.
double percentile_of_sorted(std::span<const double> sorted, double percent);

/// Blue (t = 0) to red (t = 1) sweep: hue 240 * (1 - t) degrees at full
/// saturation and value. t is clamped to [0, 1]; NaN reads as 0.
std::array<std::uint8_t, 3> hue_to_rgb(double t) noexcept;

/// Shape bins in [0, n_bins). Categorical: index in the sorted distinct
/// categories modulo n_bins. Numeric: min(floor(t * n_bins), n_bins - 1)
/// with t from `transform` (linear by default). Missing stays missing.
std::vector<std::optional<std::uint8_t>> encode_shape(const Column& column,
                                                      int n_bins = 8,
                                                      const ChannelTransform& transform = {});

/// Builds a scene from a catalog and a channel mapping. Pure: identical
/// inputs give a bit-identical scene.
Scene build_scene(const Catalog& catalog, const ChannelMapping& mapping,
                  const ChannelDefaults& defaults = {});

/// Rebuilds from scratch under a new mapping; no state carries over from
/// earlier scenes.
Scene remap(const Catalog& catalog, const ChannelMapping& new_mapping,
            const ChannelDefaults& defaults = {});

// Channel value encodings applied by build_scene to a normalized t.
float size_from_unit(double t) noexcept;          // 0.2 + 0.8 t
float alpha_from_unit(double t) noexcept;         // 0.1 + 0.9 t
float orientation_from_unit(double t) noexcept;   // 2 pi t, kept below 2 pi
std::uint8_t alpha_to_byte(float alpha) noexcept;

}  // namespace hyperviz

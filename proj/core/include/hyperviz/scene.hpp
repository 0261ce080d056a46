#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace hyperviz {

using Vec3f = std::array<float, 3>;
using Rgba8 = std::array<std::uint8_t, 4>;

/// Render-ready point cloud stored as parallel attribute arrays.
///
/// Positions lie in the unit cube, orientation is in [0, 2pi) radians and
/// row_ids index the source catalog. `excluded_rows` counts catalog rows
/// that were dropped for lacking a position.
struct Scene {
  std::vector<Vec3f> positions;
  std::vector<Rgba8> colors;
  std::vector<float> sizes;
  std::vector<std::uint8_t> shape_ids;
  std::vector<float> orientations;
  std::vector<std::uint64_t> row_ids;
  std::uint64_t excluded_rows = 0;

  std::size_t count() const noexcept { return positions.size(); }

  void reserve(std::size_t n);
  void resize(std::size_t n);

  /// Copies point `src_index` of `src` onto the end of this scene.
  void append_from(const Scene& src, std::size_t src_index);

  /// True when all attribute arrays have the same length.
  bool consistent() const noexcept;

  bool operator==(const Scene&) const = default;
};

/// Attribute payload per point in bytes (position, color, size, shape,
/// orientation, row id), excluding container overhead.
inline constexpr std::size_t kScenePointPayloadBytes =
    sizeof(Vec3f) + sizeof(Rgba8) + sizeof(float) + sizeof(std::uint8_t) + sizeof(float) +
    sizeof(std::uint64_t);

}  // namespace hyperviz

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hyperviz/scene.hpp"

namespace hyperviz {

using Vec3d = std::array<double, 3>;

/// Half-line used for picking. The direction is unit length within 1e-6.
class Ray {
 public:
  /// Throws Error(InvalidArgument) unless |direction| is 1 within 1e-6 and
  /// all components are finite.
  Ray(const Vec3d& origin, const Vec3d& direction);

  /// Normalizes `direction` first; throws on a zero or non-finite vector.
  static Ray through(const Vec3d& origin, const Vec3d& direction);

  const Vec3d& origin() const noexcept { return origin_; }
  const Vec3d& direction() const noexcept { return direction_; }

 private:
  Vec3d origin_;
  Vec3d direction_;
};

/// Ray parameter of `point` when its perpendicular distance to the ray is at
/// most `reach` and it is not behind the origin; nullopt otherwise.
std::optional<double> ray_hit_distance(const Ray& ray, const Vec3f& point, double reach) noexcept;

/// Octree over the unit cube. Leaves hold at most kLeafCapacity points
/// unless they sit at kMaxDepth. Immutable after construction; concurrent
/// queries are safe.
class SpatialIndex {
 public:
  static constexpr std::size_t kLeafCapacity = 64;
  static constexpr int kMaxDepth = 12;

  explicit SpatialIndex(const Scene& scene);

  std::size_t size() const noexcept { return points_.size(); }

  /// Nearest point along the ray whose perpendicular distance is within
  /// pick_radius times its size; ties go to the lower row_id.
  /// Throws Error(InvalidArgument) unless pick_radius > 0.
  std::optional<std::size_t> pick(const Ray& ray, double pick_radius) const;

  /// The k nearest points (scene indices) by Euclidean distance, ascending,
  /// ties by lower row_id. Throws Error(InvalidArgument) when k == 0.
  std::vector<std::size_t> knn(const Vec3d& query, std::size_t k) const;

  /// Scene indices of every point stored at exactly `position`.
  std::vector<std::size_t> find_exact(const Vec3f& position) const;

  struct Leaf {
    int depth;
    std::span<const std::uint32_t> points;  // scene indices, insertion order
  };
  /// Occupied leaves in Morton (Z-curve) order. An empty index has a single
  /// empty root leaf.
  std::vector<Leaf> leaves() const;

  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    std::array<float, 3> lo;  // tight bounds of the points below
    std::array<float, 3> hi;
    float max_size = 0.0f;
    std::uint32_t begin = 0;  // range into the leaf-ordered arrays
    std::uint32_t end = 0;
    std::uint32_t first_child = 0;
    std::uint8_t child_count = 0;
    std::uint8_t depth = 0;
  };

  void build(std::uint32_t node, std::uint32_t begin, std::uint32_t end,
             const std::array<double, 3>& cell_lo, double cell_size, int depth,
             std::vector<std::uint32_t>& scratch);
  bool is_leaf(const Node& node) const noexcept { return node.child_count == 0; }

  std::vector<Node> nodes_;
  // Leaf-ordered copies of the scene attributes used by queries.
  std::vector<std::uint32_t> order_;
  std::vector<Vec3f> points_;
  std::vector<float> sizes_;
  std::vector<std::uint64_t> row_ids_;
};

SpatialIndex build_index(const Scene& scene);

/// Budget-bounded stratified subsample: round-robin over occupied leaves in
/// Morton order, each leaf contributing its points in insertion order.
/// Retained points keep their attributes and appear in their original scene
/// order. Throws Error(InvalidArgument) when budget == 0.
Scene decimate(const Scene& scene, std::size_t budget);
Scene decimate(const Scene& scene, const SpatialIndex& index, std::size_t budget);

}  // namespace hyperviz

#include "hyperviz/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

#include "hyperviz/error.hpp"

namespace hyperviz {

// ---------------------------------------------------------------------------
// Ray

Ray::Ray(const Vec3d& origin, const Vec3d& direction) : origin_(origin), direction_(direction) {
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(origin[a]) || !std::isfinite(direction[a])) {
      throw Error(ErrorCode::InvalidArgument, "ray components must be finite");
    }
  }
  const double norm = std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] +
                                direction[2] * direction[2]);
  if (std::abs(norm - 1.0) > 1e-6) {
    throw Error(ErrorCode::InvalidArgument, "ray direction must be a unit vector");
  }
}

Ray Ray::through(const Vec3d& origin, const Vec3d& direction) {
  const double norm = std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] +
                                direction[2] * direction[2]);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::InvalidArgument, "ray direction must be non-zero and finite");
  }
  return Ray(origin, {direction[0] / norm, direction[1] / norm, direction[2] / norm});
}

std::optional<double> ray_hit_distance(const Ray& ray, const Vec3f& point, double reach) noexcept {
  const auto& o = ray.origin();
  const auto& d = ray.direction();
  const double vx = point[0] - o[0], vy = point[1] - o[1], vz = point[2] - o[2];
  const double t = vx * d[0] + vy * d[1] + vz * d[2];
  if (t < 0.0) return std::nullopt;
  const double wx = vx - t * d[0], wy = vy - t * d[1], wz = vz - t * d[2];
  const double perp2 = wx * wx + wy * wy + wz * wz;
  if (perp2 > reach * reach) return std::nullopt;
  return t;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();

int octant_of(const Vec3f& p, const std::array<double, 3>& center) noexcept {
  return (p[0] >= center[0] ? 1 : 0) | (p[1] >= center[1] ? 2 : 0) | (p[2] >= center[2] ? 4 : 0);
}

}  // namespace

SpatialIndex::SpatialIndex(const Scene& scene) {
  const std::size_t n = scene.count();
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::InvalidArgument, "scene too large for the spatial index");
  }
  // Scene-ordered staging; build() permutes order_ and reads these.
  points_ = scene.positions;
  sizes_ = scene.sizes;
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);

  std::vector<std::uint32_t> scratch(n);
  nodes_.reserve(std::max<std::size_t>(1, n / 16));
  nodes_.emplace_back();
  build(0, 0, static_cast<std::uint32_t>(n), {0.0, 0.0, 0.0}, 1.0, 0, scratch);

  std::vector<Vec3f> points(n);
  std::vector<float> sizes(n);
  row_ids_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    points[i] = points_[order_[i]];
    sizes[i] = sizes_[order_[i]];
    row_ids_[i] = scene.row_ids[order_[i]];
  }
  points_ = std::move(points);
  sizes_ = std::move(sizes);
}

void SpatialIndex::build(std::uint32_t node_index, std::uint32_t begin, std::uint32_t end,
                         const std::array<double, 3>& cell_lo, double cell_size, int depth,
                         std::vector<std::uint32_t>& scratch) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.depth = static_cast<std::uint8_t>(depth);
  node.lo = {kInf, kInf, kInf};
  node.hi = {-kInf, -kInf, -kInf};

  if (end - begin <= kLeafCapacity || depth == kMaxDepth) {
    for (std::uint32_t i = begin; i < end; ++i) {
      const Vec3f& p = points_[order_[i]];
      for (int a = 0; a < 3; ++a) {
        node.lo[a] = std::min(node.lo[a], p[a]);
        node.hi[a] = std::max(node.hi[a], p[a]);
      }
      node.max_size = std::max(node.max_size, sizes_[order_[i]]);
    }
    nodes_[node_index] = node;
    return;
  }

  const double half = cell_size / 2.0;
  const std::array<double, 3> center = {cell_lo[0] + half, cell_lo[1] + half, cell_lo[2] + half};

  // Stable counting sort of the range by octant keeps insertion order.
  std::array<std::uint32_t, 9> offset{};
  for (std::uint32_t i = begin; i < end; ++i) ++offset[octant_of(points_[order_[i]], center) + 1];
  for (int k = 0; k < 8; ++k) offset[k + 1] += offset[k];
  std::array<std::uint32_t, 8> cursor;
  std::copy_n(offset.begin(), 8, cursor.begin());
  for (std::uint32_t i = begin; i < end; ++i) {
    const std::uint32_t id = order_[i];
    scratch[begin + cursor[octant_of(points_[id], center)]++] = id;
  }
  std::copy(scratch.begin() + begin, scratch.begin() + end, order_.begin() + begin);

  node.first_child = static_cast<std::uint32_t>(nodes_.size());
  for (int k = 0; k < 8; ++k) {
    if (offset[k + 1] > offset[k]) ++node.child_count;
  }
  nodes_.resize(nodes_.size() + node.child_count);

  std::uint32_t child = node.first_child;
  for (int k = 0; k < 8; ++k) {
    if (offset[k + 1] == offset[k]) continue;
    const std::array<double, 3> child_lo = {cell_lo[0] + ((k & 1) ? half : 0.0),
                                            cell_lo[1] + ((k & 2) ? half : 0.0),
                                            cell_lo[2] + ((k & 4) ? half : 0.0)};
    build(child, begin + offset[k], begin + offset[k + 1], child_lo, half, depth + 1, scratch);
    const Node& c = nodes_[child];
    for (int a = 0; a < 3; ++a) {
      node.lo[a] = std::min(node.lo[a], c.lo[a]);
      node.hi[a] = std::max(node.hi[a], c.hi[a]);
    }
    node.max_size = std::max(node.max_size, c.max_size);
    ++child;
  }
  nodes_[node_index] = node;
}

SpatialIndex build_index(const Scene& scene) { return SpatialIndex(scene); }

// ---------------------------------------------------------------------------
// Queries

namespace {

// Entry parameter of the ray into the box grown by `grow` on every side,
// clamped to t >= 0; nullopt on a miss.
std::optional<double> ray_box_entry(const Ray& ray, const std::array<float, 3>& lo,
                                    const std::array<float, 3>& hi, double grow) noexcept {
  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::infinity();
  const auto& o = ray.origin();
  const auto& d = ray.direction();
  for (int a = 0; a < 3; ++a) {
    const double blo = static_cast<double>(lo[a]) - grow;
    const double bhi = static_cast<double>(hi[a]) + grow;
    if (d[a] == 0.0) {
      if (o[a] < blo || o[a] > bhi) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d[a];
    double t1 = (blo - o[a]) * inv;
    double t2 = (bhi - o[a]) * inv;
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
    if (t_near > t_far) return std::nullopt;
  }
  return t_near;
}

double box_distance2(const std::array<float, 3>& lo, const std::array<float, 3>& hi,
                     const Vec3d& q) noexcept {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = 0.0;
    if (q[a] < lo[a]) {
      d = static_cast<double>(lo[a]) - q[a];
    } else if (q[a] > hi[a]) {
      d = q[a] - static_cast<double>(hi[a]);
    }
    d2 += d * d;
  }
  return d2;
}

}  // namespace

std::optional<std::size_t> SpatialIndex::pick(const Ray& ray, double pick_radius) const {
  if (!(pick_radius > 0.0) || !std::isfinite(pick_radius)) {
    throw Error(ErrorCode::InvalidArgument, "pick_radius must be positive");
  }
  struct Best {
    double t;
    std::uint64_t row;
    std::uint32_t slot;
  };
  std::optional<Best> best;

  std::vector<std::uint32_t> stack = {0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.begin == node.end) continue;
    const double reach = pick_radius * static_cast<double>(node.max_size);
    const auto entry = ray_box_entry(ray, node.lo, node.hi, reach * (1.0 + 1e-9) + 1e-9);
    if (!entry || (best && *entry - 1e-9 > best->t)) continue;

    if (!is_leaf(node)) {
      for (std::uint32_t c = 0; c < node.child_count; ++c) stack.push_back(node.first_child + c);
      continue;
    }
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const auto t = ray_hit_distance(ray, points_[i], pick_radius * static_cast<double>(sizes_[i]));
      if (!t) continue;
      if (!best || std::tie(*t, row_ids_[i], order_[i]) < std::tie(best->t, best->row, best->slot)) {
        best = Best{*t, row_ids_[i], order_[i]};
      }
    }
  }
  if (!best) return std::nullopt;
  return static_cast<std::size_t>(best->slot);
}

std::vector<std::size_t> SpatialIndex::knn(const Vec3d& query, std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");

  using Candidate = std::tuple<double, std::uint64_t, std::uint32_t>;  // d2, row, scene index
  std::priority_queue<Candidate> found;  // max-heap: worst on top

  using Pending = std::pair<double, std::uint32_t>;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> frontier;
  if (nodes_[0].begin != nodes_[0].end) {
    frontier.emplace(box_distance2(nodes_[0].lo, nodes_[0].hi, query), 0);
  }
  while (!frontier.empty()) {
    const auto [bound, index] = frontier.top();
    frontier.pop();
    if (found.size() == k && bound > std::get<0>(found.top())) break;
    const Node& node = nodes_[index];
    if (!is_leaf(node)) {
      for (std::uint32_t c = 0; c < node.child_count; ++c) {
        const Node& child = nodes_[node.first_child + c];
        frontier.emplace(box_distance2(child.lo, child.hi, query), node.first_child + c);
      }
      continue;
    }
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const double dx = points_[i][0] - query[0];
      const double dy = points_[i][1] - query[1];
      const double dz = points_[i][2] - query[2];
      Candidate c{dx * dx + dy * dy + dz * dz, row_ids_[i], order_[i]};
      if (found.size() < k) {
        found.push(c);
      } else if (c < found.top()) {
        found.pop();
        found.push(c);
      }
    }
  }

  std::vector<std::size_t> result(found.size());
  for (std::size_t i = result.size(); i-- > 0;) {
    result[i] = std::get<2>(found.top());
    found.pop();
  }
  return result;
}

std::vector<std::size_t> SpatialIndex::find_exact(const Vec3f& position) const {
  std::vector<std::size_t> hits;
  std::vector<std::uint32_t> stack = {0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    bool inside = node.begin != node.end;
    for (int a = 0; a < 3 && inside; ++a) {
      inside = position[a] >= node.lo[a] && position[a] <= node.hi[a];
    }
    if (!inside) continue;
    if (!is_leaf(node)) {
      for (std::uint32_t c = 0; c < node.child_count; ++c) stack.push_back(node.first_child + c);
      continue;
    }
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      if (points_[i] == position) hits.push_back(order_[i]);
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

std::vector<SpatialIndex::Leaf> SpatialIndex::leaves() const {
  std::vector<Leaf> out;
  // Children are stored in octant order, so depth-first order is Morton order.
  std::vector<std::uint32_t> stack = {0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (is_leaf(node)) {
      out.push_back(Leaf{node.depth, std::span<const std::uint32_t>(order_).subspan(
                                         node.begin, node.end - node.begin)});
      continue;
    }
    for (std::uint32_t c = node.child_count; c-- > 0;) stack.push_back(node.first_child + c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decimation

Scene decimate(const Scene& scene, std::size_t budget) {
  if (budget == 0) throw Error(ErrorCode::InvalidArgument, "budget must be at least 1");
  if (budget >= scene.count()) return scene;
  return decimate(scene, SpatialIndex(scene), budget);
}

Scene decimate(const Scene& scene, const SpatialIndex& index, std::size_t budget) {
  if (budget == 0) throw Error(ErrorCode::InvalidArgument, "budget must be at least 1");
  if (index.size() != scene.count()) {
    throw Error(ErrorCode::InvalidArgument, "index was built for a different scene");
  }
  if (budget >= scene.count()) return scene;

  const auto leaves = index.leaves();
  std::vector<char> keep(scene.count(), 0);
  std::size_t taken = 0;
  for (std::size_t round = 0; taken < budget; ++round) {
    for (const auto& leaf : leaves) {
      if (round >= leaf.points.size()) continue;
      keep[leaf.points[round]] = 1;
      if (++taken == budget) break;
    }
  }

  Scene out;
  out.reserve(budget);
  out.excluded_rows = scene.excluded_rows;
  for (std::size_t i = 0; i < scene.count(); ++i) {
    if (keep[i]) out.append_from(scene, i);
  }
  return out;
}

}  // namespace hyperviz

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <random>
#include <set>

#include "hyperviz/error.hpp"
#include "hyperviz/spatial_index.hpp"
#include "support/fixtures.hpp"
#include "support/properties.hpp"

using namespace hyperviz;

namespace {

Scene points(std::vector<Vec3f> p, float size = 1.0f) {
  Scene s;
  s.resize(p.size());
  s.positions = std::move(p);
  for (std::size_t i = 0; i < s.count(); ++i) {
    s.sizes[i] = size;
    s.row_ids[i] = i;
  }
  return s;
}

// Leaf-membership oracle: every index exactly once, capacity respected.
void check_structure(const SpatialIndex& index, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& leaf : index.leaves()) {
    if (leaf.depth < SpatialIndex::kMaxDepth) CHECK(leaf.points.size() <= SpatialIndex::kLeafCapacity);
    for (auto i : leaf.points) ++seen[i];
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

// Cell of a point at `depth`, interleaved x (bit 0), y (bit 1), z (bit 2).
std::uint64_t morton(const Vec3f& p, int depth) {
  std::uint64_t code = 0;
  for (int level = 0; level < depth; ++level) {
    for (int a = 2; a >= 0; --a) {
      const auto cells = static_cast<double>(1u << (level + 1));
      const auto bit = static_cast<std::uint64_t>(std::min(std::floor(p[a] * cells), cells - 1)) & 1u;
      code = (code << 1) | bit;
    }
  }
  return code;
}

}  // namespace

TEST_SUITE("spatial_index") {

TEST_CASE("empty scene has one empty root leaf") {
  const SpatialIndex index{Scene{}};
  const auto leaves = index.leaves();
  REQUIRE(leaves.size() == 1);
  CHECK(leaves[0].points.empty());
  CHECK(leaves[0].depth == 0);
  CHECK_FALSE(index.pick(Ray({0, 0, -1}, {0, 0, 1}), 1.0).has_value());
  CHECK(index.knn({0, 0, 0}, 3).empty());
}

TEST_CASE("65 coincident points form a chain to the depth limit") {
  const SpatialIndex index(points(std::vector<Vec3f>(65, {0.3f, 0.3f, 0.3f})));
  const auto leaves = index.leaves();
  REQUIRE(leaves.size() == 1);
  CHECK(leaves[0].depth == SpatialIndex::kMaxDepth);
  CHECK(leaves[0].points.size() == 65);
  CHECK(index.node_count() == SpatialIndex::kMaxDepth + 1);
  check_structure(index, 65);
}

TEST_CASE("every point is retrievable by exact position") {
  testing::Rng rng(12);
  const Scene s = testing::random_scene(rng, 100'000);
  const SpatialIndex index(s);
  check_structure(index, s.count());
  for (std::size_t i = 0; i < s.count(); ++i) {
    const auto hits = index.find_exact(s.positions[i]);
    if (std::find(hits.begin(), hits.end(), i) == hits.end()) {
      FAIL("point " << i << " not found");
    }
  }
}

TEST_CASE("leaves come out in Morton order and keep insertion order") {
  testing::Rng rng(2);
  const Scene s = testing::random_scene(rng, 5000);
  const SpatialIndex index(s);
  std::uint64_t last = 0;
  bool first = true;
  for (const auto& leaf : index.leaves()) {
    CHECK(std::is_sorted(leaf.points.begin(), leaf.points.end()));
    // Compare at the finest depth present so prefixes order correctly.
    const auto code = morton(s.positions[leaf.points.front()], leaf.depth) << (3 * (12 - leaf.depth));
    if (!first) CHECK(code > last);
    last = code;
    first = false;
  }
}

TEST_CASE("pick basics") {
  const SpatialIndex one(points({{0.5f, 0.5f, 0.5f}}));
  CHECK(one.pick(Ray({0.5, 0.5, -1}, {0, 0, 1}), 0.01) == 0u);
  CHECK_FALSE(one.pick(Ray({0.5, 0.5, 2}, {0, 0, 1}), 0.01).has_value());  // behind the origin
  CHECK_FALSE(one.pick(Ray({0.6, 0.5, -1}, {0, 0, 1}), 0.01).has_value());

  const SpatialIndex two(points({{0.5f, 0.5f, 2.0f}, {0.5f, 0.5f, 1.0f}}));
  CHECK(two.pick(Ray({0.5, 0.5, 0}, {0, 0, 1}), 0.01) == 1u);

  // Equal distance along the ray: lower row_id wins.
  Scene tie = points({{0.5f, 0.5f, 0.5f}, {0.5f, 0.5f, 0.5f}});
  tie.row_ids = {9, 4};
  CHECK(SpatialIndex(tie).pick(Ray({0.5, 0.5, 0}, {0, 0, 1}), 0.01) == 1u);

  // Radius scales with point size.
  Scene sized = points({{0.5f, 0.6f, 0.5f}});
  sized.sizes = {0.2f};
  CHECK_FALSE(SpatialIndex(sized).pick(Ray({0.5, 0.5, 0}, {0, 0, 1}), 0.4).has_value());
  sized.sizes = {1.0f};
  CHECK(SpatialIndex(sized).pick(Ray({0.5, 0.5, 0}, {0, 0, 1}), 0.4) == 0u);

  CHECK_THROWS_AS(one.pick(Ray({0, 0, 0}, {0, 0, 1}), 0.0), Error);
  CHECK_THROWS_AS(Ray({0, 0, 0}, {0, 0, 2}), Error);
  CHECK_THROWS_AS(Ray::through({0, 0, 0}, {0, 0, 0}), Error);
}

TEST_CASE("knn basics") {
  const SpatialIndex one(points({{0.1f, 0.1f, 0.1f}}));
  CHECK(one.knn({0.9, 0.9, 0.9}, 1) == std::vector<std::size_t>{0});
  const Scene s = points({{0.0f, 0.0f, 0.0f}, {0.5f, 0.5f, 0.5f}, {0.2f, 0.2f, 0.2f}});
  CHECK(SpatialIndex(s).knn({0, 0, 0}, 10) == std::vector<std::size_t>{0, 2, 1});
  Scene tie = points({{0.25f, 0.5f, 0.5f}, {0.75f, 0.5f, 0.5f}});
  tie.row_ids = {3, 1};
  CHECK(SpatialIndex(tie).knn({0.5, 0.5, 0.5}, 1) == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(one.knn({0, 0, 0}, 0), Error);
}

TEST_CASE("pick and knn agree with brute force") {
  const auto report = testing::check_index_oracles(77, 200, 1000, 10);
  INFO(report.first_failure);
  CHECK(report.ok());
}

TEST_CASE("decimate trivial budgets") {
  testing::Rng rng(5);
  const Scene s = testing::random_scene(rng, 300);
  CHECK(decimate(s, 300) == s);
  CHECK(decimate(s, 1000) == s);
  const Scene one = decimate(s, 1);
  CHECK(one.count() == 1);
  CHECK_THROWS_AS(decimate(s, 0), Error);
}

TEST_CASE("decimate keeps a subset with attributes intact") {
  testing::Rng rng(6);
  Scene s = testing::random_scene(rng, 5000, true);
  s.excluded_rows = 11;
  const Scene d = decimate(s, 700);
  REQUIRE(d.count() == 700);
  CHECK(d.excluded_rows == 11);
  std::map<std::uint64_t, std::size_t> by_row;
  for (std::size_t i = 0; i < s.count(); ++i) by_row[s.row_ids[i]] = i;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < d.count(); ++i) {
    const auto it = by_row.find(d.row_ids[i]);
    REQUIRE(it != by_row.end());
    const std::size_t j = it->second;
    CHECK(d.positions[i] == s.positions[j]);
    CHECK(d.colors[i] == s.colors[j]);
    CHECK(d.sizes[i] == s.sizes[j]);
    if (i > 0) CHECK(j > prev);  // original order
    prev = j;
  }
  CHECK(decimate(s, 700) == d);
}

TEST_CASE("two dense clusters share the budget evenly") {
  // Each cluster fills one depth-1 cell with 500 points spread 63/62 over
  // its eight sub-cells, so every sub-cell is a leaf.
  testing::Rng rng(31);
  std::uniform_real_distribution<float> jitter(0.0f, 0.25f);
  std::vector<Vec3f> p;
  for (float base : {0.0f, 0.5f}) {
    for (int k = 0; k < 8; ++k) {
      const int count = k < 4 ? 63 : 62;
      for (int i = 0; i < count; ++i) {
        p.push_back({base + 0.25f * (k & 1) + jitter(rng), base + 0.25f * ((k >> 1) & 1) + jitter(rng),
                     base + 0.25f * ((k >> 2) & 1) + jitter(rng)});
      }
    }
  }
  const Scene s = points(p);
  const SpatialIndex index(s);

  // Oracle: run the stratification by hand over the generated leaves.
  const auto leaves = index.leaves();
  std::vector<std::size_t> per_cluster(2, 0);
  std::size_t taken = 0;
  for (std::size_t round = 0; taken < 100; ++round) {
    for (const auto& leaf : leaves) {
      if (round >= leaf.points.size()) continue;
      ++per_cluster[leaf.points[round] < 500 ? 0 : 1];
      if (++taken == 100) break;
    }
  }
  const Scene d = decimate(s, index, 100);
  std::size_t in_a = 0;
  for (auto r : d.row_ids) in_a += r < 500;
  CHECK(in_a == per_cluster[0]);
  CHECK(d.count() - in_a == per_cluster[1]);
  CHECK(leaves.size() == 16);
  CHECK(in_a >= 48);
  CHECK(in_a <= 52);
  CHECK(d.count() - in_a >= 48);
}

TEST_CASE("build time grows as n log n") {
  // Best-of-five timings. n log n doubling costs about 2.1x, quadratic 4x.
  auto best_time = [](std::size_t n) {
    testing::Rng rng(n);
    const Scene s = testing::random_scene(rng, n);
    double best = 1e9;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const SpatialIndex index(s);
      const auto t1 = std::chrono::steady_clock::now();
      CHECK(index.size() == n);
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
  };
  const double a = best_time(250'000);
  const double b = best_time(500'000);
  const double c = best_time(1'000'000);
  MESSAGE("build 2.5e5: " << a << " s, 5e5: " << b << " s, 1e6: " << c << " s");
  CHECK(b / a <= 3.0);
  CHECK(c / b <= 3.0);
}

}  // TEST_SUITE

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace hyperviz::testing {

Catalog random_numeric_catalog(Rng& rng, std::size_t n_rows, std::size_t n_cols, double missing_rate) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution missing(missing_rate);
  std::vector<Column> cols;
  for (std::size_t c = 0; c < n_cols; ++c) {
    std::vector<double> v(n_rows);
    for (auto& x : v) x = (missing_rate > 0.0 && missing(rng)) ? NAN : unit(rng);
    cols.push_back(Column::numeric("c" + std::to_string(c), std::move(v)));
  }
  return Catalog(std::move(cols));
}

Scene random_scene(Rng& rng, std::size_t n, bool shuffle_row_ids) {
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  std::uniform_real_distribution<float> size(0.2f, 1.0f);
  Scene s;
  s.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.positions[i] = {unit(rng), unit(rng), unit(rng)};
    s.colors[i] = {static_cast<std::uint8_t>(i), 0, 0, 255};
    s.sizes[i] = size(rng);
    s.shape_ids[i] = static_cast<std::uint8_t>(i % 8);
    s.orientations[i] = 0.0f;
    s.row_ids[i] = i;
  }
  if (shuffle_row_ids) std::shuffle(s.row_ids.begin(), s.row_ids.end(), rng);
  return s;
}

Scene lattice_scene(Rng& rng, std::size_t n, int lattice) {
  Scene s = random_scene(rng, n, true);
  std::uniform_int_distribution<int> cell(0, lattice);
  for (auto& p : s.positions) {
    for (auto& x : p) x = static_cast<float>(cell(rng)) / static_cast<float>(lattice);
  }
  for (auto& sz : s.sizes) sz = 0.5f;
  return s;
}

ChannelMapping all_channels_mapping() {
  ChannelMapping m;
  for (std::size_t i = 0; i < kAllChannels.size(); ++i) m.assign(kAllChannels[i], "c" + std::to_string(i));
  return m;
}

std::optional<std::size_t> brute_force_pick(const Scene& scene, const std::array<double, 3>& o,
                                            const std::array<double, 3>& d, double radius) {
  std::optional<std::tuple<double, std::uint64_t, std::size_t>> best;
  for (std::size_t i = 0; i < scene.count(); ++i) {
    const auto& p = scene.positions[i];
    const double v[3] = {p[0] - o[0], p[1] - o[1], p[2] - o[2]};
    const double t = v[0] * d[0] + v[1] * d[1] + v[2] * d[2];
    if (t < 0.0) continue;
    double perp2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double w = v[a] - t * d[a];
      perp2 += w * w;
    }
    const double reach = radius * static_cast<double>(scene.sizes[i]);
    if (perp2 > reach * reach) continue;
    const auto key = std::make_tuple(t, scene.row_ids[i], i);
    if (!best || key < *best) best = key;
  }
  if (!best) return std::nullopt;
  return std::get<2>(*best);
}

std::vector<std::size_t> brute_force_knn(const Scene& scene, const std::array<double, 3>& q, std::size_t k) {
  std::vector<std::tuple<double, std::uint64_t, std::size_t>> all;
  for (std::size_t i = 0; i < scene.count(); ++i) {
    const auto& p = scene.positions[i];
    const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
    all.emplace_back(dx * dx + dy * dy + dz * dz, scene.row_ids[i], i);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(std::get<2>(all[i]));
  return out;
}

}  // namespace hyperviz::testing

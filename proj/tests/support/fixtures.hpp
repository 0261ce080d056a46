#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hyperviz/catalog.hpp"
#include "hyperviz/mapping.hpp"
#include "hyperviz/scene.hpp"

namespace hyperviz::testing {

using Rng = std::mt19937_64;

/// Numeric catalog with columns c0..c{n_cols-1}, values uniform in [0, 1).
/// Each cell is missing with probability `missing_rate`.
Catalog random_numeric_catalog(Rng& rng, std::size_t n_rows, std::size_t n_cols,
                               double missing_rate = 0.0);

/// Scene with uniformly random positions in the unit cube, random sizes in
/// [0.2, 1], row_ids = index unless `shuffle_row_ids`.
Scene random_scene(Rng& rng, std::size_t n, bool shuffle_row_ids = false);

/// Scene whose positions are snapped to a coarse lattice so that exact
/// coordinate ties and equal distances are common.
Scene lattice_scene(Rng& rng, std::size_t n, int lattice);

/// Mapping assigning c{i} to the i-th channel for every channel.
ChannelMapping all_channels_mapping();

/// Independent brute-force oracles.
std::optional<std::size_t> brute_force_pick(const Scene& scene, const std::array<double, 3>& origin,
                                            const std::array<double, 3>& dir, double radius);
std::vector<std::size_t> brute_force_knn(const Scene& scene, const std::array<double, 3>& q,
                                         std::size_t k);

}  // namespace hyperviz::testing

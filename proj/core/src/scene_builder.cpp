#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hyperviz/error.hpp"
#include "hyperviz/mapping.hpp"

namespace hyperviz {

// ---------------------------------------------------------------------------
// Scene

void Scene::reserve(std::size_t n) {
  positions.reserve(n);
  colors.reserve(n);
  sizes.reserve(n);
  shape_ids.reserve(n);
  orientations.reserve(n);
  row_ids.reserve(n);
}

void Scene::resize(std::size_t n) {
  positions.resize(n);
  colors.resize(n);
  sizes.resize(n);
  shape_ids.resize(n);
  orientations.resize(n);
  row_ids.resize(n);
}

void Scene::append_from(const Scene& src, std::size_t i) {
  positions.push_back(src.positions[i]);
  colors.push_back(src.colors[i]);
  sizes.push_back(src.sizes[i]);
  shape_ids.push_back(src.shape_ids[i]);
  orientations.push_back(src.orientations[i]);
  row_ids.push_back(src.row_ids[i]);
}

bool Scene::consistent() const noexcept {
  const std::size_t n = positions.size();
  return colors.size() == n && sizes.size() == n && shape_ids.size() == n &&
         orientations.size() == n && row_ids.size() == n;
}

// ---------------------------------------------------------------------------
// Shape encoding

std::vector<std::optional<std::uint8_t>> encode_shape(const Column& column, int n_bins,
                                                      const ChannelTransform& transform) {
  if (n_bins < 1 || n_bins > 256) {
    throw Error(ErrorCode::InvalidArgument, "n_bins must be in [1, 256]");
  }
  if (column.present_count() == 0) {
    throw Error(ErrorCode::AllMissing, "column '" + column.name() + "' has no present cells");
  }
  std::vector<std::optional<std::uint8_t>> ids(column.size());
  const auto bins = static_cast<std::size_t>(n_bins);

  if (column.is_numeric()) {
    const auto t = apply_transform(column, transform);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!t[i]) continue;
      const auto bin = static_cast<std::size_t>(std::floor(*t[i] * static_cast<double>(bins)));
      ids[i] = static_cast<std::uint8_t>(std::min(bin, bins - 1));
    }
    return ids;
  }

  const ColumnStats stats = column_stats(column);
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(stats.distinct_categories.size());
  for (std::size_t k = 0; k < stats.distinct_categories.size(); ++k) {
    index.emplace(stats.distinct_categories[k], k);
  }
  const auto labels = column.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    ids[i] = static_cast<std::uint8_t>(index.at(*labels[i]) % bins);
  }
  return ids;
}

// ---------------------------------------------------------------------------
// Scene construction

namespace {

// Normalized values of the column assigned to `channel`, or nullopt when the
// channel is unassigned. An all-missing column yields an all-missing vector.
std::optional<std::vector<std::optional<double>>> channel_values(const Catalog& catalog,
                                                                 const ChannelMapping& mapping,
                                                                 VisualChannel channel) {
  const auto& slot = mapping[channel];
  if (!slot) return std::nullopt;
  const Column& column = catalog.column(slot->column);
  if (column.present_count() == 0) {
    return std::vector<std::optional<double>>(column.size());
  }
  return apply_transform(column, slot->transform);
}

}  // namespace

Scene build_scene(const Catalog& catalog, const ChannelMapping& mapping,
                  const ChannelDefaults& defaults) {
  mapping.validate(catalog);
  const std::size_t n_rows = catalog.n_rows();

  // Positional channels decide which rows survive.
  std::array<std::optional<std::vector<std::optional<double>>>, 3> axes;
  for (std::size_t a = 0; a < 3; ++a) {
    axes[a] = channel_values(catalog, mapping, kAllChannels[a]);
  }
  std::vector<std::size_t> kept;
  kept.reserve(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    bool ok = true;
    for (const auto& axis : axes) {
      if (axis && !(*axis)[r]) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(r);
  }

  Scene scene;
  const std::size_t n = kept.size();
  scene.resize(n);
  scene.excluded_rows = n_rows - n;
  for (std::size_t i = 0; i < n; ++i) scene.row_ids[i] = kept[i];

  for (std::size_t a = 0; a < 3; ++a) {
    const auto& axis = axes[a];
    for (std::size_t i = 0; i < n; ++i) {
      scene.positions[i][a] = axis ? static_cast<float>(*(*axis)[kept[i]]) : 0.5f;
    }
  }
  for (auto& axis : axes) axis.reset();

  // Color and alpha share the RGBA bytes but come from independent channels.
  const std::uint8_t default_alpha = alpha_to_byte(defaults.alpha);
  if (auto color = channel_values(catalog, mapping, VisualChannel::color)) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& t = (*color)[kept[i]];
      if (t) {
        const auto rgb = hue_to_rgb(*t);
        scene.colors[i] = {rgb[0], rgb[1], rgb[2], default_alpha};
      } else {
        scene.colors[i] = defaults.color;
        scene.colors[i][3] = default_alpha;
      }
    }
  } else {
    for (auto& c : scene.colors) {
      c = defaults.color;
      c[3] = default_alpha;
    }
  }
  if (auto alpha = channel_values(catalog, mapping, VisualChannel::alpha)) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& t = (*alpha)[kept[i]];
      scene.colors[i][3] = t ? alpha_to_byte(alpha_from_unit(*t)) : default_alpha;
    }
  }

  if (auto size = channel_values(catalog, mapping, VisualChannel::size)) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& t = (*size)[kept[i]];
      scene.sizes[i] = t ? size_from_unit(*t) : defaults.size;
    }
  } else {
    std::fill(scene.sizes.begin(), scene.sizes.end(), defaults.size);
  }

  if (auto orientation = channel_values(catalog, mapping, VisualChannel::orientation)) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& t = (*orientation)[kept[i]];
      scene.orientations[i] = t ? orientation_from_unit(*t) : defaults.orientation;
    }
  } else {
    std::fill(scene.orientations.begin(), scene.orientations.end(), defaults.orientation);
  }

  std::fill(scene.shape_ids.begin(), scene.shape_ids.end(), defaults.shape);
  if (const auto& slot = mapping[VisualChannel::shape]) {
    const Column& column = catalog.column(slot->column);
    if (column.present_count() > 0) {
      const auto ids = encode_shape(column, 8, slot->transform);
      for (std::size_t i = 0; i < n; ++i) {
        if (const auto& id = ids[kept[i]]) scene.shape_ids[i] = *id;
      }
    }
  }
  return scene;
}

Scene remap(const Catalog& catalog, const ChannelMapping& new_mapping,
            const ChannelDefaults& defaults) {
  return build_scene(catalog, new_mapping, defaults);
}

}  // namespace hyperviz

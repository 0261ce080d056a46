#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hyperviz/error.hpp"
#include "hyperviz/mapping.hpp"

namespace hyperviz {

namespace {

std::vector<std::optional<double>> linear_normalize(std::span<const double> values,
                                                    double clip_lo, double clip_hi) {
  double lo = 0.0, hi = 0.0;
  if (clip_lo == 0.0 && clip_hi == 100.0) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (double v : values) {
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  } else {
    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (double v : values) {
      if (!std::isnan(v)) sorted.push_back(v);
    }
    std::sort(sorted.begin(), sorted.end());
    lo = percentile_of_sorted(sorted, clip_lo);
    hi = percentile_of_sorted(sorted, clip_hi);
  }

  std::vector<std::optional<double>> out(values.size());
  // Halving keeps v - lo finite for ranges wider than the double maximum.
  const double scale = std::isfinite(hi - lo) ? 1.0 : 0.5;
  const double span = hi * scale - lo * scale;
  const bool degenerate = !(span > 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v)) continue;
    out[i] = degenerate ? 0.5 : std::clamp((v * scale - lo * scale) / span, 0.0, 1.0);
  }
  return out;
}

std::vector<std::optional<double>> rank_normalize(std::span<const double> values) {
  std::vector<std::size_t> order;
  order.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isnan(values[i])) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<std::optional<double>> out(values.size());
  const std::size_t n = order.size();
  if (n == 1) {
    out[order.front()] = 0.5;
    return out;
  }
  const double denom = static_cast<double>(n - 1);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Tied block [i, j] shares the mean of its zero-based ranks.
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
    const double t = rank / denom;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = t;
    i = j + 1;
  }
  return out;
}

}  // namespace

double percentile_of_sorted(std::span<const double> sorted, double percent) {
  if (sorted.empty()) throw Error(ErrorCode::AllMissing, "percentile of an empty sequence");
  if (percent <= 0.0) return sorted.front();
  if (percent >= 100.0) return sorted.back();
  const double pos = percent / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(pos));
  const std::size_t above = std::min(below + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return sorted[below] + frac * (sorted[above] - sorted[below]);
}

std::vector<std::optional<double>> apply_transform(const Column& column,
                                                   const ChannelTransform& transform) {
  transform.validate();
  if (!column.is_numeric()) {
    throw Error(ErrorCode::KindMismatch,
                "column '" + column.name() + "' is categorical; transforms need numbers");
  }
  if (column.present_count() == 0) {
    throw Error(ErrorCode::AllMissing, "column '" + column.name() + "' has no present cells");
  }

  const auto values = column.numbers();
  switch (transform.kind) {
    case TransformKind::linear:
      return linear_normalize(values, transform.clip_lo, transform.clip_hi);
    case TransformKind::log: {
      std::vector<double> logs(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (std::isnan(v)) {
          logs[i] = v;
          continue;
        }
        if (!(v > 0.0)) {
          throw Error(ErrorCode::NonPositiveForLog,
                      "column '" + column.name() + "' has non-positive value at row " +
                          std::to_string(i),
                      i);
        }
        logs[i] = std::log10(v);
      }
      return linear_normalize(logs, transform.clip_lo, transform.clip_hi);
    }
    case TransformKind::rank:
      return rank_normalize(values);
  }
  return {};
}

}  // namespace hyperviz

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hyperviz/mapping.hpp"

namespace hyperviz {

std::array<std::uint8_t, 3> hue_to_rgb(double t) noexcept {
  if (std::isnan(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double hue = 240.0 * (1.0 - t);
  const double sector = hue / 60.0;
  const double x = 1.0 - std::abs(std::fmod(sector, 2.0) - 1.0);
  double r = 0.0, g = 0.0, b = 0.0;
  if (sector < 1.0) {
    r = 1.0, g = x;
  } else if (sector < 2.0) {
    r = x, g = 1.0;
  } else if (sector < 3.0) {
    g = 1.0, b = x;
  } else if (sector < 4.0) {
    g = x, b = 1.0;
  } else if (sector < 5.0) {
    r = x, b = 1.0;
  } else {
    r = 1.0, b = x;
  }
  auto to_byte = [](double v) { return static_cast<std::uint8_t>(std::lround(v * 255.0)); };
  return {to_byte(r), to_byte(g), to_byte(b)};
}

float size_from_unit(double t) noexcept { return static_cast<float>(0.2 + 0.8 * t); }

float alpha_from_unit(double t) noexcept { return static_cast<float>(0.1 + 0.9 * t); }

float orientation_from_unit(double t) noexcept {
  // float(2 pi) rounds above the real 2 pi; the largest float below it is
  // the top of the half-open range.
  static const float kMaxOrientation =
      std::nextafter(static_cast<float>(2.0 * std::numbers::pi), 0.0f);
  const float o = static_cast<float>(2.0 * std::numbers::pi * t);
  return std::min(o, kMaxOrientation);
}

std::uint8_t alpha_to_byte(float alpha) noexcept {
  return static_cast<std::uint8_t>(std::lround(std::clamp(alpha, 0.0f, 1.0f) * 255.0f));
}

}  // namespace hyperviz

#pragma once

// Procedural test images: a colour gradient background with a few filled
// ellipses and rectangles and mild sensor-like noise. Deterministic in seed.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "i2e/image.hpp"
#include "i2e/random.hpp"

namespace i2e::synthetic {

inline RgbImage scene(int height, int width, std::uint64_t seed) {
  Rng rng(seed);
  auto unit = [&] { return uniform_unit(rng); };
  RgbImage img(height, width);

  double c0[3], c1[3];
  for (int c = 0; c < 3; ++c) {
    c0[c] = 40 + 180 * unit();
    c1[c] = 40 + 180 * unit();
  }
  const double angle = 2.0 * 3.141592653589793 * unit();
  const double ux = std::cos(angle), uy = std::sin(angle);
  const double diag = std::abs(ux) * width + std::abs(uy) * height;

  struct Shape {
    bool ellipse;
    double cy, cx, ry, rx;
    double colour[3];
  };
  const int shapes = 2 + static_cast<int>(uniform_index(rng, 5));
  Shape s[8];
  for (int k = 0; k < shapes; ++k) {
    s[k].ellipse = unit() < 0.5;
    s[k].cy = unit() * height;
    s[k].cx = unit() * width;
    s[k].ry = (0.08 + 0.3 * unit()) * height;
    s[k].rx = (0.08 + 0.3 * unit()) * width;
    for (int c = 0; c < 3; ++c) s[k].colour[c] = 255 * unit();
  }
  const double noise = 2.0 + 6.0 * unit();

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double proj = (ux * x + uy * y) / (diag > 0 ? diag : 1.0);
      proj = proj - std::floor(proj);
      double px[3];
      for (int c = 0; c < 3; ++c) px[c] = c0[c] + (c1[c] - c0[c]) * proj;
      for (int k = 0; k < shapes; ++k) {
        const double dy = (y - s[k].cy) / s[k].ry, dx = (x - s[k].cx) / s[k].rx;
        const bool inside = s[k].ellipse ? dy * dy + dx * dx <= 1.0 : std::abs(dy) <= 1.0 && std::abs(dx) <= 1.0;
        if (inside)
          for (int c = 0; c < 3; ++c) px[c] = s[k].colour[c];
      }
      for (int c = 0; c < 3; ++c) {
        const double v = px[c] + noise * (unit() + unit() + unit() - 1.5);
        img.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return img;
}

/// Uniformly random samples in [0, max_value].
inline RgbImage noise(int height, int width, std::uint64_t seed, int max_value = 255) {
  Rng rng(seed);
  RgbImage img(height, width);
  for (auto& v : img.samples()) v = static_cast<std::uint8_t>(uniform_index(rng, static_cast<std::uint64_t>(max_value) + 1));
  return img;
}

inline RgbImage constant(int height, int width, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbImage img(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) img.set(y, x, r, g, b);
  return img;
}

}  // namespace i2e::synthetic

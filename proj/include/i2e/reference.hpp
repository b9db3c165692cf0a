#pragma once

// Naive translate-and-subtract implementation of the conversion. Every
// direction materializes two shifted copies of the value map and subtracts
// them; no padded buffer, no fused thresholding. It is the equivalence oracle
// for the fast path and the baseline in `bench`.

#include <cstdint>
#include <vector>

#include "i2e/convert.hpp"

namespace i2e::reference {

inline int sample(const IntensityMap& v, int y, int x, Padding padding) {
  if (y >= 0 && y < v.height() && x >= 0 && x < v.width()) return v(y, x);
  if (padding == Padding::zero) return 0;
  y = y < 0 ? 0 : (y >= v.height() ? v.height() - 1 : y);
  x = x < 0 ? 0 : (x >= v.width() ? v.width() - 1 : x);
  return v(y, x);
}

/// The map seen from grid cell (row, col): out(y, x) = V(y + row - 1, x + col - 1).
inline Plane<int> translate(const IntensityMap& v, int row, int col, Padding padding) {
  Plane<int> out(v.height(), v.width());
  for (int y = 0; y < v.height(); ++y)
    for (int x = 0; x < v.width(); ++x) out(y, x) = sample(v, y + row - 1, x + col - 1, padding);
  return out;
}

inline IntensityMap value_map(const RgbImage& img) {
  IntensityMap v(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int m = img.at(y, x, 0);
      if (img.at(y, x, 1) > m) m = img.at(y, x, 1);
      if (img.at(y, x, 2) > m) m = img.at(y, x, 2);
      v(y, x) = static_cast<std::uint8_t>(m);
    }
  }
  return v;
}

inline Plane<int> difference(const IntensityMap& v, const MotionKernel& k, Padding padding) {
  const auto plus = translate(v, k.pair().to.row(), k.pair().to.col(), padding);
  const auto minus = translate(v, k.pair().from.row(), k.pair().from.col(), padding);
  Plane<int> out(v.height(), v.width());
  for (int y = 0; y < v.height(); ++y)
    for (int x = 0; x < v.width(); ++x) out(y, x) = plus(y, x) - minus(y, x);
  return out;
}

inline double threshold(const IntensityMap& v, double s_th0) {
  int lo = 255, hi = 0;
  for (int y = 0; y < v.height(); ++y) {
    for (int x = 0; x < v.width(); ++x) {
      if (v(y, x) < lo) lo = v(y, x);
      if (v(y, x) > hi) hi = v(y, x);
    }
  }
  return s_th0 * static_cast<double>(hi - lo);
}

/// Full conversion through explicit shifts and a real-valued threshold test.
inline EventVolume convert(const RgbImage& img, const ConversionConfig& cfg) {
  cfg.validate();
  require_kernel_support(img.height(), img.width());
  const IntensityMap v = value_map(img);
  const MotionKernelSet kernels = kernels_for(cfg);
  const double s_th = threshold(v, cfg.s_th0);
  std::vector<std::uint8_t> dirs;
  for (int s = 0; s < cfg.timesteps; ++s) dirs.push_back(static_cast<std::uint8_t>(cfg.order[s]));
  EventVolume out(cfg.timesteps, v.height(), v.width(), dirs);
  for (int s = 0; s < cfg.timesteps; ++s) {
    const auto dv = difference(v, kernels[cfg.order[s]], cfg.padding);
    for (int y = 0; y < v.height(); ++y) {
      for (int x = 0; x < v.width(); ++x) {
        const double d = dv(y, x);
        if (d > s_th) out.at(s, 0, y, x) = 1;
        if (-d > s_th) out.at(s, 1, y, x) = 1;
      }
    }
  }
  return out;
}

}  // namespace i2e::reference

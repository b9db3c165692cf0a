#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "i2e/events.hpp"
#include "i2e/hash.hpp"
#include "i2e/image.hpp"
#include "i2e/kernels.hpp"
#include "i2e/parallel.hpp"

namespace i2e {

/// Border handling for the 3x3 differencing. `zero` is a literal one-pixel
/// zero pad; `replicate` clamps to the nearest edge pixel.
enum class Padding : std::uint8_t { zero, replicate };

/// `canonical` uses the fixed kernel table; `random` draws one equivalent
/// pair per direction from the seed (training-time augmentation).
enum class KernelMode : std::uint8_t { canonical, random };

struct ConversionConfig {
  double s_th0 = 0.12;
  int timesteps = kDirections;
  TimestepOrder order = TimestepOrder::best();
  Padding padding = Padding::replicate;
  KernelMode augment = KernelMode::canonical;
  std::uint64_t seed = 2024;

  void validate() const {
    if (!(s_th0 > 0.0) || !std::isfinite(s_th0)) {
      throw std::invalid_argument("s_th0 must be a positive finite number");
    }
    if (timesteps < 1 || timesteps > kDirections) {
      throw std::invalid_argument("timesteps must be in 1..8");
    }
  }
};

/// Intensity changes for all eight directions, in direction order a..h.
/// Values lie in -255..255.
class DeltaVolume {
 public:
  DeltaVolume(int height, int width) {
    for (auto& p : planes_) p = Plane<std::int16_t>(height, width);
  }

  int height() const noexcept { return planes_[0].height(); }
  int width() const noexcept { return planes_[0].width(); }

  Plane<std::int16_t>& operator[](int direction) noexcept {
    return planes_[static_cast<std::size_t>(direction)];
  }
  const Plane<std::int16_t>& operator[](int direction) const noexcept {
    return planes_[static_cast<std::size_t>(direction)];
  }

  friend bool operator==(const DeltaVolume&, const DeltaVolume&) = default;

 private:
  std::array<Plane<std::int16_t>, kDirections> planes_;
};

inline void require_kernel_support(int height, int width) {
  if (height < 3 || width < 3) {
    throw std::invalid_argument("image must be at least 3x3, got " + std::to_string(height) + "x" +
                                std::to_string(width));
  }
}

/// Per-pixel max(R, G, B).
inline IntensityMap rgb_to_value(const RgbImage& img) {
  require_kernel_support(img.height(), img.width());
  IntensityMap v(img.height(), img.width());
  const std::uint8_t* src = img.samples().data();
  std::uint8_t* dst = v.values().data();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = std::max({src[3 * i], src[3 * i + 1], src[3 * i + 2]});
  }
  return v;
}

namespace detail {

/// (H+2) x (W+2) copy of `v` with a one-pixel border.
inline Plane<std::uint8_t> pad_one(const IntensityMap& v, Padding padding) {
  const int h = v.height(), w = v.width();
  Plane<std::uint8_t> out(h + 2, w + 2, 0);
  for (int y = 0; y < h; ++y) {
    std::copy_n(v.row(y), w, out.row(y + 1) + 1);
  }
  if (padding == Padding::replicate) {
    for (int y = 1; y <= h; ++y) {
      out(y, 0) = out(y, 1);
      out(y, w + 1) = out(y, w);
    }
    std::copy_n(out.row(1), w + 2, out.row(0));
    std::copy_n(out.row(h), w + 2, out.row(h + 1));
  }
  return out;
}

/// Largest integer k with (dv > k) <=> (dv > s_th) for every integer dv.
inline int integer_cutoff(double s_th) noexcept {
  if (s_th >= 512.0) return 511;
  return static_cast<int>(std::floor(s_th));
}

// Writes ON/OFF planes for one direction straight from the padded map.
inline void fire_direction(const Plane<std::uint8_t>& padded, const MotionKernel& k, int cutoff,
                           std::uint8_t* on, std::uint8_t* off) {
  const int h = padded.height() - 2, w = padded.width() - 2;
  const auto& pr = k.pair();
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* plus = padded.row(y + pr.to.row()) + pr.to.col();
    const std::uint8_t* minus = padded.row(y + pr.from.row()) + pr.from.col();
    std::uint8_t* on_row = on + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
    std::uint8_t* off_row = off + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
    for (int x = 0; x < w; ++x) {
      const int dv = static_cast<int>(plus[x]) - static_cast<int>(minus[x]);
      on_row[x] = static_cast<std::uint8_t>(dv > cutoff);
      off_row[x] = static_cast<std::uint8_t>(-dv > cutoff);
    }
  }
}

}  // namespace detail

/// Correlates `v` with each kernel (no kernel flip): plane d at (y, x) is
/// V(y + to.row - 1, x + to.col - 1) - V(y + from.row - 1, x + from.col - 1)
/// on the padded map.
inline DeltaVolume delta_v(const IntensityMap& v, const MotionKernelSet& kernels,
                           Padding padding = Padding::replicate) {
  require_kernel_support(v.height(), v.width());
  const auto padded = detail::pad_one(v, padding);
  DeltaVolume dv(v.height(), v.width());
  for (int d = 0; d < kDirections; ++d) {
    const auto& pr = kernels[d].pair();
    auto& out = dv[d];
    for (int y = 0; y < v.height(); ++y) {
      const std::uint8_t* plus = padded.row(y + pr.to.row()) + pr.to.col();
      const std::uint8_t* minus = padded.row(y + pr.from.row()) + pr.from.col();
      std::int16_t* row = out.row(y);
      for (int x = 0; x < v.width(); ++x) {
        row[x] = static_cast<std::int16_t>(static_cast<int>(plus[x]) - static_cast<int>(minus[x]));
      }
    }
  }
  return dv;
}

/// S_th = s_th0 * (max(V) - min(V)).
inline double dynamic_threshold(const IntensityMap& v, double s_th0) {
  if (!(s_th0 > 0.0)) throw std::invalid_argument("s_th0 must be positive");
  if (v.size() == 0) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.values().begin(), v.values().end());
  return s_th0 * static_cast<double>(*hi - *lo);
}

/// ON where dv > s_th, OFF where -dv > s_th. Output has eight timesteps in
/// direction order a..h.
inline EventVolume fire(const DeltaVolume& dv, double s_th) {
  if (!(s_th >= 0.0)) throw std::invalid_argument("threshold must be non-negative");
  const int cutoff = detail::integer_cutoff(s_th);
  EventVolume vol(kDirections, dv.height(), dv.width());
  for (int d = 0; d < kDirections; ++d) {
    const auto src = dv[d].values();
    std::uint8_t* on = vol.plane(d, 0);
    std::uint8_t* off = vol.plane(d, 1);
    for (std::size_t i = 0; i < src.size(); ++i) {
      on[i] = static_cast<std::uint8_t>(src[i] > cutoff);
      off[i] = static_cast<std::uint8_t>(-src[i] > cutoff);
    }
  }
  return vol;
}

/// Picks timesteps in presentation order and keeps the first `timesteps`.
/// `vol` must hold all eight directions.
inline EventVolume reorder(const EventVolume& vol, const TimestepOrder& order, int timesteps) {
  if (vol.timesteps() != kDirections) throw std::invalid_argument("reorder: need all 8 directions");
  if (timesteps < 0 || timesteps > kDirections) throw std::invalid_argument("reorder: bad timesteps");
  std::vector<std::uint8_t> dirs;
  for (int s = 0; s < timesteps; ++s) dirs.push_back(static_cast<std::uint8_t>(vol.directions()[static_cast<std::size_t>(order[s])]));
  EventVolume out(timesteps, vol.height(), vol.width(), dirs);
  for (int s = 0; s < timesteps; ++s) {
    for (int p = 0; p < kPolarities; ++p) {
      std::copy_n(vol.plane(order[s], p), vol.plane_size(), out.plane(s, p));
    }
  }
  return out;
}

inline MotionKernelSet kernels_for(const ConversionConfig& cfg) {
  return cfg.augment == KernelMode::random ? sample_kernel_set(cfg.seed) : build_canonical_kernels();
}

/// Value map, differencing, dynamic threshold, firing, then ordering and
/// truncation, computed in one pass per output timestep.
inline EventVolume convert(const RgbImage& img, const ConversionConfig& cfg) {
  cfg.validate();
  const IntensityMap v = rgb_to_value(img);
  const MotionKernelSet kernels = kernels_for(cfg);
  const int cutoff = detail::integer_cutoff(dynamic_threshold(v, cfg.s_th0));
  const auto padded = detail::pad_one(v, cfg.padding);

  std::vector<std::uint8_t> dirs;
  for (int s = 0; s < cfg.timesteps; ++s) dirs.push_back(static_cast<std::uint8_t>(cfg.order[s]));
  EventVolume out(cfg.timesteps, v.height(), v.width(), std::move(dirs));
  for (int s = 0; s < cfg.timesteps; ++s) {
    detail::fire_direction(padded, kernels[cfg.order[s]], cutoff, out.plane(s, 0), out.plane(s, 1));
  }
  return out;
}

/// Seed used for image `index` of a batch converted under `cfg`.
inline std::uint64_t batch_item_seed(const ConversionConfig& cfg, std::size_t index) noexcept {
  return derive_seed(cfg.seed, index);
}

/// Converts every image with its own threshold and, in random mode, its own
/// kernel seed derived from (cfg.seed, index). Output does not depend on
/// `workers`.
inline std::vector<EventVolume> convert_batch(std::span<const RgbImage> imgs,
                                              const ConversionConfig& cfg, unsigned workers = 1) {
  cfg.validate();
  for (const auto& img : imgs) {
    if (img.height() != imgs[0].height() || img.width() != imgs[0].width()) {
      throw std::invalid_argument("convert_batch: all images must have the same dimensions");
    }
  }
  std::vector<EventVolume> out(imgs.size());
  parallel_for(imgs.size(), workers, [&](std::size_t i) {
    ConversionConfig item = cfg;
    item.seed = batch_item_seed(cfg, i);
    out[i] = convert(imgs[i], item);
  });
  return out;
}

}  // namespace i2e

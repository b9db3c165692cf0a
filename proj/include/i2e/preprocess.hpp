#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "i2e/image.hpp"
#include "i2e/random.hpp"

namespace i2e {

namespace detail {

// Source taps and weights for one output coordinate, as exact fractions of
// `den`: out = src[i0] * (den - frac) + src[i1] * frac.
struct Taps {
  int i0 = 0;
  int i1 = 0;
  std::int64_t frac = 0;
};

inline Taps bilinear_taps(int dst, int dst_size, int src_size) {
  // Half-pixel centres: s = (dst + 0.5) * src_size / dst_size - 0.5.
  const std::int64_t den = 2 * static_cast<std::int64_t>(dst_size);
  const std::int64_t num = (2 * static_cast<std::int64_t>(dst) + 1) * src_size - dst_size;
  Taps t;
  if (num <= 0) return t;
  t.i0 = static_cast<int>(num / den);
  t.frac = num % den;
  if (t.i0 >= src_size - 1) {
    t.i0 = t.i1 = src_size - 1;
    t.frac = 0;
    return t;
  }
  t.i1 = t.i0 + 1;
  return t;
}

}  // namespace detail

/// Bilinear resize with half-pixel centres and edge clamping. Weights are
/// exact rationals and the result is rounded half away from zero, so output
/// is identical on every platform.
inline RgbImage resize_bilinear(const RgbImage& src, int height, int width) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("resize: target size must be positive");
  if (src.empty()) throw std::invalid_argument("resize: empty source image");
  RgbImage out(height, width);
  const std::int64_t den_x = 2 * static_cast<std::int64_t>(width);
  const std::int64_t den_y = 2 * static_cast<std::int64_t>(height);
  const std::int64_t den = den_x * den_y;
  std::vector<detail::Taps> xs(static_cast<std::size_t>(width));
  for (int x = 0; x < width; ++x) xs[static_cast<std::size_t>(x)] = detail::bilinear_taps(x, width, src.width());
  for (int y = 0; y < height; ++y) {
    const auto ty = detail::bilinear_taps(y, height, src.height());
    const std::int64_t wy1 = ty.frac, wy0 = den_y - ty.frac;
    for (int x = 0; x < width; ++x) {
      const auto& tx = xs[static_cast<std::size_t>(x)];
      const std::int64_t wx1 = tx.frac, wx0 = den_x - tx.frac;
      for (int c = 0; c < RgbImage::kChannels; ++c) {
        const std::int64_t acc = wy0 * (wx0 * src.at(ty.i0, tx.i0, c) + wx1 * src.at(ty.i0, tx.i1, c)) +
                                 wy1 * (wx0 * src.at(ty.i1, tx.i0, c) + wx1 * src.at(ty.i1, tx.i1, c));
        out.at(y, x, c) = static_cast<std::uint8_t>((acc + den / 2) / den);
      }
    }
  }
  return out;
}

inline RgbImage flip_horizontal(const RgbImage& src) {
  RgbImage out(src.height(), src.width());
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x)
      for (int c = 0; c < RgbImage::kChannels; ++c) out.at(y, src.width() - 1 - x, c) = src.at(y, x, c);
  return out;
}

/// Crop of the image zero-padded by `pad` on every side, starting at
/// (offset_y, offset_x) in padded coordinates, same size as the source.
inline RgbImage padded_crop(const RgbImage& src, int pad, int offset_y, int offset_x) {
  if (pad < 0 || offset_y < 0 || offset_x < 0 || offset_y > 2 * pad || offset_x > 2 * pad) {
    throw std::invalid_argument("padded_crop: offset outside the padded image");
  }
  RgbImage out(src.height(), src.width(), 0);
  for (int y = 0; y < src.height(); ++y) {
    const int sy = y + offset_y - pad;
    if (sy < 0 || sy >= src.height()) continue;
    for (int x = 0; x < src.width(); ++x) {
      const int sx = x + offset_x - pad;
      if (sx < 0 || sx >= src.width()) continue;
      for (int c = 0; c < RgbImage::kChannels; ++c) out.at(y, x, c) = src.at(sy, sx, c);
    }
  }
  return out;
}

struct PreprocessConfig {
  /// Square output side.
  int size = 224;
  /// Probability of a horizontal mirror; 0 disables.
  double flip_prob = 0.0;
  /// Zero padding for random crops; 0 disables.
  int crop_pad = 0;

  bool augments() const noexcept { return flip_prob > 0.0 || crop_pad > 0; }

  void validate() const {
    if (size < 3) throw std::invalid_argument("target size must be at least 3");
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw std::invalid_argument("flip probability must be in [0, 1]");
    if (crop_pad < 0) throw std::invalid_argument("crop padding must be non-negative");
  }
};

/// Resize to size x size, then random crop, then random flip, both driven by
/// `seed`. With augmentation disabled this is just the resize.
inline RgbImage preprocess(const RgbImage& img, const PreprocessConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  RgbImage out = resize_bilinear(img, cfg.size, cfg.size);
  if (!cfg.augments()) return out;
  Rng rng(seed);
  if (cfg.crop_pad > 0) {
    const auto span = static_cast<std::uint64_t>(2 * cfg.crop_pad + 1);
    const int oy = static_cast<int>(uniform_index(rng, span));
    const int ox = static_cast<int>(uniform_index(rng, span));
    out = padded_crop(out, cfg.crop_pad, oy, ox);
  }
  if (cfg.flip_prob > 0.0 && uniform_unit(rng) < cfg.flip_prob) out = flip_horizontal(out);
  return out;
}

}  // namespace i2e

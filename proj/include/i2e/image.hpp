#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace i2e {

/// Row-major single-channel 2D buffer.
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;
  Plane(int height, int width, T fill = T{})
      : height_(height), width_(width) {
    if (height < 0 || width < 0) throw std::invalid_argument("Plane: negative size");
    data_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int y, int x) noexcept { return data_[index(y, x)]; }
  const T& operator()(int y, int x) const noexcept { return data_[index(y, x)]; }

  T* row(int y) noexcept { return data_.data() + index(y, 0); }
  const T* row(int y) const noexcept { return data_.data() + index(y, 0); }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t index(int y, int x) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

/// Per-pixel intensity (the HSV value channel), 0..255.
using IntensityMap = Plane<std::uint8_t>;

/// 8-bit RGB image, interleaved (HWC) samples in R, G, B order.
class RgbImage {
 public:
  static constexpr int kChannels = 3;

  RgbImage() = default;
  RgbImage(int height, int width, std::uint8_t fill = 0)
      : height_(height), width_(width) {
    if (height < 0 || width < 0) throw std::invalid_argument("RgbImage: negative size");
    pixels_.assign(sample_count(), fill);
  }
  RgbImage(int height, int width, std::vector<std::uint8_t> interleaved)
      : height_(height), width_(width), pixels_(std::move(interleaved)) {
    if (height < 0 || width < 0) throw std::invalid_argument("RgbImage: negative size");
    if (pixels_.size() != sample_count()) {
      throw std::invalid_argument("RgbImage: expected " + std::to_string(sample_count()) +
                                  " samples, got " + std::to_string(pixels_.size()));
    }
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t& at(int y, int x, int c) noexcept { return pixels_[offset(y, x) + c]; }
  std::uint8_t at(int y, int x, int c) const noexcept { return pixels_[offset(y, x) + c]; }

  void set(int y, int x, std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    auto* p = pixels_.data() + offset(y, x);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }

  std::span<std::uint8_t> samples() noexcept { return pixels_; }
  std::span<const std::uint8_t> samples() const noexcept { return pixels_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t sample_count() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_) * kChannels;
  }
  std::size_t offset(int y, int x) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
           kChannels;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> pixels_;
};

}  // namespace i2e

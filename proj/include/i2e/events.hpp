#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "i2e/kernels.hpp"

namespace i2e {

enum class Polarity : std::uint8_t { on = 0, off = 1 };

inline constexpr int kPolarities = 2;

/// Dense binary event tensor, shape [T, 2, H, W], one byte (0 or 1) per cell.
/// Each timestep also records which motion direction (0..7 for a..h) produced
/// it, so reordered or truncated volumes stay self-describing.
class EventVolume {
 public:
  EventVolume() = default;

  /// Directions default to a, b, c, ... in order.
  EventVolume(int timesteps, int height, int width) : EventVolume(timesteps, height, width, {}) {}

  EventVolume(int timesteps, int height, int width, std::vector<std::uint8_t> directions)
      : timesteps_(timesteps), height_(height), width_(width), directions_(std::move(directions)) {
    if (timesteps < 0 || timesteps > kDirections) {
      throw std::invalid_argument("EventVolume: timesteps must be in 0..8");
    }
    if (height < 0 || width < 0) throw std::invalid_argument("EventVolume: negative size");
    if (directions_.empty()) {
      for (int t = 0; t < timesteps; ++t) directions_.push_back(static_cast<std::uint8_t>(t));
    }
    if (directions_.size() != static_cast<std::size_t>(timesteps)) {
      throw std::invalid_argument("EventVolume: need one direction per timestep");
    }
    for (auto d : directions_) {
      if (d >= kDirections) throw std::invalid_argument("EventVolume: direction out of range");
    }
    bits_.assign(total(), 0);
  }

  int timesteps() const noexcept { return timesteps_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  /// T * 2 * H * W.
  std::size_t total() const noexcept {
    return static_cast<std::size_t>(timesteps_) * kPolarities * plane_size();
  }

  const std::vector<std::uint8_t>& directions() const noexcept { return directions_; }

  std::uint8_t* plane(int t, int p) noexcept { return bits_.data() + plane_offset(t, p); }
  const std::uint8_t* plane(int t, int p) const noexcept { return bits_.data() + plane_offset(t, p); }

  std::uint8_t& at(int t, int p, int y, int x) noexcept {
    return plane(t, p)[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                       static_cast<std::size_t>(x)];
  }
  std::uint8_t at(int t, int p, int y, int x) const noexcept {
    return plane(t, p)[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                       static_cast<std::size_t>(x)];
  }

  std::span<std::uint8_t> bits() noexcept { return bits_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  /// Number of set cells.
  std::size_t count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  friend bool operator==(const EventVolume&, const EventVolume&) = default;

 private:
  std::size_t plane_offset(int t, int p) const noexcept {
    return (static_cast<std::size_t>(t) * kPolarities + static_cast<std::size_t>(p)) * plane_size();
  }

  int timesteps_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> directions_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace i2e

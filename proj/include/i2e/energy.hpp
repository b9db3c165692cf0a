#pragma once

// First-layer energy estimates for a conventional (MAC) convolution, a
// spiking (AC) convolution driven by event input, and the event encoder
// itself.

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace i2e::energy {

inline constexpr double kPicojoule = 1e-12;

/// Convolution layer geometry.
struct LayerSpec {
  std::uint64_t kernel = 7;
  std::uint64_t c_in = 3;
  std::uint64_t c_out = 64;
  std::uint64_t h_out = 112;
  std::uint64_t w_out = 112;
};

/// Per-operation costs (joules) and spiking activity.
struct EnergyModel {
  double e_mac = 4.6 * kPicojoule;
  double e_ac = 0.9 * kPicojoule;
  double firing_rate = 0.05;
  std::uint64_t timesteps = 8;

  void validate() const {
    if (!(e_mac > 0.0) || !(e_ac > 0.0)) throw std::invalid_argument("operation energies must be positive");
    if (!(firing_rate >= 0.0 && firing_rate <= 1.0)) throw std::invalid_argument("firing rate must be in [0, 1]");
  }
};

namespace detail {
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw std::overflow_error("operation count overflows 64 bits");
  }
  return a * b;
}
}  // namespace detail

/// K^2 * C_in * C_out * H_out * W_out.
inline std::uint64_t n_ops(const LayerSpec& s) {
  if (s.kernel == 0 || s.c_in == 0 || s.c_out == 0 || s.h_out == 0 || s.w_out == 0) {
    throw std::invalid_argument("layer dimensions must be positive");
  }
  using detail::checked_mul;
  return checked_mul(checked_mul(checked_mul(checked_mul(checked_mul(s.kernel, s.kernel), s.c_in), s.c_out),
                                 s.h_out),
                     s.w_out);
}

/// N_ops * E_mac.
inline double energy_ann(const LayerSpec& s, const EnergyModel& m) {
  m.validate();
  return static_cast<double>(n_ops(s)) * m.e_mac;
}

/// N_ops * fr * T * E_ac.
inline double energy_snn(const LayerSpec& s, const EnergyModel& m) {
  m.validate();
  return static_cast<double>(n_ops(s)) * m.firing_rate * static_cast<double>(m.timesteps) * m.e_ac;
}

/// The encoder as a 1x1, one-in, T-out convolution at full resolution:
/// (1 * 1 * T * H * W) * E_ac.
inline double energy_i2e(std::uint64_t timesteps, std::uint64_t height, std::uint64_t width,
                         const EnergyModel& m) {
  m.validate();
  const auto ops = detail::checked_mul(detail::checked_mul(timesteps, height), width);
  return static_cast<double>(ops) * m.e_ac;
}

/// Side-by-side first-layer comparison.
struct FirstLayerComparison {
  std::uint64_t ann_ops = 0;
  std::uint64_t snn_ops = 0;
  double ann = 0.0;      // conventional layer on RGB input
  double snn = 0.0;      // spiking layer on the event input
  double encoder = 0.0;  // event conversion
  /// snn + encoder.
  double total() const noexcept { return snn + encoder; }
  /// ann / snn, encoder excluded.
  double reduction_snn_only() const noexcept { return ann / snn; }
  /// ann / (snn + encoder).
  double reduction() const noexcept { return ann / total(); }
};

/// `ann_layer` sees the RGB image; the spiking layer is the same layer with
/// C_in = `event_channels`; the encoder runs at `input_h` x `input_w`.
inline FirstLayerComparison compare_first_layer(const LayerSpec& ann_layer, const EnergyModel& m,
                                                std::uint64_t input_h, std::uint64_t input_w,
                                                std::uint64_t event_channels = 2) {
  LayerSpec snn_layer = ann_layer;
  snn_layer.c_in = event_channels;
  FirstLayerComparison c;
  c.ann_ops = n_ops(ann_layer);
  c.snn_ops = n_ops(snn_layer);
  c.ann = energy_ann(ann_layer, m);
  c.snn = energy_snn(snn_layer, m);
  c.encoder = energy_i2e(m.timesteps, input_h, input_w, m);
  return c;
}

}  // namespace i2e::energy

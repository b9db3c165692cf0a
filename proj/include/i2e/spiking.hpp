#pragma once

// Leaky integrate-and-fire neurons with an arctan surrogate gradient, enough
// to check that converted event streams drive a trainable spiking layer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "i2e/events.hpp"
#include "i2e/random.hpp"

namespace i2e::spiking {

struct LifParams {
  double tau = 2.0;
  double v_th = 1.0;
  double v_reset = 0.0;

  void validate() const {
    if (!(tau >= 1.0)) throw std::invalid_argument("tau must be >= 1");
  }
};

struct LifState {
  double v = 0.0;
};

/// H = V - (V - V_reset) / tau + X.
inline double charge(double v, double x, const LifParams& p) noexcept {
  return v - (v - p.v_reset) / p.tau + x;
}

struct StepResult {
  bool spike = false;
  double h = 0.0;  // pre-reset potential
  LifState state;
};

/// One timestep: charge, fire on H > V_th (strict), hard reset to V_reset.
inline StepResult lif_step(LifState s, double x, const LifParams& p) noexcept {
  StepResult r;
  r.h = charge(s.v, x, p);
  r.spike = r.h - p.v_th > 0.0;
  r.state.v = r.spike ? p.v_reset : r.h;
  return r;
}

/// g(x) = atan(pi/2 * alpha * x) / pi + 1/2, g'(x) = 2 alpha / (4 + (pi alpha x)^2).
struct ArctanSurrogate {
  double alpha = 2.0;

  double value(double x) const noexcept {
    return std::atan(std::numbers::pi / 2.0 * alpha * x) / std::numbers::pi + 0.5;
  }
  double grad(double x) const noexcept {
    const double u = std::numbers::pi * alpha * x;
    return 2.0 * alpha / (4.0 + u * u);
  }
};

struct SequenceGrad {
  std::vector<std::uint8_t> spikes;
  std::vector<double> charges;     // H[t]
  std::vector<double> input_grad;  // dL/dX[t]
};

/// Runs one neuron over `inputs` and backpropagates `spike_grads` (dL/dS[t])
/// through time. The Heaviside derivative is replaced by g'(H - V_th) and the
/// reset is detached: dV[t]/dH[t] = 1 - S[t], with no path through S[t].
inline SequenceGrad lif_sequence_grad(std::span<const double> inputs, std::span<const double> spike_grads,
                                      const LifParams& p = {}, const ArctanSurrogate& sg = {},
                                      double v0 = 0.0) {
  p.validate();
  if (inputs.size() != spike_grads.size()) throw std::invalid_argument("need one gradient per timestep");
  const std::size_t steps = inputs.size();
  SequenceGrad out;
  out.spikes.resize(steps);
  out.charges.resize(steps);
  out.input_grad.resize(steps);
  LifState s{v0};
  for (std::size_t t = 0; t < steps; ++t) {
    const auto r = lif_step(s, inputs[t], p);
    out.spikes[t] = r.spike;
    out.charges[t] = r.h;
    s = r.state;
  }
  double dv = 0.0;  // dL/dV[t]
  const double leak = 1.0 - 1.0 / p.tau;
  for (std::size_t t = steps; t-- > 0;) {
    const double dh = spike_grads[t] * sg.grad(out.charges[t] - p.v_th) + dv * (1.0 - out.spikes[t]);
    out.input_grad[t] = dh;
    dv = dh * leak;
  }
  return out;
}

/// A fully connected LIF layer over flattened event frames, read out by an
/// affine map of the per-neuron spike rate and trained with softmax
/// cross-entropy. Small enough for tests and smoke runs.
class LifClassifier {
 public:
  LifClassifier(std::size_t inputs, std::size_t hidden, std::size_t classes, std::uint64_t seed,
                LifParams params = {}, ArctanSurrogate surrogate = {})
      : inputs_(inputs), hidden_(hidden), classes_(classes), params_(params), surrogate_(surrogate),
        w_(hidden * inputs), b_(hidden, 0.5), r_(classes * hidden), c_(classes, 0.0) {
    params_.validate();
    Rng rng(seed);
    const double a = 3.0 / std::sqrt(static_cast<double>(inputs));
    for (auto& w : w_) w = a * (2.0 * uniform_unit(rng) - 1.0);
    const double ar = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (auto& r : r_) r = ar * (2.0 * uniform_unit(rng) - 1.0);
  }

  std::size_t inputs() const noexcept { return inputs_; }

  std::vector<double> logits(const EventVolume& x) const { return forward(x).logits; }

  int predict(const EventVolume& x) const {
    const auto z = logits(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < z.size(); ++k)
      if (z[k] > z[best]) best = k;
    return static_cast<int>(best);
  }

  double loss(std::span<const EventVolume> xs, std::span<const int> labels) const {
    double total = 0.0;
    for (std::size_t n = 0; n < xs.size(); ++n) total += cross_entropy(forward(xs[n]).logits, labels[n]).first;
    return total / static_cast<double>(xs.size());
  }

  /// One SGD step on the mean loss of the batch; returns that loss.
  double train_step(std::span<const EventVolume> xs, std::span<const int> labels, double lr) {
    if (xs.size() != labels.size() || xs.empty()) throw std::invalid_argument("batch/label size mismatch");
    std::vector<double> gw(w_.size(), 0.0), gb(b_.size(), 0.0), gr(r_.size(), 0.0), gc(c_.size(), 0.0);
    double total = 0.0;
    for (std::size_t n = 0; n < xs.size(); ++n) {
      const auto f = forward(xs[n]);
      const auto [l, dz] = cross_entropy(f.logits, labels[n]);
      total += l;
      const auto steps = static_cast<std::size_t>(xs[n].timesteps());
      for (std::size_t k = 0; k < classes_; ++k) {
        gc[k] += dz[k];
        for (std::size_t j = 0; j < hidden_; ++j) gr[k * hidden_ + j] += dz[k] * f.rates[j];
      }
      for (std::size_t j = 0; j < hidden_; ++j) {
        double drate = 0.0;
        for (std::size_t k = 0; k < classes_; ++k) drate += r_[k * hidden_ + j] * dz[k];
        std::vector<double> currents(steps), spike_grads(steps, drate / static_cast<double>(steps));
        for (std::size_t t = 0; t < steps; ++t) currents[t] = f.currents[t * hidden_ + j];
        const auto g = lif_sequence_grad(currents, spike_grads, params_, surrogate_, params_.v_reset);
        for (std::size_t t = 0; t < steps; ++t) {
          gb[j] += g.input_grad[t];
          for (auto i : f.active[t]) gw[j * inputs_ + i] += g.input_grad[t];
        }
      }
    }
    const double scale = lr / static_cast<double>(xs.size());
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] -= scale * gw[i];
    for (std::size_t i = 0; i < b_.size(); ++i) b_[i] -= scale * gb[i];
    for (std::size_t i = 0; i < r_.size(); ++i) r_[i] -= scale * gr[i];
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= scale * gc[i];
    return total / static_cast<double>(xs.size());
  }

 private:
  struct Forward {
    std::vector<std::vector<std::size_t>> active;  // set input indices per timestep
    std::vector<double> currents;                  // [t][hidden]
    std::vector<double> rates;                     // spikes / T per neuron
    std::vector<double> logits;
  };

  Forward forward(const EventVolume& x) const {
    const std::size_t frame = 2 * x.plane_size();
    if (frame != inputs_) throw std::invalid_argument("input size does not match the layer");
    const auto steps = static_cast<std::size_t>(x.timesteps());
    Forward f;
    f.active.resize(steps);
    f.currents.assign(steps * hidden_, 0.0);
    f.rates.assign(hidden_, 0.0);
    std::vector<LifState> state(hidden_, LifState{params_.v_reset});
    for (std::size_t t = 0; t < steps; ++t) {
      const std::uint8_t* bits = x.plane(static_cast<int>(t), 0);  // ON then OFF are contiguous
      for (std::size_t i = 0; i < frame; ++i)
        if (bits[i]) f.active[t].push_back(i);
      for (std::size_t j = 0; j < hidden_; ++j) {
        double cur = b_[j];
        for (auto i : f.active[t]) cur += w_[j * inputs_ + i];
        f.currents[t * hidden_ + j] = cur;
        const auto r = lif_step(state[j], cur, params_);
        state[j] = r.state;
        f.rates[j] += r.spike ? 1.0 : 0.0;
      }
    }
    for (auto& r : f.rates) r /= static_cast<double>(steps);
    f.logits = c_;
    for (std::size_t k = 0; k < classes_; ++k)
      for (std::size_t j = 0; j < hidden_; ++j) f.logits[k] += r_[k * hidden_ + j] * f.rates[j];
    return f;
  }

  // Loss and dL/dlogits.
  std::pair<double, std::vector<double>> cross_entropy(const std::vector<double>& z, int label) const {
    if (label < 0 || static_cast<std::size_t>(label) >= classes_) throw std::out_of_range("label out of range");
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    double sum = 0.0;
    std::vector<double> p(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) sum += (p[k] = std::exp(z[k] - mx));
    for (auto& v : p) v /= sum;
    const double l = -std::log(p[static_cast<std::size_t>(label)]);
    p[static_cast<std::size_t>(label)] -= 1.0;
    return {l, p};
  }

  std::size_t inputs_, hidden_, classes_;
  LifParams params_;
  ArctanSurrogate surrogate_;
  std::vector<double> w_, b_, r_, c_;
};

}  // namespace i2e::spiking

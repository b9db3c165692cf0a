#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "i2e/convert.hpp"
#include "i2e/events.hpp"
#include "i2e/image.hpp"
#include "i2e/parallel.hpp"

namespace i2e {

/// Fraction of set cells: count / (T * 2 * H * W).
inline double event_rate(const EventVolume& vol) noexcept {
  const std::size_t total = vol.total();
  return total == 0 ? 0.0 : static_cast<double>(vol.count()) / static_cast<double>(total);
}

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

inline Moments moments(std::span<const double> xs) noexcept {
  if (xs.empty()) return {};
  double sum = 0.0, sq = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  for (double x : xs) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(xs.size()))};
}

struct EventRateStats {
  std::vector<double> rates;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// Equal-width bins over [0, 0.5]; the last bin is closed.
  std::vector<std::size_t> histogram;
};

inline EventRateStats summarize_rates(std::vector<double> rates, std::size_t bins = 50) {
  EventRateStats s;
  s.histogram.assign(bins, 0);
  if (!rates.empty()) {
    const auto m = moments(rates);
    s.mean = m.mean;
    s.stddev = m.stddev;
    const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
    s.min = *lo;
    s.max = *hi;
    for (double r : rates) {
      auto b = static_cast<std::size_t>(r / 0.5 * static_cast<double>(bins));
      s.histogram[std::min(b, bins - 1)]++;
    }
  }
  s.rates = std::move(rates);
  return s;
}

/// Per-image event rates for `corpus` converted under `cfg` (image i uses
/// the batch seed for index i).
inline std::vector<double> corpus_event_rates(std::span<const RgbImage> corpus, const ConversionConfig& cfg,
                                              unsigned workers = 1) {
  cfg.validate();
  std::vector<double> rates(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    ConversionConfig item = cfg;
    item.seed = batch_item_seed(cfg, i);
    rates[i] = event_rate(convert(corpus[i], item));
  });
  return rates;
}

/// Event rate of a corpus as a function of s_th0, for the configuration's
/// kernels, order and timestep count. Each image is reduced to a histogram of
/// |dV| and its intensity range, so evaluating a new s_th0 does not rerun the
/// conversion. Gives the same rates as converting and counting.
class RateCurve {
 public:
  RateCurve(std::span<const RgbImage> corpus, const ConversionConfig& cfg, unsigned workers = 1)
      : items_(corpus.size()) {
    cfg.validate();
    parallel_for(corpus.size(), workers, [&](std::size_t i) {
      ConversionConfig item = cfg;
      item.seed = batch_item_seed(cfg, i);
      const IntensityMap v = rgb_to_value(corpus[i]);
      const auto dv = delta_v(v, kernels_for(item), item.padding);
      Item& it = items_[i];
      const auto [lo, hi] = std::minmax_element(v.values().begin(), v.values().end());
      it.range = static_cast<double>(*hi - *lo);
      it.cells = static_cast<double>(item.timesteps) * kPolarities * static_cast<double>(v.size());
      std::array<std::uint64_t, 256> hist{};
      for (int s = 0; s < item.timesteps; ++s) {
        for (auto d : dv[item.order[s]].values()) hist[static_cast<std::size_t>(d < 0 ? -d : d)]++;
      }
      // above[k] = number of cells with |dV| > k.
      std::uint64_t acc = 0;
      for (int k = 255; k >= 0; --k) {
        it.above[static_cast<std::size_t>(k)] = acc;
        acc += hist[static_cast<std::size_t>(k)];
      }
    });
  }

  std::size_t size() const noexcept { return items_.size(); }

  double rate(std::size_t image, double s_th0) const {
    const Item& it = items_[image];
    const int cutoff = detail::integer_cutoff(s_th0 * it.range);
    if (cutoff >= 255) return 0.0;
    return static_cast<double>(it.above[static_cast<std::size_t>(cutoff)]) / it.cells;
  }

  double mean_rate(double s_th0) const {
    if (items_.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < items_.size(); ++i) sum += rate(i, s_th0);
    return sum / static_cast<double>(items_.size());
  }

 private:
  struct Item {
    double range = 0.0;
    double cells = 1.0;
    std::array<std::uint64_t, 256> above{};
  };
  std::vector<Item> items_;
};

struct RatePoint {
  double s_th0 = 0.0;
  double mean_rate = 0.0;
};

/// Mean corpus event rate on an evenly spaced s_th0 grid [from, to].
inline std::vector<RatePoint> rate_sweep(const RateCurve& curve, double from, double to, int points) {
  if (points < 2 || !(from > 0.0) || !(to > from)) throw std::invalid_argument("rate_sweep: bad grid");
  std::vector<RatePoint> out;
  for (int i = 0; i < points; ++i) {
    const double s = from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1);
    out.push_back({s, curve.mean_rate(s)});
  }
  return out;
}

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationOptions {
  /// Accepted |achieved - target| on the mean rate (0.25 percentage points).
  double tolerance = 0.0025;
  /// Stop once the s_th0 bracket is narrower than this.
  double min_bracket = 1e-4;
  unsigned workers = 1;
};

struct CalibrationResult {
  double s_th0 = 0.0;
  double achieved_rate = 0.0;
  int evaluations = 0;
  bool within_tolerance = false;
};

/// Bisection on s_th0 in (0, 1] for a target mean event rate. Relies on the
/// rate being non-increasing in s_th0. Returns the closest point seen if the
/// bracket collapses before reaching the tolerance (rates are step functions).
inline CalibrationResult calibrate_s_th0(const RateCurve& curve, double target_rate,
                                         const CalibrationOptions& opt = {}) {
  if (!(target_rate > 0.0 && target_rate < 0.5)) throw std::invalid_argument("target rate must be in (0, 0.5)");
  if (curve.size() == 0) throw std::invalid_argument("calibration corpus is empty");

  CalibrationResult best;
  double best_err = std::numeric_limits<double>::infinity();
  auto evaluate = [&](double s) {
    const double r = curve.mean_rate(s);
    ++best.evaluations;
    if (std::abs(r - target_rate) < best_err) {
      best_err = std::abs(r - target_rate);
      best.s_th0 = s;
      best.achieved_rate = r;
    }
    return r;
  };

  // Below this, every image's cutoff is 0: the highest reachable rate.
  const double smallest = 1.0 / 512.0;
  const double ceiling = evaluate(smallest);
  if (ceiling + opt.tolerance < target_rate) {
    throw CalibrationError("unreachable target rate " + std::to_string(target_rate) +
                           ": corpus reaches at most " + std::to_string(ceiling));
  }
  double lo = smallest, hi = 1.0;
  while (best_err > opt.tolerance && hi - lo >= opt.min_bracket) {
    const double mid = 0.5 * (lo + hi);
    if (evaluate(mid) > target_rate) lo = mid; else hi = mid;
  }
  best.within_tolerance = best_err <= opt.tolerance;
  return best;
}

inline CalibrationResult calibrate_s_th0(std::span<const RgbImage> corpus, double target_rate,
                                         const ConversionConfig& cfg, const CalibrationOptions& opt = {}) {
  if (corpus.empty()) throw std::invalid_argument("calibration corpus is empty");
  return calibrate_s_th0(RateCurve(corpus, cfg, opt.workers), target_rate, opt);
}

/// Plug-in entropy in bits of per-symbol counts; 0 * log 0 = 0.
inline double entropy_from_counts(std::span<const std::uint64_t> counts) {
  const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (n == 0.0) throw std::invalid_argument("entropy of an empty stream");
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // no -0.0
}

/// Plug-in entropy in bits of the empirical distribution of `symbols`.
template <std::integral T>
double shannon_entropy(std::span<const T> symbols) {
  if (symbols.empty()) throw std::invalid_argument("entropy of an empty stream");
  if constexpr (sizeof(T) == 1) {
    std::array<std::uint64_t, 256> counts{};
    for (T s : symbols) counts[static_cast<std::uint8_t>(s)]++;
    return entropy_from_counts(counts);
  } else {
    std::vector<T> sorted(symbols.begin(), symbols.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      counts.push_back(j - i);
      i = j;
    }
    return entropy_from_counts(counts);
  }
}

template <std::integral T>
  requires(!std::is_const_v<T>)
double shannon_entropy(std::span<T> symbols) {
  return shannon_entropy(std::span<const T>(symbols));
}

template <std::integral T>
double shannon_entropy(const std::vector<T>& symbols) {
  return shannon_entropy(std::span<const T>(symbols));
}

enum class Representation : std::uint8_t { grayscale, value_map, event_stream };

/// ITU-R BT.601 luma, rounded to nearest: (299 R + 587 G + 114 B + 500) / 1000.
inline Plane<std::uint8_t> luma(const RgbImage& img) {
  Plane<std::uint8_t> out(img.height(), img.width());
  const std::uint8_t* s = img.samples().data();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const unsigned y = 299u * s[3 * i] + 587u * s[3 * i + 1] + 114u * s[3 * i + 2] + 500u;
    dst[i] = static_cast<std::uint8_t>(y / 1000u);
  }
  return out;
}

/// Ternary symbol per (t, y, x): 0 no event, 1 ON, 2 OFF. Cells with both
/// polarities set (never produced by convert) map to 3.
inline std::vector<std::uint8_t> event_symbols(const EventVolume& vol) {
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(vol.timesteps()) * vol.plane_size());
  for (int t = 0; t < vol.timesteps(); ++t) {
    const std::uint8_t* on = vol.plane(t, 0);
    const std::uint8_t* off = vol.plane(t, 1);
    for (std::size_t i = 0; i < vol.plane_size(); ++i) {
      out.push_back(static_cast<std::uint8_t>(on[i] + 2 * off[i]));
    }
  }
  return out;
}

struct EntropyReport {
  Representation representation = Representation::value_map;
  std::size_t alphabet_size = 256;
  std::string symbol_model;
  std::vector<double> per_sample;  // bits per symbol
  double mean = 0.0;
  double stddev = 0.0;
};

inline const char* to_string(Representation r) noexcept {
  switch (r) {
    case Representation::grayscale: return "grayscale";
    case Representation::value_map: return "value_map";
    case Representation::event_stream: return "event_stream";
  }
  return "?";
}

/// Per-image plug-in entropy (one histogram per image) and corpus mean/std.
/// `cfg` only matters for the event-stream representation.
inline EntropyReport entropy_report(std::span<const RgbImage> corpus, Representation rep,
                                    const ConversionConfig& cfg = {}, unsigned workers = 1) {
  if (corpus.empty()) throw std::invalid_argument("entropy corpus is empty");
  EntropyReport r;
  r.representation = rep;
  switch (rep) {
    case Representation::grayscale:
      r.alphabet_size = 256;
      r.symbol_model = "8-bit BT.601 luma per pixel";
      break;
    case Representation::value_map:
      r.alphabet_size = 256;
      r.symbol_model = "8-bit max(R,G,B) per pixel";
      break;
    case Representation::event_stream:
      r.alphabet_size = 3;
      r.symbol_model = "ternary {none, ON, OFF} per pixel per timestep";
      break;
  }
  r.per_sample.assign(corpus.size(), 0.0);
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    switch (rep) {
      case Representation::grayscale:
        r.per_sample[i] = shannon_entropy(luma(corpus[i]).values());
        break;
      case Representation::value_map:
        r.per_sample[i] = shannon_entropy(rgb_to_value(corpus[i]).values());
        break;
      case Representation::event_stream: {
        ConversionConfig item = cfg;
        item.seed = batch_item_seed(cfg, i);
        r.per_sample[i] = shannon_entropy(event_symbols(convert(corpus[i], item)));
        break;
      }
    }
  });
  const auto m = moments(r.per_sample);
  r.mean = m.mean;
  r.stddev = m.stddev;
  return r;
}

}  // namespace i2e

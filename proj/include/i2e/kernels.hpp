#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "i2e/random.hpp"

namespace i2e {

/// Number of microsaccade directions, and so the maximum number of timesteps.
inline constexpr int kDirections = 8;

struct Displacement {
  int drow = 0;
  int dcol = 0;
  friend constexpr bool operator==(Displacement, Displacement) = default;
};

/// A cell of the 3x3 shift grid. Cells are numbered 1..9 row-major, so cell 5
/// is the unshifted image and cell k sits at row (k-1)/3, column (k-1)%3.
class GridPosition {
 public:
  constexpr GridPosition() = default;

  static constexpr GridPosition from_index(int index) {
    if (index < 1 || index > 9) throw std::invalid_argument("grid index must be in 1..9");
    GridPosition p;
    p.index_ = index;
    return p;
  }
  static constexpr GridPosition from_row_col(int row, int col) {
    if (row < 0 || row > 2 || col < 0 || col > 2) {
      throw std::invalid_argument("grid row/col must be in 0..2");
    }
    return from_index(row * 3 + col + 1);
  }

  constexpr int index() const noexcept { return index_; }
  constexpr int row() const noexcept { return (index_ - 1) / 3; }
  constexpr int col() const noexcept { return (index_ - 1) % 3; }

  friend constexpr bool operator==(GridPosition, GridPosition) = default;

 private:
  int index_ = 5;
};

/// Ordered pair of grid cells. The kernel built from it holds -1 at `from`
/// and +1 at `to`.
struct DirectionPair {
  GridPosition from;
  GridPosition to;

  static constexpr DirectionPair from_indices(int from_index, int to_index) {
    if (from_index == to_index) throw std::invalid_argument("direction pair cells must differ");
    return {GridPosition::from_index(from_index), GridPosition::from_index(to_index)};
  }

  constexpr Displacement displacement() const noexcept {
    return {to.row() - from.row(), to.col() - from.col()};
  }

  friend constexpr bool operator==(const DirectionPair&, const DirectionPair&) = default;
};

/// Canonical (inference-mode) cell pairs for timesteps a..h.
inline constexpr std::array<std::array<int, 2>, kDirections> kCanonicalPairTable{{
    {9, 4}, {4, 3}, {3, 8}, {8, 1}, {5, 6}, {5, 2}, {5, 3}, {5, 1},
}};

constexpr DirectionPair canonical_pair(int direction) {
  if (direction < 0 || direction >= kDirections) throw std::out_of_range("direction must be in 0..7");
  const auto& e = kCanonicalPairTable[static_cast<std::size_t>(direction)];
  return DirectionPair::from_indices(e[0], e[1]);
}

/// Letter label of a direction: 0 -> 'a', ..., 7 -> 'h'.
constexpr char direction_label(int direction) noexcept { return static_cast<char>('a' + direction); }

/// Index of the canonical direction with displacement `d`, or -1.
constexpr int direction_of(Displacement d) noexcept {
  for (int t = 0; t < kDirections; ++t) {
    const auto& e = kCanonicalPairTable[static_cast<std::size_t>(t)];
    const int fr = (e[0] - 1) / 3, fc = (e[0] - 1) % 3;
    const int tr = (e[1] - 1) / 3, tc = (e[1] - 1) % 3;
    if (Displacement{tr - fr, tc - fc} == d) return t;
  }
  return -1;
}

/// Sparse 3x3 differencing kernel.
class MotionKernel {
 public:
  constexpr MotionKernel() = default;
  explicit constexpr MotionKernel(DirectionPair pair) : pair_(pair) {}

  constexpr const DirectionPair& pair() const noexcept { return pair_; }

  constexpr int weight(int row, int col) const noexcept {
    if (row == pair_.to.row() && col == pair_.to.col()) return 1;
    if (row == pair_.from.row() && col == pair_.from.col()) return -1;
    return 0;
  }

  /// Row-major 3x3 weights.
  constexpr std::array<int, 9> weights() const noexcept {
    std::array<int, 9> w{};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) w[static_cast<std::size_t>(r * 3 + c)] = weight(r, c);
    return w;
  }

  friend constexpr bool operator==(const MotionKernel&, const MotionKernel&) = default;

 private:
  DirectionPair pair_{};
};

/// Eight kernels, one per direction a..h, in storage order.
class MotionKernelSet {
 public:
  explicit constexpr MotionKernelSet(const std::array<DirectionPair, kDirections>& pairs) {
    for (int t = 0; t < kDirections; ++t) {
      const auto i = static_cast<std::size_t>(t);
      if (pairs[i].displacement() != canonical_pair(t).displacement()) {
        throw std::invalid_argument(std::string("kernel for direction ") + direction_label(t) +
                                    " has a non-matching displacement");
      }
      kernels_[i] = MotionKernel(pairs[i]);
    }
  }

  constexpr const MotionKernel& operator[](int direction) const noexcept {
    return kernels_[static_cast<std::size_t>(direction)];
  }
  constexpr auto begin() const noexcept { return kernels_.begin(); }
  constexpr auto end() const noexcept { return kernels_.end(); }

  friend constexpr bool operator==(const MotionKernelSet&, const MotionKernelSet&) = default;

 private:
  std::array<MotionKernel, kDirections> kernels_{};
};

inline MotionKernelSet build_canonical_kernels() {
  std::array<DirectionPair, kDirections> pairs{};
  for (int t = 0; t < kDirections; ++t) pairs[static_cast<std::size_t>(t)] = canonical_pair(t);
  return MotionKernelSet(pairs);
}

/// Every ordered pair of grid cells sharing `canonical`'s displacement, in
/// ascending (from, to) index order. `canonical` must be a table entry.
inline std::vector<DirectionPair> equivalent_pairs(const DirectionPair& canonical) {
  const int t = direction_of(canonical.displacement());
  if (t < 0 || canonical_pair(t) != canonical) {
    throw std::invalid_argument("equivalent_pairs: not a canonical direction pair");
  }
  const Displacement d = canonical.displacement();
  std::vector<DirectionPair> out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int r1 = r + d.drow, c1 = c + d.dcol;
      if (r1 < 0 || r1 > 2 || c1 < 0 || c1 > 2) continue;
      out.push_back({GridPosition::from_row_col(r, c), GridPosition::from_row_col(r1, c1)});
    }
  }
  return out;
}

/// Training-mode kernels: one pair drawn uniformly from each direction's
/// equivalence set.
inline MotionKernelSet sample_kernel_set(Rng& rng) {
  std::array<DirectionPair, kDirections> pairs{};
  for (int t = 0; t < kDirections; ++t) {
    const auto options = equivalent_pairs(canonical_pair(t));
    pairs[static_cast<std::size_t>(t)] = options[uniform_index(rng, options.size())];
  }
  return MotionKernelSet(pairs);
}

inline MotionKernelSet sample_kernel_set(std::uint64_t seed) {
  Rng rng(seed);
  return sample_kernel_set(rng);
}

enum class TimestepGroup : std::uint8_t { alpha, beta, gamma };

/// Groups: alpha = {a, b}, beta = {c, d}, gamma = {e, f, g, h}.
constexpr TimestepGroup group_of(int direction) noexcept {
  if (direction < 2) return TimestepGroup::alpha;
  if (direction < 4) return TimestepGroup::beta;
  return TimestepGroup::gamma;
}

/// Presentation order of the eight directions, built from a group sequence.
/// slot i of the output stream shows direction `permutation()[i]`.
class TimestepOrder {
 public:
  using Permutation = std::array<std::uint8_t, kDirections>;

  /// Parses a group sequence: ASCII "abg" letters (a=alpha, b=beta, g=gamma)
  /// or the Greek letters themselves, e.g. "gab" or "γαβ".
  static TimestepOrder parse(std::string_view spec) {
    std::array<TimestepGroup, 3> groups{};
    std::size_t n = 0;
    for (std::size_t i = 0; i < spec.size();) {
      TimestepGroup g{};
      const auto c = static_cast<unsigned char>(spec[i]);
      if (c == 'a' || c == 'A') {
        g = TimestepGroup::alpha;
        i += 1;
      } else if (c == 'b' || c == 'B') {
        g = TimestepGroup::beta;
        i += 1;
      } else if (c == 'g' || c == 'G') {
        g = TimestepGroup::gamma;
        i += 1;
      } else if (c == 0xCE && i + 1 < spec.size() &&
                 static_cast<unsigned char>(spec[i + 1]) >= 0xB1 &&
                 static_cast<unsigned char>(spec[i + 1]) <= 0xB3) {
        const auto second = static_cast<unsigned char>(spec[i + 1]);
        g = second == 0xB1 ? TimestepGroup::alpha
            : second == 0xB2 ? TimestepGroup::beta
                             : TimestepGroup::gamma;
        i += 2;
      } else {
        throw std::invalid_argument("timestep order: unexpected character in '" +
                                    std::string(spec) + "'");
      }
      if (n == 3) throw std::invalid_argument("timestep order: more than three groups");
      groups[n++] = g;
    }
    if (n != 3) throw std::invalid_argument("timestep order: need exactly three groups");
    if (groups[0] == groups[1] || groups[0] == groups[2] || groups[1] == groups[2]) {
      throw std::invalid_argument("timestep order: groups must be distinct");
    }
    return TimestepOrder(groups);
  }

  static TimestepOrder identity() {
    return TimestepOrder({TimestepGroup::alpha, TimestepGroup::beta, TimestepGroup::gamma});
  }

  /// gamma, alpha, beta: e f g h a b c d.
  static TimestepOrder best() {
    return TimestepOrder({TimestepGroup::gamma, TimestepGroup::alpha, TimestepGroup::beta});
  }

  TimestepOrder() : TimestepOrder(identity()) {}

  const Permutation& permutation() const noexcept { return perm_; }
  int operator[](int slot) const noexcept { return perm_[static_cast<std::size_t>(slot)]; }
  const std::array<TimestepGroup, 3>& groups() const noexcept { return groups_; }

  Permutation inverse() const noexcept {
    Permutation inv{};
    for (std::size_t i = 0; i < perm_.size(); ++i) inv[perm_[i]] = static_cast<std::uint8_t>(i);
    return inv;
  }

  /// Direction letters in presentation order, e.g. "efghabcd".
  std::string labels() const {
    std::string s;
    for (auto d : perm_) s.push_back(direction_label(d));
    return s;
  }

  /// ASCII group spec, e.g. "gab".
  std::string spec() const {
    std::string s;
    for (auto g : groups_) s.push_back(g == TimestepGroup::alpha ? 'a' : g == TimestepGroup::beta ? 'b' : 'g');
    return s;
  }

  friend bool operator==(const TimestepOrder&, const TimestepOrder&) = default;

 private:
  explicit TimestepOrder(const std::array<TimestepGroup, 3>& groups) : groups_(groups) {
    std::size_t slot = 0;
    for (auto g : groups_) {
      for (int d = 0; d < kDirections; ++d) {
        if (group_of(d) == g) perm_[slot++] = static_cast<std::uint8_t>(d);
      }
    }
  }

  std::array<TimestepGroup, 3> groups_{};
  Permutation perm_{};
};

inline TimestepOrder timestep_permutation(std::string_view spec) { return TimestepOrder::parse(spec); }

}  // namespace i2e

#pragma once

// On-disk event containers.
//
// Every file starts with a 52-byte little-endian header:
//
//   offset size  field
//        0    4  magic "I2E1"
//        4    2  format version (1)
//        6    1  layout: 0 = dense, 1 = sparse
//        7    1  dense: 1 = bit-packed, 0 = one byte per cell
//                sparse: coordinate width in bytes (1 or 2)
//        8    2  T, timesteps (0..8)
//       10    2  C, polarity channels (always 2)
//       12    4  H
//       16    4  W
//       20    8  motion direction (0..7 = a..h) of each timestep; 0xFF past T
//       28    8  s_th0 as IEEE-754 binary64 (0 if unknown)
//       36    8  source hash, FNV-1a 64 over the RGB samples (0 if unknown)
//       44    8  N, number of events
//
// Dense payload: T*2 planes in (t, p) order. Packed planes take ceil(H*W/8)
// bytes, cell y*W+x at bit (i % 8) of byte (i / 8), LSB first, trailing bits
// zero. Unpacked planes take H*W bytes of 0/1.
//
// Sparse payload: N records (t, p, x, y), strictly increasing in (t, p, y, x).
// t and p are one byte each; x and y use the coordinate width, which is 1
// exactly when max(H, W) <= 256. Polarity 0 is ON, 1 is OFF.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "i2e/events.hpp"

namespace i2e {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Layout : std::uint8_t { dense = 0, sparse = 1 };

inline constexpr std::array<char, 4> kMagic{'I', '2', 'E', '1'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 52;
inline constexpr std::uint8_t kNoDirection = 0xFF;

struct FileHeader {
  Layout layout = Layout::dense;
  std::uint8_t encoding = 1;
  std::uint16_t timesteps = 0;
  std::uint16_t channels = kPolarities;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::array<std::uint8_t, kDirections> directions{};
  double s_th0 = 0.0;
  std::uint64_t source_hash = 0;
  std::uint64_t event_count = 0;

  std::size_t payload_size() const noexcept;
  std::size_t file_size() const noexcept { return kHeaderSize + payload_size(); }

  friend bool operator==(const FileHeader&, const FileHeader&) = default;
};

/// Bytes of one bit-packed plane.
constexpr std::size_t packed_plane_bytes(std::size_t height, std::size_t width) noexcept {
  return (height * width + 7) / 8;
}

/// Bit-packed dense payload: T * 2 * ceil(H*W / 8).
constexpr std::size_t dense_payload_bytes(std::size_t timesteps, std::size_t height,
                                          std::size_t width) noexcept {
  return timesteps * kPolarities * packed_plane_bytes(height, width);
}

constexpr std::uint8_t sparse_coordinate_width(std::size_t height, std::size_t width) noexcept {
  return std::max(height, width) <= 256 ? 1 : 2;
}

constexpr std::size_t sparse_record_bytes(std::uint8_t coordinate_width) noexcept {
  return 2 + 2 * static_cast<std::size_t>(coordinate_width);
}

inline std::size_t FileHeader::payload_size() const noexcept {
  if (layout == Layout::sparse) return static_cast<std::size_t>(event_count) * sparse_record_bytes(encoding);
  const std::size_t planes = static_cast<std::size_t>(timesteps) * channels;
  const std::size_t cells = static_cast<std::size_t>(height) * width;
  return encoding == 1 ? planes * ((cells + 7) / 8) : planes * cells;
}

/// One event of a coordinate list.
struct Event {
  std::uint16_t t = 0;
  std::uint8_t p = 0;
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  friend bool operator==(const Event&, const Event&) = default;
  friend bool operator<(const Event& a, const Event& b) noexcept {
    if (a.t != b.t) return a.t < b.t;
    if (a.p != b.p) return a.p < b.p;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  }
};

/// Coordinate list of the set cells, sorted by (t, p, y, x).
inline std::vector<Event> to_event_list(const EventVolume& vol) {
  std::vector<Event> out;
  for (int t = 0; t < vol.timesteps(); ++t) {
    for (int p = 0; p < kPolarities; ++p) {
      const std::uint8_t* plane = vol.plane(t, p);
      for (int y = 0; y < vol.height(); ++y) {
        for (int x = 0; x < vol.width(); ++x) {
          if (plane[static_cast<std::size_t>(y) * static_cast<std::size_t>(vol.width()) + static_cast<std::size_t>(x)]) {
            out.push_back({static_cast<std::uint16_t>(t), static_cast<std::uint8_t>(p),
                           static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)});
          }
        }
      }
    }
  }
  return out;
}

/// Inverse of to_event_list; duplicate events collapse.
inline EventVolume from_event_list(std::span<const Event> events, int timesteps, int height, int width,
                                   std::vector<std::uint8_t> directions = {}) {
  EventVolume vol(timesteps, height, width, std::move(directions));
  for (const auto& e : events) {
    if (e.t >= timesteps || e.p >= kPolarities || e.x >= static_cast<std::uint32_t>(width) ||
        e.y >= static_cast<std::uint32_t>(height)) {
      throw std::out_of_range("event coordinate out of range");
    }
    vol.at(e.t, e.p, static_cast<int>(e.y), static_cast<int>(e.x)) = 1;
  }
  return vol;
}

struct EncodeOptions {
  double s_th0 = 0.0;
  std::uint64_t source_hash = 0;
  /// Dense only: false writes one byte per cell.
  bool bit_packed = true;
};

namespace detail {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t>& out_;
};

inline std::uint64_t read_le(std::span<const std::uint8_t> b, std::size_t off, int n) noexcept {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[off + static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

inline FileHeader make_header(const EventVolume& vol, Layout layout, std::uint8_t encoding,
                              const EncodeOptions& opt, std::uint64_t events) {
  if (vol.height() > 0xFFFF || vol.width() > 0xFFFF) {
    throw std::invalid_argument("event volume too large for the I2E1 container");
  }
  FileHeader h;
  h.layout = layout;
  h.encoding = encoding;
  h.timesteps = static_cast<std::uint16_t>(vol.timesteps());
  h.height = static_cast<std::uint32_t>(vol.height());
  h.width = static_cast<std::uint32_t>(vol.width());
  h.directions.fill(kNoDirection);
  std::copy(vol.directions().begin(), vol.directions().end(), h.directions.begin());
  h.s_th0 = opt.s_th0;
  h.source_hash = opt.source_hash;
  h.event_count = events;
  return h;
}

inline void write_header(const FileHeader& h, std::vector<std::uint8_t>& out) {
  ByteWriter w(out);
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(h.layout));
  w.u8(h.encoding);
  w.u16(h.timesteps);
  w.u16(h.channels);
  w.u32(h.height);
  w.u32(h.width);
  for (auto d : h.directions) w.u8(d);
  w.f64(h.s_th0);
  w.u64(h.source_hash);
  w.u64(h.event_count);
}

inline std::vector<std::uint8_t> directions_of(const FileHeader& h) {
  return {h.directions.begin(), h.directions.begin() + h.timesteps};
}

}  // namespace detail

/// Parses and validates the fixed header. `bytes` may extend past the file
/// (e.g. a shard of concatenated files); the payload must be present.
inline FileHeader read_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("truncated header");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw FormatError("bad magic");
  }
  if (detail::read_le(bytes, 4, 2) != kFormatVersion) throw FormatError("unsupported format version");
  FileHeader h;
  const auto layout = bytes[6];
  if (layout > 1) throw FormatError("unknown layout tag");
  h.layout = static_cast<Layout>(layout);
  h.encoding = bytes[7];
  h.timesteps = static_cast<std::uint16_t>(detail::read_le(bytes, 8, 2));
  h.channels = static_cast<std::uint16_t>(detail::read_le(bytes, 10, 2));
  h.height = static_cast<std::uint32_t>(detail::read_le(bytes, 12, 4));
  h.width = static_cast<std::uint32_t>(detail::read_le(bytes, 16, 4));
  std::copy_n(bytes.begin() + 20, kDirections, h.directions.begin());
  h.s_th0 = std::bit_cast<double>(detail::read_le(bytes, 28, 8));
  h.source_hash = detail::read_le(bytes, 36, 8);
  h.event_count = detail::read_le(bytes, 44, 8);

  if (h.channels != kPolarities) throw FormatError("channel count must be 2");
  if (h.timesteps > kDirections) throw FormatError("timesteps must be at most 8");
  if (h.height > 0xFFFF || h.width > 0xFFFF) throw FormatError("spatial size out of range");
  for (std::size_t t = 0; t < kDirections; ++t) {
    const bool used = t < h.timesteps;
    if (used && h.directions[t] >= kDirections) throw FormatError("direction out of range");
    if (!used && h.directions[t] != kNoDirection) throw FormatError("direction set past T");
  }
  const std::uint64_t cells = std::uint64_t{h.timesteps} * kPolarities * h.height * h.width;
  if (h.event_count > cells) throw FormatError("event count exceeds volume size");
  if (h.layout == Layout::dense) {
    if (h.encoding > 1) throw FormatError("unknown dense packing");
  } else {
    if (h.encoding != 1 && h.encoding != 2) throw FormatError("coordinate width must be 1 or 2");
    if (h.encoding != sparse_coordinate_width(h.height, h.width)) {
      throw FormatError("coordinate width inconsistent with dimensions");
    }
  }
  if (bytes.size() - kHeaderSize < h.payload_size()) throw FormatError("truncated payload");
  return h;
}

inline std::vector<std::uint8_t> encode_dense(const EventVolume& vol, const EncodeOptions& opt = {}) {
  const std::uint8_t packing = opt.bit_packed ? 1 : 0;
  const auto header = detail::make_header(vol, Layout::dense, packing, opt, vol.count());
  std::vector<std::uint8_t> out;
  out.reserve(header.file_size());
  detail::write_header(header, out);
  const std::size_t cells = vol.plane_size();
  for (int t = 0; t < vol.timesteps(); ++t) {
    for (int p = 0; p < kPolarities; ++p) {
      const std::uint8_t* plane = vol.plane(t, p);
      if (!opt.bit_packed) {
        out.insert(out.end(), plane, plane + cells);
        continue;
      }
      const std::size_t base = out.size();
      out.resize(base + packed_plane_bytes(vol.height(), vol.width()), 0);
      for (std::size_t i = 0; i < cells; ++i) {
        out[base + i / 8] |= static_cast<std::uint8_t>((plane[i] & 1u) << (i % 8));
      }
    }
  }
  return out;
}

/// Decodes exactly one file occupying all of `bytes`.
inline EventVolume decode_dense(std::span<const std::uint8_t> bytes) {
  const FileHeader h = read_header(bytes);
  if (h.layout != Layout::dense) throw FormatError("not a dense file");
  if (bytes.size() != h.file_size()) throw FormatError("trailing bytes after payload");
  EventVolume vol(h.timesteps, static_cast<int>(h.height), static_cast<int>(h.width),
                  detail::directions_of(h));
  const std::size_t cells = vol.plane_size();
  const std::uint8_t* src = bytes.data() + kHeaderSize;
  for (int t = 0; t < vol.timesteps(); ++t) {
    for (int p = 0; p < kPolarities; ++p) {
      std::uint8_t* plane = vol.plane(t, p);
      if (h.encoding == 0) {
        for (std::size_t i = 0; i < cells; ++i) {
          if (src[i] > 1) throw FormatError("unpacked cell is not 0 or 1");
          plane[i] = src[i];
        }
        src += cells;
        continue;
      }
      for (std::size_t i = 0; i < cells; ++i) plane[i] = (src[i / 8] >> (i % 8)) & 1u;
      const std::size_t nbytes = packed_plane_bytes(vol.height(), vol.width());
      if (cells % 8 != 0 && (src[nbytes - 1] >> (cells % 8)) != 0) {
        throw FormatError("nonzero padding bits");
      }
      src += nbytes;
    }
  }
  if (vol.count() != h.event_count) throw FormatError("header event count does not match payload");
  return vol;
}

inline std::vector<std::uint8_t> encode_sparse(const EventVolume& vol, const EncodeOptions& opt = {}) {
  const auto events = to_event_list(vol);
  const std::uint8_t width = sparse_coordinate_width(static_cast<std::size_t>(vol.height()),
                                                     static_cast<std::size_t>(vol.width()));
  const auto header = detail::make_header(vol, Layout::sparse, width, opt, events.size());
  std::vector<std::uint8_t> out;
  out.reserve(header.file_size());
  detail::write_header(header, out);
  detail::ByteWriter w(out);
  for (const auto& e : events) {
    w.u8(static_cast<std::uint8_t>(e.t));
    w.u8(e.p);
    if (width == 1) {
      w.u8(static_cast<std::uint8_t>(e.x));
      w.u8(static_cast<std::uint8_t>(e.y));
    } else {
      w.u16(static_cast<std::uint16_t>(e.x));
      w.u16(static_cast<std::uint16_t>(e.y));
    }
  }
  return out;
}

inline EventVolume decode_sparse(std::span<const std::uint8_t> bytes) {
  const FileHeader h = read_header(bytes);
  if (h.layout != Layout::sparse) throw FormatError("not a sparse file");
  if (bytes.size() != h.file_size()) throw FormatError("trailing bytes after payload");
  EventVolume vol(h.timesteps, static_cast<int>(h.height), static_cast<int>(h.width),
                  detail::directions_of(h));
  const std::size_t rec = sparse_record_bytes(h.encoding);
  const int cw = h.encoding;
  Event prev{};
  for (std::uint64_t n = 0; n < h.event_count; ++n) {
    const std::size_t off = kHeaderSize + static_cast<std::size_t>(n) * rec;
    Event e;
    e.t = bytes[off];
    e.p = bytes[off + 1];
    e.x = static_cast<std::uint32_t>(detail::read_le(bytes, off + 2, cw));
    e.y = static_cast<std::uint32_t>(detail::read_le(bytes, off + 2 + static_cast<std::size_t>(cw), cw));
    if (e.t >= h.timesteps || e.p >= kPolarities || e.x >= h.width || e.y >= h.height) {
      throw FormatError("event record out of range");
    }
    if (n > 0 && !(prev < e)) throw FormatError("event records not strictly increasing");
    vol.at(e.t, e.p, static_cast<int>(e.y), static_cast<int>(e.x)) = 1;
    prev = e;
  }
  return vol;
}

struct DecodedFile {
  FileHeader header;
  EventVolume volume;
};

/// Decodes one file of either layout.
inline DecodedFile decode(std::span<const std::uint8_t> bytes) {
  FileHeader h = read_header(bytes);
  return {h, h.layout == Layout::dense ? decode_dense(bytes) : decode_sparse(bytes)};
}

namespace detail {
inline EncodeOptions options_of(const FileHeader& h) {
  return {h.s_th0, h.source_hash, h.layout == Layout::dense ? h.encoding == 1 : true};
}
}  // namespace detail

inline std::vector<std::uint8_t> dense_to_sparse(std::span<const std::uint8_t> dense) {
  const auto f = decode(dense);
  if (f.header.layout != Layout::dense) throw FormatError("dense_to_sparse: input is not dense");
  return encode_sparse(f.volume, detail::options_of(f.header));
}

inline std::vector<std::uint8_t> sparse_to_dense(std::span<const std::uint8_t> sparse, bool bit_packed = true) {
  const auto f = decode(sparse);
  if (f.header.layout != Layout::sparse) throw FormatError("sparse_to_dense: input is not sparse");
  auto opt = detail::options_of(f.header);
  opt.bit_packed = bit_packed;
  return encode_dense(f.volume, opt);
}

/// 1 - encoded / original.
inline double compression_ratio(std::uint64_t original_bytes, std::uint64_t encoded_bytes) {
  if (original_bytes == 0) throw std::invalid_argument("original size must be positive");
  return 1.0 - static_cast<double>(encoded_bytes) / static_cast<double>(original_bytes);
}

struct CompressionReport {
  std::uint64_t original_bytes = 0;
  std::uint64_t dense_bytes = 0;
  std::uint64_t sparse_bytes = 0;
  double dense_ratio = 0.0;
  double sparse_ratio = 0.0;
};

inline CompressionReport compression_report(std::uint64_t original_bytes, std::uint64_t dense_bytes,
                                            std::uint64_t sparse_bytes) {
  return {original_bytes, dense_bytes, sparse_bytes, compression_ratio(original_bytes, dense_bytes),
          compression_ratio(original_bytes, sparse_bytes)};
}

}  // namespace i2e

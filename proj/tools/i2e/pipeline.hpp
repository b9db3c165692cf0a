#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "i2e/convert.hpp"
#include "i2e/formats.hpp"
#include "i2e/image.hpp"
#include "i2e/preprocess.hpp"

namespace i2e::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Bad input data or an inconsistent dataset (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- image I/O

/// Decodes PNG/JPEG/BMP into RGB; nullopt if the file cannot be decoded.
std::optional<RgbImage> load_image(const fs::path& path);

/// Writes a PNG (used by tests and the sample-corpus tooling).
void save_png(const fs::path& path, const RgbImage& img);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

// ------------------------------------------------------------------ ingest

struct Sample {
  fs::path path;
  std::string id;  // path relative to the input root, '/'-separated
  int label = 0;
};

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct SampleIndex {
  std::vector<Sample> samples;      // sorted by id
  std::vector<std::string> classes; // label -> class name, sorted
  std::vector<SkippedFile> skipped;
};

/// Scans root/<class>/<image> (class directories may nest). Files with an
/// image extension but an unrecognised signature are skipped and reported.
/// Throws DataError when nothing usable is found.
SampleIndex ingest(const fs::path& root);

/// Every decodable image under `dir` (recursive, sorted by relative path),
/// resized to size x size. Undecodable files are skipped; `ids`, if given,
/// receives the relative paths of the loaded images.
std::vector<RgbImage> load_corpus(const fs::path& dir, int size, std::vector<std::string>* ids = nullptr);

// ---------------------------------------------------------------- pipeline

enum class OutputLayout { dense, sparse, both };

struct PipelineConfig {
  fs::path input;
  fs::path output;
  PreprocessConfig preprocess;
  ConversionConfig conversion;  // conversion.seed is the run seed
  std::size_t shard_size = 256;
  unsigned workers = 1;
  OutputLayout layout = OutputLayout::both;
  bool resume = false;

  void validate() const;
};

/// Run-level seed -> per-sample seed; depends only on the sample id, so any
/// subset of a corpus converts the same way in isolation.
std::uint64_t sample_seed(std::uint64_t run_seed, std::string_view sample_id);

/// Preprocess and convert one decoded image the way run_pipeline does.
EventVolume convert_sample(const RgbImage& decoded, const PipelineConfig& cfg, std::string_view sample_id);

/// Converts the corpus into shards under cfg.output and writes
/// cfg.output/manifest.json; returns the manifest. Shards are byte-identical
/// for a given config regardless of worker count.
json run_pipeline(const PipelineConfig& cfg);

json config_to_json(const PipelineConfig& cfg);

// ----------------------------------------------------------------- reading

struct DatasetSample {
  std::string id;
  int label = 0;
  Layout layout = Layout::dense;
  FileHeader header;
  EventVolume volume;
};

json load_manifest(const fs::path& dataset_dir);

/// Decodes every sample of `layout` (dense preferred when both exist unless
/// asked otherwise) and checks shard hashes. Throws DataError on mismatch.
void for_each_sample(const fs::path& dataset_dir, const std::function<void(const DatasetSample&)>& fn,
                     std::optional<Layout> layout = std::nullopt);

struct ValidationReport {
  bool ok = true;
  std::size_t samples = 0;
  std::size_t shards = 0;
  std::vector<std::string> errors;
  double mean_event_rate = 0.0;
};

/// Hash check, full decode, record bounds, and dense/sparse equivalence.
ValidationReport validate_dataset(const fs::path& dataset_dir);

// ------------------------------------------------------------------- bench

struct BenchReport {
  std::size_t images = 0;
  int height = 0;
  int width = 0;
  int repeats = 0;
  std::vector<double> fast_ms;   // mean per-sample latency of each repeat
  std::vector<double> naive_ms;
  double fast_median_ms = 0.0;
  double naive_median_ms = 0.0;
  double fast_throughput = 0.0;  // samples per second at the median
  double naive_throughput = 0.0;
  double fast_spread = 0.0;      // (max - min) / median over repeats
  double naive_spread = 0.0;
  std::size_t events = 0;
};

/// Times the fused conversion against the translate-and-subtract reference
/// after checking they agree on every image. Throws DataError on mismatch.
BenchReport bench(std::span<const RgbImage> images, const ConversionConfig& cfg, int repeats = 5);

json to_json(const BenchReport& r);

/// Debug dump of the kernels and presentation order of a configuration.
json kernels_to_json(const MotionKernelSet& kernels, const TimestepOrder& order);

std::string to_string(Padding p);
std::string to_string(KernelMode m);
std::string to_string(OutputLayout l);
Padding parse_padding(std::string_view s);
KernelMode parse_kernel_mode(std::string_view s);
OutputLayout parse_layout(std::string_view s);

}  // namespace i2e::pipeline

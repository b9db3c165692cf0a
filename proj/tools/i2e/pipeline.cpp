#include "i2e/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>

#include <openssl/evp.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "i2e/hash.hpp"
#include "i2e/parallel.hpp"
#include "i2e/reference.hpp"
#include "i2e/stats.hpp"
#include "i2e/version.hpp"

namespace i2e::pipeline {

namespace {

constexpr int kManifestVersion = 1;
constexpr const char* kManifestName = "manifest.json";

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool has_image_extension(const fs::path& p) {
  const auto ext = lower(p.extension().string());
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

std::vector<std::uint8_t> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Write to a temporary sibling, then rename over the target.
void write_file_atomic(const fs::path& p, std::span<const std::uint8_t> bytes) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

void write_text_atomic(const fs::path& p, const std::string& text) {
  write_file_atomic(p, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string shard_name(std::size_t index, Layout layout) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "shard-%05zu.%s.i2e", index, layout == Layout::dense ? "dense" : "sparse");
  return buf;
}

double percentile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return i + 1 < xs.size() ? xs[i] * (1 - f) + xs[i + 1] * f : xs[i];
}

double median(std::vector<double> xs) { return percentile(std::move(xs), 0.5); }

std::vector<Layout> layouts_of(OutputLayout l) {
  switch (l) {
    case OutputLayout::dense: return {Layout::dense};
    case OutputLayout::sparse: return {Layout::sparse};
    case OutputLayout::both: return {Layout::dense, Layout::sparse};
  }
  return {};
}

const char* layout_key(Layout l) { return l == Layout::dense ? "dense" : "sparse"; }

}  // namespace

// ---------------------------------------------------------------- image I/O

std::optional<RgbImage> load_image(const fs::path& path) {
  cv::Mat bgr;
  try {
    bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception&) {
    return std::nullopt;
  }
  if (bgr.empty() || bgr.type() != CV_8UC3) return std::nullopt;
  RgbImage img(bgr.rows, bgr.cols);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) img.set(y, x, row[x][2], row[x][1], row[x][0]);
  }
  return img;
}

void save_png(const fs::path& path, const RgbImage& img) {
  cv::Mat bgr(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) row[x] = cv::Vec3b(img.at(y, x, 2), img.at(y, x, 1), img.at(y, x, 0));
  }
  if (!cv::imwrite(path.string(), bgr)) throw DataError("cannot write " + path.string());
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

// ------------------------------------------------------------------ ingest

SampleIndex ingest(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DataError("input is not a directory: " + root.string());
  SampleIndex index;
  std::vector<fs::path> class_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) class_dirs.push_back(e.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  for (const auto& dir : class_dirs) {
    const int label = static_cast<int>(index.classes.size());
    bool any = false;
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file() && has_image_extension(e.path())) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string id = fs::relative(f, root).generic_string();
      bool readable = false;
      try {
        readable = cv::haveImageReader(f.string());
      } catch (const cv::Exception&) {
      }
      if (!readable) {
        index.skipped.push_back({id, "unrecognised or unreadable image"});
        continue;
      }
      index.samples.push_back({f, id, label});
      any = true;
    }
    if (any) index.classes.push_back(dir.filename().string());
  }
  std::sort(index.samples.begin(), index.samples.end(), [](const Sample& a, const Sample& b) { return a.id < b.id; });
  if (index.samples.empty()) throw DataError("no readable images under " + root.string());
  return index;
}

std::vector<RgbImage> load_corpus(const fs::path& dir, int size, std::vector<std::string>* ids) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && has_image_extension(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RgbImage> out;
  for (const auto& f : files) {
    auto img = load_image(f);
    if (!img) continue;
    out.push_back(resize_bilinear(*img, size, size));
    if (ids) ids->push_back(fs::relative(f, dir).generic_string());
  }
  if (out.empty()) throw DataError("no readable images under " + dir.string());
  return out;
}

// ---------------------------------------------------------------- pipeline

void PipelineConfig::validate() const {
  preprocess.validate();
  conversion.validate();
  if (shard_size < 1) throw std::invalid_argument("shard size must be at least 1");
}

std::uint64_t sample_seed(std::uint64_t run_seed, std::string_view sample_id) {
  return derive_seed(run_seed, fnv1a64(sample_id));
}

EventVolume convert_sample(const RgbImage& decoded, const PipelineConfig& cfg, std::string_view sample_id) {
  const std::uint64_t seed = sample_seed(cfg.conversion.seed, sample_id);
  const RgbImage img = preprocess(decoded, cfg.preprocess, derive_seed(seed, 2));
  ConversionConfig conv = cfg.conversion;
  conv.seed = derive_seed(seed, 1);
  return convert(img, conv);
}

std::string to_string(Padding p) { return p == Padding::zero ? "zero" : "replicate"; }
std::string to_string(KernelMode m) { return m == KernelMode::canonical ? "canonical" : "random"; }
std::string to_string(OutputLayout l) {
  return l == OutputLayout::dense ? "dense" : l == OutputLayout::sparse ? "sparse" : "both";
}

Padding parse_padding(std::string_view s) {
  if (s == "zero") return Padding::zero;
  if (s == "replicate") return Padding::replicate;
  throw std::invalid_argument("padding must be 'zero' or 'replicate'");
}

KernelMode parse_kernel_mode(std::string_view s) {
  if (s == "canonical") return KernelMode::canonical;
  if (s == "random") return KernelMode::random;
  throw std::invalid_argument("augment must be 'canonical' or 'random'");
}

OutputLayout parse_layout(std::string_view s) {
  if (s == "dense") return OutputLayout::dense;
  if (s == "sparse") return OutputLayout::sparse;
  if (s == "both") return OutputLayout::both;
  throw std::invalid_argument("layout must be 'dense', 'sparse' or 'both'");
}

json config_to_json(const PipelineConfig& cfg) {
  return {
      {"size", cfg.preprocess.size},
      {"flip_prob", cfg.preprocess.flip_prob},
      {"crop_pad", cfg.preprocess.crop_pad},
      {"s_th0", cfg.conversion.s_th0},
      {"timesteps", cfg.conversion.timesteps},
      {"order", cfg.conversion.order.spec()},
      {"order_labels", cfg.conversion.order.labels()},
      {"padding", to_string(cfg.conversion.padding)},
      {"augment", to_string(cfg.conversion.augment)},
      {"seed", cfg.conversion.seed},
      {"layout", to_string(cfg.layout)},
      {"shard_size", cfg.shard_size},
  };
}

namespace {

struct ConvertedSample {
  bool ok = false;
  std::string error;
  std::uint64_t events = 0;
  double rate = 0.0;
  double convert_ms = 0.0;
  double sample_ms = 0.0;
  std::vector<std::uint8_t> encoded[2];
};

// Reuses shards from an earlier run with the same configuration whose files
// are still present and unchanged.
std::map<std::size_t, json> resumable_shards(const PipelineConfig& cfg, const json& cfg_json) {
  std::map<std::size_t, json> out;
  const fs::path manifest_path = cfg.output / kManifestName;
  if (!cfg.resume || !fs::exists(manifest_path)) return out;
  json old;
  try {
    std::ifstream in(manifest_path);
    old = json::parse(in);
  } catch (const json::exception&) {
    return out;
  }
  if (old.value("config", json()) != cfg_json) return out;
  for (const auto& shard : old.value("shards", json::array())) {
    bool intact = true;
    for (const auto& [key, file] : shard.at("files").items()) {
      const fs::path p = cfg.output / file.at("name").get<std::string>();
      if (!fs::exists(p) || sha256_hex(read_file(p)) != file.at("sha256").get<std::string>()) intact = false;
    }
    if (intact) out[shard.at("index").get<std::size_t>()] = shard;
  }
  return out;
}

}  // namespace

json run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const SampleIndex index = ingest(cfg.input);
  fs::create_directories(cfg.output);

  const json cfg_json = config_to_json(cfg);
  const auto layouts = layouts_of(cfg.layout);
  auto reused = resumable_shards(cfg, cfg_json);

  json manifest;
  manifest["format"] = "i2e-dataset";
  manifest["version"] = kManifestVersion;
  manifest["library_version"] = kVersion;
  manifest["complete"] = false;
  manifest["config"] = cfg_json;
  manifest["classes"] = index.classes;
  json skipped = json::array();
  for (const auto& s : index.skipped) skipped.push_back({{"path", s.path}, {"reason", s.reason}});
  manifest["shards"] = json::array();

  std::vector<double> convert_ms, sample_ms;
  const std::size_t shard_count = (index.samples.size() + cfg.shard_size - 1) / cfg.shard_size;
  std::size_t resumed = 0;

  for (std::size_t s = 0; s < shard_count; ++s) {
    if (auto it = reused.find(s); it != reused.end()) {
      manifest["shards"].push_back(it->second);
      for (const auto& sk : it->second.value("skipped", json::array())) skipped.push_back(sk);
      ++resumed;
      continue;
    }
    const std::size_t begin = s * cfg.shard_size;
    const std::size_t end = std::min(index.samples.size(), begin + cfg.shard_size);
    std::vector<ConvertedSample> results(end - begin);

    parallel_for(results.size(), cfg.workers, [&](std::size_t k) {
      const Sample& sample = index.samples[begin + k];
      ConvertedSample& r = results[k];
      const auto t0 = std::chrono::steady_clock::now();
      const auto decoded = load_image(sample.path);
      if (!decoded) {
        r.error = "decode failed";
        return;
      }
      if (decoded->height() < 1 || decoded->width() < 1) {
        r.error = "empty image";
        return;
      }
      const std::uint64_t seed = sample_seed(cfg.conversion.seed, sample.id);
      const RgbImage img = preprocess(*decoded, cfg.preprocess, derive_seed(seed, 2));
      ConversionConfig conv = cfg.conversion;
      conv.seed = derive_seed(seed, 1);
      const auto c0 = std::chrono::steady_clock::now();
      const EventVolume vol = convert(img, conv);
      const auto c1 = std::chrono::steady_clock::now();
      EncodeOptions opt;
      opt.s_th0 = cfg.conversion.s_th0;
      opt.source_hash = fnv1a64(img.samples());
      for (std::size_t l = 0; l < layouts.size(); ++l) {
        r.encoded[l] = layouts[l] == Layout::dense ? encode_dense(vol, opt) : encode_sparse(vol, opt);
      }
      r.events = vol.count();
      r.rate = event_rate(vol);
      r.convert_ms = std::chrono::duration<double, std::milli>(c1 - c0).count();
      r.sample_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      r.ok = true;
    });

    json shard;
    shard["index"] = s;
    shard["samples"] = json::array();
    shard["skipped"] = json::array();
    std::vector<std::uint8_t> blobs[2];
    for (std::size_t k = 0; k < results.size(); ++k) {
      const Sample& sample = index.samples[begin + k];
      const ConvertedSample& r = results[k];
      if (!r.ok) {
        shard["skipped"].push_back({{"path", sample.id}, {"reason", r.error}});
        skipped.push_back({{"path", sample.id}, {"reason", r.error}});
        continue;
      }
      json entry = {{"id", sample.id},
                    {"label", sample.label},
                    {"events", r.events},
                    {"event_rate", r.rate}};
      for (std::size_t l = 0; l < layouts.size(); ++l) {
        entry[layout_key(layouts[l])] = {{"offset", blobs[l].size()}, {"bytes", r.encoded[l].size()}};
        blobs[l].insert(blobs[l].end(), r.encoded[l].begin(), r.encoded[l].end());
      }
      shard["samples"].push_back(entry);
      convert_ms.push_back(r.convert_ms);
      sample_ms.push_back(r.sample_ms);
    }
    json files = json::object();
    for (std::size_t l = 0; l < layouts.size(); ++l) {
      const std::string name = shard_name(s, layouts[l]);
      write_file_atomic(cfg.output / name, blobs[l]);
      files[layout_key(layouts[l])] = {{"name", name}, {"sha256", sha256_hex(blobs[l])}, {"bytes", blobs[l].size()}};
    }
    shard["files"] = files;
    manifest["shards"].push_back(shard);
    manifest["skipped"] = skipped;
    write_text_atomic(cfg.output / kManifestName, manifest.dump(2));
  }
  manifest["skipped"] = skipped;

  // Aggregate statistics over every sample, including resumed shards.
  std::vector<double> rates;
  std::size_t written = 0;
  for (const auto& shard : manifest["shards"]) {
    for (const auto& e : shard["samples"]) {
      rates.push_back(e["event_rate"].get<double>());
      ++written;
    }
  }
  const auto st = summarize_rates(rates);
  manifest["stats"] = {{"samples", written},
                       {"mean_event_rate", st.mean},
                       {"std_event_rate", st.stddev},
                       {"min_event_rate", st.min},
                       {"max_event_rate", st.max}};

  write_text_atomic(cfg.output / kManifestName, manifest.dump(2));
  const auto report = validate_dataset(cfg.output);
  if (!report.ok) {
    throw DataError("written dataset failed validation: " + (report.errors.empty() ? "" : report.errors.front()));
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  double mean_convert = 0.0;
  for (double v : convert_ms) mean_convert += v;
  if (!convert_ms.empty()) mean_convert /= static_cast<double>(convert_ms.size());
  manifest["timings"] = {{"wall_seconds", wall},
                         {"workers", resolve_workers(cfg.workers)},
                         {"timed_samples", convert_ms.size()},
                         {"resumed_shards", resumed},
                         {"mean_conversion_ms", mean_convert},
                         {"p50_conversion_ms", percentile(convert_ms, 0.5)},
                         {"p90_conversion_ms", percentile(convert_ms, 0.9)},
                         {"p99_conversion_ms", percentile(convert_ms, 0.99)},
                         {"mean_sample_ms", moments(sample_ms).mean}};
  manifest["complete"] = true;
  write_text_atomic(cfg.output / kManifestName, manifest.dump(2));
  return manifest;
}

// ----------------------------------------------------------------- reading

json load_manifest(const fs::path& dataset_dir) {
  const fs::path p = dataset_dir / kManifestName;
  std::ifstream in(p);
  if (!in) throw DataError("no manifest at " + p.string());
  try {
    json m = json::parse(in);
    if (m.value("format", "") != "i2e-dataset") throw DataError("not an i2e dataset manifest: " + p.string());
    return m;
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + p.string() + ": " + e.what());
  }
}

namespace {

std::vector<std::uint8_t> read_shard(const fs::path& dir, const json& file) {
  const fs::path p = dir / file.at("name").get<std::string>();
  auto bytes = read_file(p);
  if (bytes.size() != file.at("bytes").get<std::size_t>()) throw DataError("size mismatch for " + p.string());
  if (sha256_hex(bytes) != file.at("sha256").get<std::string>()) throw DataError("hash mismatch for " + p.string());
  return bytes;
}

std::span<const std::uint8_t> record_of(const std::vector<std::uint8_t>& blob, const json& where) {
  const auto off = where.at("offset").get<std::size_t>();
  const auto n = where.at("bytes").get<std::size_t>();
  if (off > blob.size() || n > blob.size() - off) throw DataError("record outside its shard");
  return std::span(blob).subspan(off, n);
}

}  // namespace

void for_each_sample(const fs::path& dataset_dir, const std::function<void(const DatasetSample&)>& fn,
                     std::optional<Layout> layout) {
  const json m = load_manifest(dataset_dir);
  for (const auto& shard : m.at("shards")) {
    const auto& files = shard.at("files");
    Layout use = layout.value_or(files.contains("dense") ? Layout::dense : Layout::sparse);
    if (!files.contains(layout_key(use))) throw DataError("dataset has no " + std::string(layout_key(use)) + " shards");
    const auto blob = read_shard(dataset_dir, files.at(layout_key(use)));
    for (const auto& e : shard.at("samples")) {
      try {
        auto f = decode(record_of(blob, e.at(layout_key(use))));
        fn({e.at("id").get<std::string>(), e.at("label").get<int>(), use, f.header, std::move(f.volume)});
      } catch (const FormatError& err) {
        throw DataError("sample " + e.at("id").get<std::string>() + ": " + err.what());
      }
    }
  }
}

ValidationReport validate_dataset(const fs::path& dataset_dir) {
  ValidationReport rep;
  json m;
  try {
    m = load_manifest(dataset_dir);
  } catch (const DataError& e) {
    rep.ok = false;
    rep.errors.push_back(e.what());
    return rep;
  }
  std::vector<double> rates;
  for (const auto& shard : m.value("shards", json::array())) {
    ++rep.shards;
    std::map<std::string, std::vector<std::uint8_t>> blobs;
    try {
      for (const auto& [key, file] : shard.at("files").items()) blobs[key] = read_shard(dataset_dir, file);
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.errors.push_back(e.what());
      continue;
    }
    for (const auto& e : shard.at("samples")) {
      const std::string id = e.value("id", "?");
      try {
        std::optional<EventVolume> first;
        for (const auto& [key, blob] : blobs) {
          const auto rec = record_of(blob, e.at(key));
          const auto f = decode(rec);
          if ((key == "dense") != (f.header.layout == Layout::dense)) throw DataError("layout tag mismatch");
          if (f.header.event_count != e.at("events").get<std::uint64_t>()) throw DataError("event count mismatch");
          // Cross-conversion must reproduce the other layout byte for byte.
          const auto other = f.header.layout == Layout::dense ? dense_to_sparse(rec) : sparse_to_dense(rec, f.header.encoding == 1);
          if (decode(other).volume != f.volume) throw DataError("cross-conversion changed the volume");
          if (first && *first != f.volume) throw DataError("dense and sparse records disagree");
          if (!first) first = f.volume;
        }
        if (first) rates.push_back(event_rate(*first));
        ++rep.samples;
      } catch (const std::exception& err) {
        rep.ok = false;
        rep.errors.push_back(id + ": " + err.what());
      }
    }
  }
  rep.mean_event_rate = moments(rates).mean;
  return rep;
}

// ------------------------------------------------------------------- bench

BenchReport bench(std::span<const RgbImage> images, const ConversionConfig& cfg, int repeats) {
  if (images.empty()) throw DataError("bench: no images");
  if (repeats < 1) throw std::invalid_argument("bench: repeats must be positive");
  BenchReport r;
  r.images = images.size();
  r.height = images[0].height();
  r.width = images[0].width();
  r.repeats = repeats;

  auto item_cfg = [&](std::size_t i) {
    ConversionConfig c = cfg;
    c.seed = batch_item_seed(cfg, i);
    return c;
  };
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto fast = convert(images[i], item_cfg(i));
    if (fast != reference::convert(images[i], item_cfg(i))) {
      throw DataError("bench: fast and reference outputs differ on image " + std::to_string(i));
    }
    r.events += fast.count();
  }

  using clock = std::chrono::steady_clock;
  std::size_t sink = 0;
  for (int k = 0; k < repeats; ++k) {
    auto t0 = clock::now();
    for (std::size_t i = 0; i < images.size(); ++i) sink += convert(images[i], item_cfg(i)).count();
    auto t1 = clock::now();
    for (std::size_t i = 0; i < images.size(); ++i) sink += reference::convert(images[i], item_cfg(i)).count();
    auto t2 = clock::now();
    const double n = static_cast<double>(images.size());
    r.fast_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count() / n);
    r.naive_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count() / n);
  }
  if (sink != 2 * static_cast<std::size_t>(repeats) * r.events) throw DataError("bench: outputs changed between repeats");

  auto spread = [](const std::vector<double>& xs, double med) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return med > 0 ? (*hi - *lo) / med : 0.0;
  };
  r.fast_median_ms = median(r.fast_ms);
  r.naive_median_ms = median(r.naive_ms);
  r.fast_throughput = r.fast_median_ms > 0 ? 1000.0 / r.fast_median_ms : 0.0;
  r.naive_throughput = r.naive_median_ms > 0 ? 1000.0 / r.naive_median_ms : 0.0;
  r.fast_spread = spread(r.fast_ms, r.fast_median_ms);
  r.naive_spread = spread(r.naive_ms, r.naive_median_ms);
  return r;
}

json to_json(const BenchReport& r) {
  return {{"images", r.images},
          {"height", r.height},
          {"width", r.width},
          {"repeats", r.repeats},
          {"events", r.events},
          {"fast", {{"median_ms", r.fast_median_ms}, {"throughput_per_s", r.fast_throughput}, {"spread", r.fast_spread}, {"runs_ms", r.fast_ms}}},
          {"naive", {{"median_ms", r.naive_median_ms}, {"throughput_per_s", r.naive_throughput}, {"spread", r.naive_spread}, {"runs_ms", r.naive_ms}}},
          {"speedup", r.fast_median_ms > 0 ? r.naive_median_ms / r.fast_median_ms : 0.0}};
}

json kernels_to_json(const MotionKernelSet& kernels, const TimestepOrder& order) {
  json out;
  out["order"] = order.spec();
  out["order_labels"] = order.labels();
  out["kernels"] = json::array();
  for (int d = 0; d < kDirections; ++d) {
    const auto& k = kernels[d];
    const auto disp = k.pair().displacement();
    json rows = json::array();
    for (int r = 0; r < 3; ++r) rows.push_back({k.weight(r, 0), k.weight(r, 1), k.weight(r, 2)});
    out["kernels"].push_back({{"label", std::string(1, direction_label(d))},
                              {"pair", {k.pair().from.index(), k.pair().to.index()}},
                              {"displacement", {disp.drow, disp.dcol}},
                              {"weights", rows}});
  }
  return out;
}

}  // namespace i2e::pipeline

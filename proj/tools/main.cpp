// i2e command-line tool. Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "i2e/energy.hpp"
#include "i2e/pipeline.hpp"
#include "i2e/stats.hpp"
#include "i2e/synthetic.hpp"
#include "i2e/version.hpp"

namespace {

using namespace i2e;
using namespace i2e::pipeline;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

// Options shared by every subcommand that converts images.
struct ConversionArgs {
  double s_th0 = 0.12;
  int timesteps = 8;
  std::string order = "gab";
  std::string padding = "replicate";
  std::string augment = "canonical";
  std::uint64_t seed = 2024;

  void add_to(CLI::App* app) {
    app->add_option("--s-th0,--sth0", s_th0, "Threshold scale relative to the value-map range")->capture_default_str();
    app->add_option("--timesteps,-T", timesteps, "Timesteps kept after ordering (1-8)")->capture_default_str();
    app->add_option("--order", order, "Group order, e.g. gab or γαβ")->capture_default_str();
    app->add_option("--padding", padding, "zero or replicate")->capture_default_str();
    app->add_option("--augment", augment, "canonical or random kernels")->capture_default_str();
    app->add_option("--seed", seed, "Run seed")->capture_default_str();
  }

  ConversionConfig config() const {
    ConversionConfig c;
    c.s_th0 = s_th0;
    c.timesteps = timesteps;
    c.order = TimestepOrder::parse(order);
    c.padding = parse_padding(padding);
    c.augment = parse_kernel_mode(augment);
    c.seed = seed;
    c.validate();
    return c;
  }
};

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json rate_stats_json(const EventRateStats& s) {
  return {{"samples", s.rates.size()}, {"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max},
          {"histogram", {{"range", {0.0, 0.5}}, {"counts", s.histogram}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static image to event stream conversion"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "Convert an image folder tree into an event dataset");
  ConversionArgs conv_args;
  PipelineConfig pcfg;
  std::string layout = "both";
  conv_args.add_to(convert_cmd);
  convert_cmd->add_option("--input,--in", pcfg.input, "Root folder with one subfolder per class")->required();
  convert_cmd->add_option("--output,--out", pcfg.output, "Output dataset folder")->required();
  convert_cmd->add_option("--size", pcfg.preprocess.size, "Square resize target")->capture_default_str();
  convert_cmd->add_option("--flip-prob", pcfg.preprocess.flip_prob, "Horizontal flip probability")->capture_default_str();
  convert_cmd->add_option("--crop-pad", pcfg.preprocess.crop_pad, "Zero padding for random crops")->capture_default_str();
  convert_cmd->add_option("--layout", layout, "dense, sparse or both")->capture_default_str();
  convert_cmd->add_option("--workers,-j", pcfg.workers, "Worker threads (0 = all cores)")->capture_default_str();
  convert_cmd->add_option("--shard-size", pcfg.shard_size, "Samples per shard")->capture_default_str();
  convert_cmd->add_flag("--resume", pcfg.resume, "Reuse intact shards from an earlier run with the same config");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Event-rate statistics of a dataset or an image folder");
  ConversionArgs stats_args;
  std::string stats_dataset, stats_images, stats_sweep, stats_format = "json";
  int stats_size = 224;
  unsigned stats_workers = 1;
  stats_args.add_to(stats_cmd);
  auto* ds_opt = stats_cmd->add_option("--dataset", stats_dataset, "Converted dataset folder");
  auto* im_opt = stats_cmd->add_option("--images", stats_images, "Image folder (converted on the fly)");
  ds_opt->excludes(im_opt);
  stats_cmd->add_option("--size", stats_size, "Resize target for --images")->capture_default_str();
  stats_cmd->add_option("--sweep", stats_sweep, "from,to,points: mean rate over an s_th0 grid (CSV)");
  stats_cmd->add_option("--format", stats_format, "json or csv")->capture_default_str();
  stats_cmd->add_option("--workers,-j", stats_workers)->capture_default_str();

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "Find s_th0 for a target mean event rate");
  ConversionArgs cal_args;
  std::string cal_images;
  double target_rate = 0.0;
  int cal_size = 224;
  CalibrationOptions cal_opt;
  cal_args.add_to(cal_cmd);
  cal_cmd->add_option("--images", cal_images, "Calibration image folder")->required();
  cal_cmd->add_option("--target-rate", target_rate, "Target mean event rate in (0, 0.5)")->required();
  cal_cmd->add_option("--tolerance", cal_opt.tolerance, "Accepted |achieved - target|")->capture_default_str();
  cal_cmd->add_option("--size", cal_size, "Resize target")->capture_default_str();
  cal_cmd->add_option("--workers,-j", cal_opt.workers)->capture_default_str();

  // entropy
  auto* ent_cmd = app.add_subcommand("entropy", "Per-symbol Shannon entropy of image and event representations");
  ConversionArgs ent_args;
  std::string ent_images, ent_rep = "all";
  int ent_size = 224;
  unsigned ent_workers = 1;
  ent_args.add_to(ent_cmd);
  ent_cmd->add_option("--images", ent_images, "Image folder")->required();
  ent_cmd->add_option("--representation", ent_rep, "grayscale, value_map, event_stream or all")->capture_default_str();
  ent_cmd->add_option("--size", ent_size, "Resize target")->capture_default_str();
  ent_cmd->add_option("--workers,-j", ent_workers)->capture_default_str();

  // energy
  auto* energy_cmd = app.add_subcommand("energy", "First-layer energy comparison");
  energy::LayerSpec layer;
  energy::EnergyModel model;
  double e_mac_pj = 4.6, e_ac_pj = 0.9;
  std::uint64_t in_h = 224, in_w = 224, event_channels = 2;
  std::string energy_format = "json", energy_dataset;
  energy_cmd->add_option("--kernel", layer.kernel)->capture_default_str();
  energy_cmd->add_option("--c-in", layer.c_in)->capture_default_str();
  energy_cmd->add_option("--c-out", layer.c_out)->capture_default_str();
  energy_cmd->add_option("--h-out", layer.h_out)->capture_default_str();
  energy_cmd->add_option("--w-out", layer.w_out)->capture_default_str();
  energy_cmd->add_option("--e-mac", e_mac_pj, "pJ per multiply-accumulate")->capture_default_str();
  energy_cmd->add_option("--e-ac", e_ac_pj, "pJ per accumulate")->capture_default_str();
  auto* fr_opt = energy_cmd->add_option("--firing-rate", model.firing_rate, "Overrides the measured rate")
                     ->capture_default_str();
  energy_cmd->add_option("--dataset", energy_dataset, "Take the firing rate from this dataset's mean event rate");
  energy_cmd->add_option("--timesteps,-T", model.timesteps)->capture_default_str();
  energy_cmd->add_option("--height", in_h, "Encoder input height")->capture_default_str();
  energy_cmd->add_option("--width", in_w, "Encoder input width")->capture_default_str();
  energy_cmd->add_option("--event-channels", event_channels)->capture_default_str();
  energy_cmd->add_option("--format", energy_format, "json or markdown")->capture_default_str();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Time the fused conversion against the reference");
  ConversionArgs bench_args;
  std::string bench_images;
  int bench_size = 224, bench_repeats = 5, bench_synthetic = 32;
  bench_args.add_to(bench_cmd);
  bench_cmd->add_option("--images", bench_images, "Image folder (default: synthetic scenes)");
  bench_cmd->add_option("--synthetic", bench_synthetic, "Number of synthetic scenes")->capture_default_str();
  bench_cmd->add_option("--size", bench_size)->capture_default_str();
  bench_cmd->add_option("--repeats", bench_repeats)->capture_default_str();

  // validate
  auto* val_cmd = app.add_subcommand("validate", "Check a converted dataset");
  std::string val_dir;
  val_cmd->add_option("dataset", val_dir, "Dataset folder")->required();

  // kernels
  auto* ker_cmd = app.add_subcommand("kernels", "Print the kernels and presentation order");
  ConversionArgs ker_args;
  ker_args.add_to(ker_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*convert_cmd) {
      pcfg.conversion = conv_args.config();
      pcfg.layout = parse_layout(layout);
      const json m = run_pipeline(pcfg);
      print_json({{"output", pcfg.output.string()},
                  {"samples", m["stats"]["samples"]},
                  {"skipped", m["skipped"].size()},
                  {"shards", m["shards"].size()},
                  {"stats", m["stats"]},
                  {"timings", m["timings"]}});
    } else if (*stats_cmd) {
      if (stats_dataset.empty() == stats_images.empty()) {
        std::cerr << "stats: give exactly one of --dataset or --images\n";
        return kUsageError;
      }
      if (!stats_sweep.empty()) {
        if (stats_images.empty()) {
          std::cerr << "stats: --sweep needs --images\n";
          return kUsageError;
        }
        double from = 0, to = 0;
        int points = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(stats_sweep);
        if (!(in >> from >> c1 >> to >> c2 >> points) || c1 != ',' || c2 != ',') {
          std::cerr << "stats: --sweep expects from,to,points\n";
          return kUsageError;
        }
        const auto corpus = load_corpus(stats_images, stats_size);
        const RateCurve curve(corpus, stats_args.config(), stats_workers);
        std::cout << "s_th0,mean_event_rate\n";
        for (const auto& p : rate_sweep(curve, from, to, points)) {
          std::cout << csv_number(p.s_th0) << "," << csv_number(p.mean_rate) << "\n";
        }
        return 0;
      }
      std::vector<std::string> ids;
      std::vector<double> rates;
      if (!stats_dataset.empty()) {
        for_each_sample(stats_dataset, [&](const DatasetSample& s) {
          ids.push_back(s.id);
          rates.push_back(event_rate(s.volume));
        });
      } else {
        const auto corpus = load_corpus(stats_images, stats_size, &ids);
        rates = corpus_event_rates(corpus, stats_args.config(), stats_workers);
      }
      const auto st = summarize_rates(rates);
      if (stats_format == "csv") {
        std::cout << "id,event_rate\n";
        for (std::size_t i = 0; i < ids.size(); ++i) std::cout << ids[i] << "," << csv_number(rates[i]) << "\n";
      } else if (stats_format == "json") {
        print_json(rate_stats_json(st));
      } else {
        std::cerr << "stats: --format must be json or csv\n";
        return kUsageError;
      }
    } else if (*cal_cmd) {
      const auto cfg = cal_args.config();
      const auto corpus = load_corpus(cal_images, cal_size);
      const auto r = calibrate_s_th0(corpus, target_rate, cfg, cal_opt);
      print_json({{"target_rate", target_rate},
                  {"s_th0", r.s_th0},
                  {"achieved_rate", r.achieved_rate},
                  {"within_tolerance", r.within_tolerance},
                  {"tolerance", cal_opt.tolerance},
                  {"evaluations", r.evaluations},
                  {"images", corpus.size()}});
      if (!r.within_tolerance) return kDataError;
    } else if (*ent_cmd) {
      std::vector<Representation> reps;
      if (ent_rep == "all") {
        reps = {Representation::grayscale, Representation::value_map, Representation::event_stream};
      } else if (ent_rep == "grayscale") {
        reps = {Representation::grayscale};
      } else if (ent_rep == "value_map") {
        reps = {Representation::value_map};
      } else if (ent_rep == "event_stream") {
        reps = {Representation::event_stream};
      } else {
        std::cerr << "entropy: unknown representation '" << ent_rep << "'\n";
        return kUsageError;
      }
      const auto cfg = ent_args.config();
      const auto corpus = load_corpus(ent_images, ent_size);
      std::cout << "representation,alphabet,mean_bits,std_bits,images\n";
      for (auto rep : reps) {
        const auto r = entropy_report(corpus, rep, cfg, ent_workers);
        std::cout << to_string(rep) << "," << r.alphabet_size << "," << csv_number(r.mean) << ","
                  << csv_number(r.stddev) << "," << corpus.size() << "\n";
      }
    } else if (*energy_cmd) {
      if (!energy_dataset.empty() && fr_opt->count() == 0) {
        model.firing_rate = load_manifest(energy_dataset).at("stats").at("mean_event_rate").get<double>();
      }
      model.e_mac = e_mac_pj * energy::kPicojoule;
      model.e_ac = e_ac_pj * energy::kPicojoule;
      const auto c = energy::compare_first_layer(layer, model, in_h, in_w, event_channels);
      constexpr double uj = 1e6;
      if (energy_format == "json") {
        print_json({{"firing_rate", model.firing_rate},
                    {"timesteps", model.timesteps},
                    {"ann_ops", c.ann_ops},
                    {"snn_ops", c.snn_ops},
                    {"ann_uj", c.ann * uj},
                    {"snn_uj", c.snn * uj},
                    {"encoder_uj", c.encoder * uj},
                    {"snn_plus_encoder_uj", c.total() * uj},
                    {"reduction_snn_only", c.reduction_snn_only()},
                    {"reduction", c.reduction()}});
      } else if (energy_format == "markdown") {
        std::printf("| quantity | value |\n|---|---|\n");
        std::printf("| firing rate | %.4f |\n", model.firing_rate);
        std::printf("| timesteps | %llu |\n", static_cast<unsigned long long>(model.timesteps));
        std::printf("| ANN ops | %llu |\n", static_cast<unsigned long long>(c.ann_ops));
        std::printf("| SNN ops | %llu |\n", static_cast<unsigned long long>(c.snn_ops));
        std::printf("| ANN energy (uJ) | %.4f |\n", c.ann * uj);
        std::printf("| SNN energy (uJ) | %.4f |\n", c.snn * uj);
        std::printf("| encoder energy (uJ) | %.4f |\n", c.encoder * uj);
        std::printf("| SNN + encoder (uJ) | %.4f |\n", c.total() * uj);
        std::printf("| reduction, SNN only | %.2fx |\n", c.reduction_snn_only());
        std::printf("| reduction, SNN + encoder | %.2fx |\n", c.reduction());
      } else {
        std::cerr << "energy: --format must be json or markdown\n";
        return kUsageError;
      }
    } else if (*bench_cmd) {
      std::vector<RgbImage> images;
      if (!bench_images.empty()) {
        images = load_corpus(bench_images, bench_size);
      } else {
        for (int i = 0; i < bench_synthetic; ++i) {
          images.push_back(synthetic::scene(bench_size, bench_size, static_cast<std::uint64_t>(i)));
        }
      }
      print_json(to_json(bench(images, bench_args.config(), bench_repeats)));
    } else if (*val_cmd) {
      const auto r = validate_dataset(val_dir);
      print_json({{"ok", r.ok},
                  {"samples", r.samples},
                  {"shards", r.shards},
                  {"mean_event_rate", r.mean_event_rate},
                  {"errors", r.errors}});
      if (!r.ok) return kDataError;
    } else if (*ker_cmd) {
      const auto cfg = ker_args.config();
      json j = kernels_to_json(kernels_for(cfg), cfg.order);
      j["augment"] = to_string(cfg.augment);
      j["seed"] = cfg.seed;
      print_json(j);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}

// Copyright 2026 The DRNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "drnet/checkpoint.hpp"
#include "drnet/data.hpp"
#include "drnet/evaluation.hpp"
#include "drnet/image_io.hpp"
#include "drnet/oracles.hpp"
#include "drnet/report.hpp"
#include "drnet/run_config.hpp"
#include "drnet/training.hpp"

namespace drnet::cli {
namespace fs = std::filesystem;
namespace {

using Model = DRNet<float>;

/// Resolves the run configuration: file, then environment, then flags.
RunConfig resolve_config(const std::string& config_path, const std::vector<std::string>& overrides) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
  cfg.apply_environment();
  cfg.apply_args(overrides);
  cfg.validate();
  return cfg;
}

LoadOptions load_options(const RunConfig& cfg) {
  LoadOptions o;
  o.gt_threshold = cfg.gt_threshold;
  return o;
}

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// ---------------------------------------------------------------- train

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.data_root.empty()) throw ConfigError("data.root is not set (use --data-root or DRNET_DATA_ROOT)");
  const fs::path dir = cfg.output_dir;
  if (fs::exists(dir / "config.txt")) {
    throw ConfigError("output directory " + dir.string() + " already holds a completed run");
  }

  std::vector<ImageSample> all = load_dataset(cfg.data_root, cfg.layout, load_options(cfg));
  const size_t pool_size = std::min(all.size(), static_cast<size_t>(cfg.train_count));
  std::vector<ImageSample> pool(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(pool_size));
  std::vector<ImageSample> test(all.begin() + static_cast<std::ptrdiff_t>(pool_size), all.end());
  if (!cfg.test_root.empty()) test = load_dataset(cfg.test_root, cfg.test_layout, load_options(cfg));

  const int64_t size = cfg.model.input_size;
  for (auto& s : pool) s = pad_to(s, size, cfg.pad_anchor);
  DatasetSplit split = split_train_val(pool, cfg.val_fraction, cfg.seed);
  split.test = std::move(test);
  err << "dataset " << cfg.data_root << ": train/val/test = " << split.train.size() << "/" << split.val.size()
      << "/" << split.test.size() << "\n";

  fs::create_directories(dir);
  cfg.save(dir / "config.txt");

  Model model = Model::build(cfg.model, cfg.seed);
  err << "model: " << model.parameter_count() << " parameters, input " << size << "x" << size << "\n";
  const auto result = train(model, split, cfg.train, [&](const EpochRecord& r) {
    err << "epoch " << r.epoch << "/" << cfg.train.epochs << "  train_loss " << fmt(r.train_loss, "%.6f")
        << "  val_loss " << fmt(r.val_loss, "%.6f") << "  val_acc " << fmt(r.val_accuracy) << "  "
        << fmt(r.wall_time, "%.2f") << "s\n";
  });

  write_history_csv(dir / "history.csv", result.history);
  save_checkpoint(dir / "best.ckpt", cfg.model, result.best);
  save_checkpoint(dir / "final.ckpt", cfg.model, result.last);
  out << "best epoch " << result.history.best_epoch << ", run written to " << dir.string() << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- predict

struct PredictArgs {
  std::string checkpoint, image, gt, fov, out_dir = ".";
  bool raw = false;
};

int cmd_predict(const RunConfig& cfg, const PredictArgs& a, std::ostream& out, std::ostream& err) {
  const Model model = load_model<float>(a.checkpoint);
  ImageSample sample = load_sample(a.image, a.gt, a.fov, load_options(cfg));
  const ModelPredictor<float> predictor(model);
  // Pads to the model input when needed and crops back to the original size.
  const Tensor<double> prob = predict_sample(predictor, sample);

  Tensor<uint8_t> mask(prob.dims());
  for (int64_t i = 0; i < prob.size(); ++i) mask[i] = prob[i] > cfg.eval.threshold ? 255 : 0;

  const fs::path dir = a.out_dir;
  fs::create_directories(dir);
  const std::string stem = sample.id;
  write_png(dir / (stem + "_prob.png"), to_gray8(prob));
  write_png(dir / (stem + "_mask.png"), mask);
  if (a.raw) write_npy(dir / (stem + "_prob.npy"), prob);
  err << "wrote " << (dir / (stem + "_prob.png")).string() << " and " << (dir / (stem + "_mask.png")).string()
      << "\n";

  if (!a.gt.empty()) {
    Tensor<double> image(prob.dims());
    for (int64_t i = 0; i < image.size(); ++i) image[i] = sample.image[i];
    Tensor<uint8_t> gt(sample.gt_mask.dims());
    for (int64_t i = 0; i < gt.size(); ++i) gt[i] = sample.gt_mask[i] ? 255 : 0;
    // Real image | segmentation | ground truth.
    write_png(dir / (stem + "_overlay.png"), hconcat({to_gray8(image), mask, gt}));

    const Tensor<uint8_t>* fov = cfg.eval.use_fov && sample.fov_mask ? &*sample.fov_mask : nullptr;
    const ImageMetrics m = image_metrics(sample.id, prob, sample.gt_mask, fov, cfg.eval.threshold);
    write_per_image_csv(dir / (stem + "_metrics.csv"), {m});
    auto show = [&](const char* name, const std::optional<double>& v) {
      out << name << " " << (v ? fmt(*v) : std::string("undefined")) << "\n";
    };
    show("Sen", m.values.sen);
    show("Spe", m.values.spe);
    show("Acc", m.values.acc);
    show("AUC", m.values.auc);
    show("MCC", m.values.mcc);
  }
  return kExitOk;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string checkpoint;
  std::string predictor = "model";
  std::string subset = "auto";
  /// Defaults to "DRNet (this run)", or the predictor name for test doubles.
  std::string method;
};

int cmd_evaluate(const RunConfig& cfg, const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  // Which images: an explicit test root, else the images after the training pool.
  const bool use_test_root = !cfg.test_root.empty();
  if (!use_test_root && cfg.data_root.empty()) {
    throw ConfigError("no dataset: set --data-root or --test-root (or DRNET_DATA_ROOT)");
  }
  const fs::path root = use_test_root ? cfg.test_root : cfg.data_root;
  const DatasetLayout layout = use_test_root ? cfg.test_layout : cfg.layout;
  std::vector<ImageSample> samples = load_dataset(root, layout, load_options(cfg));
  if (a.subset == "held-out" || (a.subset == "auto" && !use_test_root)) {
    const size_t skip = std::min(samples.size(), static_cast<size_t>(cfg.train_count));
    samples.erase(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(skip));
    if (samples.empty()) {
      throw ConfigError("no held-out images: " + root.string() + " has no images after the first " +
                        std::to_string(cfg.train_count) + " (use --subset all)");
    }
  }

  std::unique_ptr<Predictor> predictor;
  std::optional<Model> model;
  if (a.predictor == "gt-oracle") {
    predictor = std::make_unique<GroundTruthOracle>();
  } else {
    if (a.checkpoint.empty()) throw ConfigError("evaluate: --checkpoint is required for the model predictor");
    model.emplace(load_model<float>(a.checkpoint));
    predictor = std::make_unique<ModelPredictor<float>>(*model);
  }
  err << "evaluating " << predictor->name() << " on " << samples.size() << " images from " << root.string()
      << (cfg.eval.use_fov ? " inside the field of view" : "") << "\n";

  const std::string method = !a.method.empty() ? a.method : model ? "DRNet (this run)" : predictor->name();
  const MetricsReport report = evaluate_dataset(*predictor, samples, cfg.eval);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  write_metrics_csv(dir / "metrics.csv", report_rows(report, method));
  write_roc_csv(dir / "roc.csv", report.roc);
  write_per_image_csv(dir / "per_image.csv", report.images);
  const std::string markdown = render_report(layout, report, method);
  std::ofstream(dir / "report.md") << markdown;
  out << markdown;
  return kExitOk;
}

// ------------------------------------------------------------- selftest

int cmd_selftest(uint64_t seed, bool quick, bool corrupt_mcc, std::ostream& out) {
  oracle::SelftestOptions o;
  o.seed = seed;
  o.quick = quick;
  if (corrupt_mcc) o.mcc = oracle::corrupted_mcc;
  bool all = true;
  for (const auto& r : oracle::run_selftest(o)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << fmt(r.seconds, "%.1f") << "s): " << r.detail << "\n";
    all = all && r.passed;
  }
  out << (all ? "selftest passed" : "selftest FAILED") << "\n";
  return all ? kExitOk : kExitPipelineError;
}

// --------------------------------------------------------------- report

int cmd_report(const std::string& layout_name, const std::vector<std::string>& metrics, const std::string& out_path,
               std::ostream& out) {
  const DatasetLayout layout = parse_layout(layout_name);
  std::vector<TableRow> rows;
  for (const auto& path : metrics) {
    for (TableRow r : read_metrics_csv(path)) {
      // The CSV keeps full precision; the table prints four decimals.
      for (std::string* v : {&r.sen, &r.spe, &r.acc, &r.auc, &r.mcc}) {
        char* end = nullptr;
        const double x = std::strtod(v->c_str(), &end);
        if (!v->empty() && *end == '\0') *v = fmt(x);
      }
      rows.push_back(std::move(r));
    }
  }
  const std::string markdown = render_report(layout, rows);
  if (!out_path.empty()) std::ofstream(out_path) << markdown;
  out << markdown;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"DRNet retinal vessel segmentation", "drnet"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  const char* overrides_help =
      "Any RunConfig key can be given as a flag, e.g. --epochs 2 --model.encoder-steps 2 --data-root DIR";
  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration file (key = value)");
    sub->allow_extras();
    sub->footer(overrides_help);
  };

  CLI::App* train_cmd = app.add_subcommand("train", "Train a model and write a run directory");
  add_config(train_cmd);

  PredictArgs pa;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Segment one image");
  add_config(predict_cmd);
  predict_cmd->add_option("--checkpoint", pa.checkpoint, "Model checkpoint")->required();
  predict_cmd->add_option("--image", pa.image, "Input image")->required();
  predict_cmd->add_option("--gt", pa.gt, "Ground-truth annotation (enables overlay and metrics)");
  predict_cmd->add_option("--mask", pa.fov, "Field-of-view mask");
  predict_cmd->add_option("--out", pa.out_dir, "Output directory");
  predict_cmd->add_flag("--raw", pa.raw, "Also write the full-precision map as .npy");

  EvaluateArgs ea;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset");
  add_config(eval_cmd);
  eval_cmd->add_option("--checkpoint", ea.checkpoint, "Model checkpoint");
  eval_cmd->add_option("--predictor", ea.predictor, "model or gt-oracle")
      ->check(CLI::IsMember({"model", "gt-oracle"}));
  eval_cmd->add_option("--subset", ea.subset, "auto, all, or held-out")
      ->check(CLI::IsMember({"auto", "all", "held-out"}));
  eval_cmd->add_option("--method", ea.method, "Method name for the result rows");

  uint64_t st_seed = 2019;
  bool st_quick = false, st_corrupt = false;
  CLI::App* self_cmd = app.add_subcommand("selftest", "Run the oracle suites");
  self_cmd->add_option("--seed", st_seed, "Seed for every suite");
  self_cmd->add_flag("--quick", st_quick, "Smaller instance counts");
  self_cmd->add_flag("--corrupt-mcc", st_corrupt, "Check the suites against a broken MCC");

  std::string rp_layout = "iostar", rp_out;
  std::vector<std::string> rp_metrics;
  CLI::App* report_cmd = app.add_subcommand("report", "Render a comparison table");
  report_cmd->add_option("--layout", rp_layout, "iostar or rcslo");
  report_cmd->add_option("--metrics", rp_metrics, "Metrics CSV files whose rows follow the published ones");
  report_cmd->add_option("--out", rp_out, "Also write the markdown to this file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    if (*self_cmd) return cmd_selftest(st_seed, st_quick, st_corrupt, out);
    if (*report_cmd) return cmd_report(rp_layout, rp_metrics, rp_out, out);
    for (CLI::App* sub : {train_cmd, predict_cmd, eval_cmd}) {
      if (!*sub) continue;
      const RunConfig cfg = resolve_config(config_path, sub->remaining());
      if (sub == train_cmd) return cmd_train(cfg, out, err);
      if (sub == predict_cmd) return cmd_predict(cfg, pa, out, err);
      return cmd_evaluate(cfg, ea, out, err);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPipelineError;
  }
  return kExitConfigError;
}

}  // namespace drnet::cli

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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "drnet/image_io.hpp"
#include "drnet/report.hpp"
#include "drnet/synthetic.hpp"
#include "test_support.hpp"

namespace drnet {
namespace {

namespace fs = std::filesystem;
using testing::ScratchDir;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the wall-time column, the only field allowed to differ between runs.
std::string without_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  for (std::string line; std::getline(in, line);) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

// Six 32x32 synthetic images: five form the training pool, one is held out.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ScratchDir("cli");
    write_synthetic_dataset(dir_->path() / "data", 6, 32, 32, 3);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static std::vector<std::string> train_args(const fs::path& out) {
    return {"train",         "--data-root",           (dir_->path() / "data").string(),
            "--out",         out.string(),            "--epochs",
            "2",             "--model.initial-channels", "2",
            "--model.encoder-steps", "2",             "--model.input-size",
            "32",            "--model.block-size",    "3",
            "--data.train-count", "5",                "--data.val-fraction",
            "0.2",           "--seed",                "4"};
  }

  static fs::path trained_run() {
    const fs::path run = dir_->path() / "run";
    if (!fs::exists(run / "best.ckpt")) {
      const CliRun r = cli(train_args(run));
      EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    }
    return run;
  }

  static ScratchDir* dir_;
};

ScratchDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, HelpExitsZero) {
  const CliRun r = cli({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("train"), std::string::npos);
  EXPECT_NE(r.out.find("evaluate"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, cli::kExitConfigError);
  EXPECT_EQ(cli({"bogus"}).code, cli::kExitConfigError);
  EXPECT_EQ(cli({"predict", "--image", "x.png"}).code, cli::kExitConfigError);  // no checkpoint
  EXPECT_EQ(cli({"train"}).code, cli::kExitConfigError);                          // no data root
  EXPECT_EQ(cli({"train", "--data-root", "x", "--epochs", "zero"}).code, cli::kExitConfigError);
  EXPECT_EQ(cli({"train", "--data-root", "x", "--no.such-key", "1"}).code, cli::kExitConfigError);
}

TEST_F(CliTest, PipelineErrorsExitOne) {
  const CliRun r = cli({"train", "--data-root", (dir_->path() / "missing").string(), "--out",
                     (dir_->path() / "never").string()});
  EXPECT_EQ(r.code, cli::kExitPipelineError);
  EXPECT_NE(r.err.find("images"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"predict", "--checkpoint", (dir_->path() / "missing.ckpt").string(), "--image", "x.png"}).code,
            cli::kExitPipelineError);
}

TEST_F(CliTest, TrainWritesRunDirectoryAndLogsSplit) {
  const fs::path run = dir_->path() / "run_log";
  const CliRun r = cli(train_args(run));
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.err.find("train/val/test = 4/1/1"), std::string::npos) << r.err;
  for (const char* f : {"config.txt", "history.csv", "best.ckpt", "final.ckpt"}) {
    EXPECT_TRUE(fs::exists(run / f)) << f;
  }
  const std::string config = read_file(run / "config.txt");
  EXPECT_NE(config.find("train.epochs = 2"), std::string::npos) << config;
  EXPECT_NE(config.find("model.initial_channels = 2"), std::string::npos) << config;

  // A completed run directory is never overwritten.
  EXPECT_EQ(cli(train_args(run)).code, cli::kExitConfigError);
}

TEST_F(CliTest, SameSeedGivesIdenticalHistory) {
  const fs::path a = trained_run(), b = dir_->path() / "run_again";
  const CliRun r = cli(train_args(b));
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(without_wall_time(read_file(a / "history.csv")), without_wall_time(read_file(b / "history.csv")));
  EXPECT_EQ(read_file(a / "best.ckpt"), read_file(b / "best.ckpt"));
}

TEST_F(CliTest, ConfigFileReproducesRun) {
  const fs::path run = trained_run(), again = dir_->path() / "from_config";
  const CliRun r = cli({"train", "--config", (run / "config.txt").string(), "--out", again.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(without_wall_time(read_file(run / "history.csv")), without_wall_time(read_file(again / "history.csv")));
}

TEST_F(CliTest, PredictWritesMapsAtOriginalSize) {
  const fs::path run = trained_run(), out = dir_->path() / "pred";
  // A smaller image than the model input is padded and cropped back.
  const ImageSample s = make_synthetic_sample(20, 24, 77);
  Tensor<uint8_t> img(s.gt_mask.dims()), gt(s.gt_mask.dims());
  for (int64_t i = 0; i < img.size(); ++i) {
    img[i] = static_cast<uint8_t>(std::lround(255 * s.image[i]));
    gt[i] = s.gt_mask[i] ? 255 : 0;
  }
  write_png(dir_->path() / "small.png", img);
  write_png(dir_->path() / "small_gt.png", gt);

  const CliRun r = cli({"predict", "--checkpoint", (run / "best.ckpt").string(), "--image",
                     (dir_->path() / "small.png").string(), "--gt", (dir_->path() / "small_gt.png").string(), "--out",
                     out.string(), "--raw"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const Tensor<uint8_t> prob = read_gray8(out / "small_prob.png");
  const Tensor<uint8_t> mask = read_gray8(out / "small_mask.png");
  EXPECT_EQ(prob.dims(), (Dims{20, 24}));
  EXPECT_EQ(mask.dims(), (Dims{20, 24}));
  for (uint8_t v : mask.values()) ASSERT_TRUE(v == 0 || v == 255);
  EXPECT_EQ(read_gray8(out / "small_overlay.png").dims(), (Dims{20, 72}));

  // The 8-bit map is round(255 p) of the raw probabilities.
  const Tensor<double> raw = read_npy(out / "small_prob.npy");
  ASSERT_EQ(raw.dims(), (Dims{20, 24}));
  for (int64_t i = 0; i < raw.size(); ++i) ASSERT_EQ(prob[i], std::lround(255 * raw[i]));
  EXPECT_NE(r.out.find("MCC"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "small_metrics.csv"));
}

TEST_F(CliTest, PredictAndEvaluateAgreeOnAnImage) {
  const fs::path run = trained_run(), raw = dir_->path() / "pred_raw", pred = dir_->path() / "pred_one",
                 eval = dir_->path() / "eval_one";
  const fs::path data = dir_->path() / "data";
  const std::string ckpt = (run / "best.ckpt").string(), image = (data / "images" / "img_005.png").string();
  CliRun r = cli({"predict", "--checkpoint", ckpt, "--image", image, "--out", raw.string(), "--raw"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  // A barely trained model may predict no vessels at 0.5, which leaves MCC
  // undefined; a threshold strictly inside the probability range gives both classes.
  const Tensor<double> prob = read_npy(raw / "img_005_prob.npy");
  const auto [lo, hi] = std::minmax_element(prob.values().begin(), prob.values().end());
  ASSERT_LT(*lo, *hi);
  char threshold[32];
  std::snprintf(threshold, sizeof threshold, "%.17g", 0.5 * (*lo + *hi));

  r = cli({"predict", "--checkpoint", ckpt, "--image", image, "--gt", (data / "GT" / "img_005_GT.png").string(),
           "--out", pred.string(), "--threshold", threshold});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  r = cli({"evaluate", "--checkpoint", ckpt, "--data-root", data.string(), "--data.train-count", "5", "--out",
           eval.string(), "--threshold", threshold});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto a = read_per_image_csv(pred / "img_005_metrics.csv");
  const auto b = read_per_image_csv(eval / "per_image.csv");
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);  // only the held-out image
  EXPECT_EQ(a[0].id, b[0].id);
  EXPECT_EQ(a[0].counts, b[0].counts);
  EXPECT_EQ(a[0].values.mcc, b[0].values.mcc);
  EXPECT_EQ(a[0].values.auc, b[0].values.auc);
  EXPECT_NE(r.out.find("DRNet (this run)"), std::string::npos);
}

TEST_F(CliTest, EvaluateWithGroundTruthOracleScoresOne) {
  const fs::path out = dir_->path() / "oracle";
  const CliRun r = cli({"evaluate", "--predictor", "gt-oracle", "--subset", "all", "--data-root",
                     (dir_->path() / "data").string(), "--out", out.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rows = read_metrics_csv(out / "metrics.csv");
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0].method, "ground-truth oracle");
  for (const std::string* v : {&rows[0].sen, &rows[0].spe, &rows[0].acc, &rows[0].auc, &rows[0].mcc}) {
    EXPECT_EQ(std::stod(*v), 1.0);
  }
  EXPECT_NE(r.out.find("| ground-truth oracle | - | 1.0000 | 1.0000 | 1.0000 | 1.0000 | 1.0000 |"),
            std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find(render_baselines(DatasetLayout::kIostar)), std::string::npos);
  EXPECT_EQ(read_file(out / "report.md"), r.out);
  EXPECT_TRUE(fs::exists(out / "roc.csv"));
}

TEST_F(CliTest, EvaluateNeedsHeldOutImagesOrCheckpoint) {
  const std::string data = (dir_->path() / "data").string();
  EXPECT_EQ(cli({"evaluate", "--predictor", "gt-oracle", "--data-root", data, "--data.train-count", "6", "--out",
                 (dir_->path() / "e1").string()})
                .code,
            cli::kExitConfigError);
  EXPECT_EQ(cli({"evaluate", "--data-root", data, "--out", (dir_->path() / "e2").string()}).code,
            cli::kExitConfigError);
}

TEST_F(CliTest, ReportRendersBaselinesAndExtraRows) {
  const fs::path csv = dir_->path() / "extra.csv";
  write_metrics_csv(csv, {{"Mine", "-", "0.812345", "0.98", "0.97", "0.99", "0.8"}});
  const CliRun r = cli({"report", "--layout", "rcslo", "--metrics", csv.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find(render_baselines(DatasetLayout::kRcslo)), std::string::npos);
  EXPECT_NE(r.out.find("| Mine | - | 0.8123 | 0.9800 | 0.9700 | 0.9900 | 0.8000 |"), std::string::npos) << r.out;
  EXPECT_EQ(cli({"report", "--layout", "drive"}).code, cli::kExitConfigError);
}

TEST_F(CliTest, SelftestQuickPassesAndDetectsBrokenMcc) {
  CliRun r = cli({"selftest", "--quick"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.out;
  EXPECT_NE(r.out.find("selftest passed"), std::string::npos);
  r = cli({"selftest", "--quick", "--corrupt-mcc"});
  EXPECT_EQ(r.code, cli::kExitPipelineError);
  EXPECT_NE(r.out.find("FAIL metric oracle"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace drnet

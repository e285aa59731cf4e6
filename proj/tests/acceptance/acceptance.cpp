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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails or exceeds its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "drnet/evaluation.hpp"
#include "drnet/model.hpp"
#include "drnet/oracles.hpp"
#include "drnet/report.hpp"
#include "drnet/synthetic.hpp"
#include "drnet/training.hpp"

namespace {

using namespace drnet;

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

constexpr uint64_t kSeed = 2019;

Outcome from_suite(oracle::SuiteResult (*suite)(const oracle::SelftestOptions&)) {
  oracle::SelftestOptions o;
  o.seed = kSeed;
  const oracle::SuiteResult r = suite(o);
  return {r.passed, r.detail};
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Shape and determinism on a full-size input with the default widths.
Outcome shape_and_determinism() {
  const ModelConfig config;  // 1024 x 1024, 16 initial channels, 4 encoder steps
  const auto model = DRNet<float>::build(config, kSeed);
  const ImageSample s = make_synthetic_sample(config.input_size, config.input_size, kSeed);

  const Tensor<float> a = model.predict(s.image);
  const Tensor<float> b = model.predict(s.image);
  bool in_range = a.dims() == Dims{1, 1, 1024, 1024};
  for (float v : a.values()) in_range = in_range && v > 0.0f && v < 1.0f;
  const bool repeatable = std::memcmp(a.data(), b.data(), sizeof(float) * static_cast<size_t>(a.size())) == 0;

  ModelConfig full_keep = config;
  full_keep.keep_prob = 1.0;
  const auto kept = DRNet<float>::build(full_keep, kSeed);
  const bool train_equals_eval = kept.predict(s.image, /*training=*/true, 77) == kept.predict(s.image);

  std::ostringstream d;
  d << "output " << shape_string(a.dims()) << (in_range ? " in (0,1)" : " OUT OF RANGE")
    << ", repeated inference " << (repeatable ? "identical" : "differs") << ", keep_prob=1 training "
    << (train_equals_eval ? "equals" : "differs from") << " inference";
  return {in_range && repeatable && train_equals_eval, d.str()};
}

// Overfits one synthetic sample. DropBlock stays on at the default keep_prob;
// the block shrinks to 3 so it fits the 8x8 bottleneck of a 64 px input.
Outcome overfit() {
  ModelConfig config;
  config.encoder_steps = 3;
  config.input_size = 64;
  config.block_size = 3;
  auto model = DRNet<float>::build(config, kSeed);

  DatasetSplit split;
  split.train.push_back(make_synthetic_sample(64, 64, kSeed));
  split.val = split.train;  // training-set accuracy is the tracked metric
  TrainConfig tc;
  tc.epochs = 200;
  tc.batch_size = 1;
  tc.learning_rate = 1e-2;  // 200 single-sample steps are too few at 1e-3
  tc.seed = kSeed;
  const auto result = train(model, split, tc);

  const double first = result.history.epochs.front().train_loss;
  const double last = result.history.epochs.back().train_loss;
  const double acc = result.history.epochs.back().val_accuracy;
  const bool ok = last < 0.1 * first && acc > 0.95;
  std::ostringstream d;
  d << "training loss " << fixed(first) << " -> " << fixed(last) << " (" << fixed(100 * last / first, 1)
    << "% of initial, need < 10%), training-set Acc " << fixed(acc) << " (need > 0.95)";
  return {ok, d.str()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Ground-truth oracle evaluation and the rendered comparison tables.
Outcome report_fidelity() {
  std::vector<ImageSample> samples;
  SyntheticOptions with_fov;
  with_fov.fov = true;
  for (uint64_t i = 0; i < 6; ++i) samples.push_back(make_synthetic_sample(96 + 8 * i, 80, kSeed + i, with_fov));
  EvaluationOptions eo;
  bool ones = true;
  for (bool fov : {false, true}) {
    eo.use_fov = fov;
    const MetricsReport r = evaluate_dataset(GroundTruthOracle(), samples, eo);
    for (double v : {r.pooled.sen, r.pooled.spe, r.pooled.acc, r.pooled.auc, r.pooled.mcc}) ones = ones && v == 1.0;
  }
  const MetricsReport r = evaluate_dataset(GroundTruthOracle(), samples);
  const std::string header = "| Method | Year | Sen | Spe | Acc | AUC | MCC |\n";

  bool layout = true, baselines = true;
  for (auto [l, file] : {std::pair{DatasetLayout::kIostar, "iostar.md"}, {DatasetLayout::kRcslo, "rcslo.md"}}) {
    const std::string reference = read_file(std::string(DRNET_DATA_DIR) + "/baselines/" + file);
    const std::string md = render_report(l, r, "ground-truth oracle");
    baselines = baselines && !reference.empty() && render_baselines(l) == reference &&
                md.find(reference) != std::string::npos;
    layout = layout && md.find(header) != std::string::npos &&
             md.find("| ground-truth oracle | - | 1.0000 | 1.0000 | 1.0000 | 1.0000 | 1.0000 |\n") !=
                 std::string::npos;
  }
  std::ostringstream d;
  d << "oracle metrics " << (ones ? "all exactly 1.0" : "NOT all 1.0") << " (with and without FOV), table layout "
    << (layout ? "matches" : "differs") << ", baseline rows " << (baselines ? "byte-identical" : "differ")
    << " to data/baselines";
  return {ones && layout && baselines, d.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "metric oracle equivalence", 30, [] { return from_suite(oracle::metric_suite); }},
      {2, "AUC dual-path agreement", 60, [] { return from_suite(oracle::auc_suite); }},
      {3, "DropBlock statistics", 60, [] { return from_suite(oracle::dropblock_suite); }},
      {4, "gradient fidelity", 300, [] { return from_suite(oracle::gradient_suite); }},
      {5, "shape and determinism contract", 120, shape_and_determinism},
      {6, "overfit smoke test", 600, overfit},
      {7, "pipeline round-trips", 30, [] { return from_suite(oracle::roundtrip_suite); }},
      {8, "report fidelity", 30, report_fidelity},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = o.passed && in_time;
    failures += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << " [" << fixed(seconds, 1)
              << "s / " << c.budget_seconds << "s" << (in_time ? "" : " OVER BUDGET") << "]: " << o.detail
              << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}

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

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "drnet/checkpoint.hpp"
#include "drnet/data.hpp"
#include "drnet/oracles.hpp"
#include "drnet/rng.hpp"
#include "drnet/synthetic.hpp"

namespace drnet::oracle {
namespace {

constexpr double kMetricTol = 1e-12;
constexpr double kAucTol = 1e-9;

template <typename F>
SuiteResult timed(const std::string& name, F&& body) {
  SuiteResult r;
  r.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    std::ostringstream detail;
    r.passed = body(detail);
    r.detail = detail.str();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Tensor<uint8_t> random_binary(int64_t h, int64_t w, double p, Rng& rng) {
  Tensor<uint8_t> t({h, w});
  for (auto& v : t.values()) v = rng.uniform() < p ? 1 : 0;
  return t;
}

// Compares a library metric with the exact value; undefined must raise.
template <typename F>
bool metric_agrees(F&& f, double exact, const char* what, std::ostream& detail) {
  try {
    const double v = f();
    if (std::isnan(exact) || std::abs(v - exact) > kMetricTol) {
      detail << what << ": library " << v << " vs exact " << exact << "; ";
      return false;
    }
  } catch (const UndefinedMetricError&) {
    if (!std::isnan(exact)) {
      detail << what << ": library raised but exact value is " << exact << "; ";
      return false;
    }
  }
  return true;
}

std::filesystem::path scratch_dir(const std::string& tag, uint64_t seed) {
  auto dir = std::filesystem::temp_directory_path() /
             ("drnet_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(seed));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

SuiteResult metric_suite(const SelftestOptions& options) {
  const MccFunction mcc_under_test = options.mcc ? options.mcc : MccFunction([](const ConfusionCounts& c) { return mcc(c); });
  return timed("metric oracle equivalence", [&](std::ostream& detail) {
    Rng rng(mix_seed(options.seed, 11));
    const int instances = options.quick ? 100 : 500;
    int failures = 0;
    for (int i = 0; i < instances; ++i) {
      const int64_t h = 1 + static_cast<int64_t>(rng.below(64)), w = 1 + static_cast<int64_t>(rng.below(64));
      const double pg = rng.uniform(), pp = rng.uniform();
      const Tensor<uint8_t> gt = random_binary(h, w, pg, rng);
      Tensor<uint8_t> pred = random_binary(h, w, pp, rng);
      // Some predictions are noisy copies of the ground truth.
      if (i % 3 == 0) {
        for (int64_t k = 0; k < pred.size(); ++k) pred[k] = rng.uniform() < 0.1 ? 1 - gt[k] : gt[k];
      }
      std::optional<Tensor<uint8_t>> fov;
      if (i % 4 == 1) fov = random_binary(h, w, 0.8, rng);
      const Tensor<uint8_t>* fp = fov ? &*fov : nullptr;

      const ConfusionCounts lib = confusion_counts(pred, gt, fp);
      const ConfusionCounts ref = naive_counts(pred, gt, fp);
      bool ok = lib == ref;
      if (!ok) detail << "counts differ on instance " << i << "; ";
      const ExactMetrics ex = exact_metrics(ref);
      ok = metric_agrees([&] { return sensitivity(lib); }, ex.sen, "sen", detail) && ok;
      ok = metric_agrees([&] { return specificity(lib); }, ex.spe, "spe", detail) && ok;
      ok = metric_agrees([&] { return accuracy(lib); }, ex.acc, "acc", detail) && ok;
      ok = metric_agrees([&] { return mcc_under_test(lib); }, ex.mcc, "mcc", detail) && ok;
      if (!ok && ++failures >= 3) break;
    }
    if (failures == 0) detail << instances << " instances agree to " << kMetricTol;
    return failures == 0;
  });
}

SuiteResult auc_suite(const SelftestOptions& options) {
  return timed("auc dual-path agreement", [&](std::ostream& detail) {
    Rng rng(mix_seed(options.seed, 12));
    const int instances = options.quick ? 50 : 200;
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
      const size_t n = 2 + rng.below(199);
      std::vector<double> scores(n);
      std::vector<uint8_t> labels(n);
      // Half the instances draw from a handful of levels to force heavy ties.
      const uint64_t levels = i % 2 == 0 ? 1 + rng.below(5) : 0;
      for (size_t k = 0; k < n; ++k) {
        labels[k] = rng.uniform() < 0.4 ? 1 : 0;
        const double u = rng.uniform();
        scores[k] = levels ? std::floor(u * levels) / levels : u;
        if (labels[k] && !levels) scores[k] = std::min(1.0, scores[k] + 0.2 * rng.uniform());
      }
      labels[0] = 1;
      labels[1] = 0;
      const double a = auc_trapezoid(scores, labels), b = auc_rank(scores, labels);
      const double c = pairwise_auc(scores, labels);
      worst = std::max({worst, std::abs(a - b), std::abs(a - c), std::abs(b - c)});
    }
    detail << instances << " instances, max disagreement " << worst;
    return worst <= kAucTol;
  });
}

SuiteResult dropblock_suite(const SelftestOptions& options) {
  return timed("dropblock statistics", [&](std::ostream& detail) {
    const DropBlockStats st = dropblock_statistics(options.quick ? 200 : 1000, 32, 7, 0.86, mix_seed(options.seed, 13));
    detail << "mean zeroed " << st.mean_zeroed_fraction << " (expected " << st.expected_zeroed_fraction
           << ", target 0.14 +- 0.02), unstructured masks " << st.unstructured_masks << ", inference identity "
           << (st.inference_identity ? "yes" : "no");
    return std::abs(st.mean_zeroed_fraction - 0.14) <= 0.02 && st.unstructured_masks == 0 && st.inference_identity;
  });
}

SuiteResult gradient_suite(const SelftestOptions& options) {
  return timed("gradient fidelity", [&](std::ostream& detail) {
    GradCheckOptions o;
    o.seed = options.seed;
    o.samples_per_group = options.quick ? 10 : 50;
    const GradCheckReport d = gradient_check<double>(o);
    const GradCheckReport f = gradient_check<float>(o);
    detail << "double max rel err " << d.max_rel_error << " (< 1e-5), float " << f.max_rel_error << " (< 1e-3)";
    return d.max_rel_error < 1e-5 && f.max_rel_error < 1e-3;
  });
}

SuiteResult roundtrip_suite(const SelftestOptions& options) {
  return timed("pipeline round-trips", [&](std::ostream& detail) {
    bool ok = true;
    Rng rng(mix_seed(options.seed, 14));
    for (int i = 0; i < 10; ++i) {
      const int64_t h = 4 + static_cast<int64_t>(rng.below(45)), w = 4 + static_cast<int64_t>(rng.below(45));
      SyntheticOptions so;
      so.fov = i % 2 == 0;
      const ImageSample s = make_synthetic_sample(h, w, rng.next(), so);
      const ImageSample back = unpad(pad_to(s, 64, i % 3 == 0 ? PadAnchor::kTopLeft : PadAnchor::kCenter));
      if (!(back.image == s.image) || !(back.gt_mask == s.gt_mask) || back.fov_mask != s.fov_mask) {
        detail << "pad/crop mismatch at " << s.height() << "x" << s.width() << "; ";
        ok = false;
      }
    }

    ModelConfig cfg;
    cfg.initial_channels = 2;
    cfg.encoder_steps = 2;
    cfg.input_size = 32;
    const auto model = DRNet<float>::build(cfg, options.seed);
    const auto dir = scratch_dir("selftest", options.seed);
    save_checkpoint(dir / "m.ckpt", cfg, model.parameters());
    const auto loaded = load_model<float>(dir / "m.ckpt");
    std::filesystem::remove_all(dir);
    if (!(loaded.parameters() == model.parameters())) {
      detail << "checkpoint weights differ; ";
      ok = false;
    }
    Tensor<float> x({1, 1, 32, 32});
    for (auto& v : x.values()) v = static_cast<float>(rng.uniform());
    if (!(loaded.predict(x) == model.predict(x))) {
      detail << "checkpoint forward differs; ";
      ok = false;
    }

    std::vector<ImageSample> pool(20);
    for (int i = 0; i < 20; ++i) pool[static_cast<size_t>(i)].id = "p" + std::to_string(i);
    const DatasetSplit a = split_train_val(pool, 0.1, options.seed), b = split_train_val(pool, 0.1, options.seed);
    auto ids = [](const std::vector<ImageSample>& v) {
      std::vector<std::string> out;
      for (const auto& s : v) out.push_back(s.id);
      return out;
    };
    if (a.train.size() != 18 || a.val.size() != 2 || ids(a.train) != ids(b.train) || ids(a.val) != ids(b.val)) {
      detail << "split is not 18/2 or not deterministic; ";
      ok = false;
    }
    if (ok) detail << "pad/crop, checkpoint, and split round-trips hold";
    return ok;
  });
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
  return {metric_suite(options), auc_suite(options), dropblock_suite(options), gradient_suite(options),
          roundtrip_suite(options)};
}

}  // namespace drnet::oracle

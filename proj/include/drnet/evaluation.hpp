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

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drnet/data.hpp"
#include "drnet/metrics.hpp"
#include "drnet/model.hpp"

namespace drnet {

/// Produces a vessel probability map for a sample.
class Predictor {
 public:
  virtual ~Predictor() = default;
  /// Square size the sample must be padded to, or 0 to use it as is.
  virtual int64_t input_size() const = 0;
  /// Probabilities with the padded sample's (H, W) shape.
  virtual Tensor<double> predict(const ImageSample& padded) const = 0;
  virtual std::string name() const = 0;
};

template <typename T>
class ModelPredictor : public Predictor {
 public:
  explicit ModelPredictor(const DRNet<T>& model) : model_(model) {}
  int64_t input_size() const override { return model_.config().input_size; }
  Tensor<double> predict(const ImageSample& padded) const override;
  std::string name() const override { return "DRNet"; }

 private:
  const DRNet<T>& model_;
};

/// Test double that returns the ground truth as its probability map.
class GroundTruthOracle : public Predictor {
 public:
  int64_t input_size() const override { return 0; }
  Tensor<double> predict(const ImageSample& padded) const override;
  std::string name() const override { return "ground-truth oracle"; }
};

struct EvaluationOptions {
  double threshold = 0.5;
  /// Restrict metrics to the field-of-view mask where one exists.
  bool use_fov = false;
};

/// Values that may be undefined for a single image (e.g. no vessels).
struct MetricValues {
  std::optional<double> sen, spe, acc, auc, mcc;
};

struct ImageMetrics {
  std::string id;
  ConfusionCounts counts;
  MetricValues values;
};

struct MetricSet {
  double sen = 0, spe = 0, acc = 0, auc = 0, mcc = 0;
};

struct MetricsReport {
  /// Headline numbers: Sen/Spe/Acc/MCC from the summed confusion counts,
  /// AUC from the pooled pixel scores.
  MetricSet pooled;
  /// Mean over images of each defined per-image value.
  MetricValues per_image_mean;
  std::vector<ImageMetrics> images;
  ConfusionCounts total;
  std::string aggregation = "pooled";
  bool used_fov = false;
  /// ROC curve of the pooled scores.
  std::vector<RocPoint> roc;
};

/// Computes every metric for one image, recording undefined ones as empty.
ImageMetrics image_metrics(const std::string& id, const Tensor<double>& prob, const Tensor<uint8_t>& gt,
                           const Tensor<uint8_t>* fov, double threshold);

/// Runs the predictor on one sample, padding if needed and cropping back.
/// Returns the probability map at the sample's original size.
Tensor<double> predict_sample(const Predictor& predictor, const ImageSample& sample);

/// Evaluates every sample; headline metrics raise UndefinedMetricError when
/// the pooled counts leave them undefined.
MetricsReport evaluate_dataset(const Predictor& predictor, const std::vector<ImageSample>& samples,
                               const EvaluationOptions& options = {});

/// Builds a report from per-image results and the pooled scores.
MetricsReport aggregate(std::vector<ImageMetrics> images, const ScoredPixels& pooled, bool used_fov);

}  // namespace drnet

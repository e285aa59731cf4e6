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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "drnet/data.hpp"
#include "drnet/key_value.hpp"
#include "drnet/model.hpp"

namespace drnet {

struct TrainConfig {
  int64_t batch_size = 2;
  int64_t epochs = 300;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  std::string loss = "bce";
  std::string checkpoint_metric = "val_accuracy";
  uint64_t seed = 0;
  /// Strict > threshold used to binarize validation predictions.
  double threshold = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-7;
  /// Clamp applied to probabilities inside the loss.
  double loss_eps = 1e-7;
  /// Momentum of the batch-norm running statistics.
  double bn_momentum = 0.1;

  void validate() const;
  KeyValues to_key_values() const;
  /// Reads `train.*` keys (unknown keys are rejected).
  static TrainConfig from_key_values(const KeyValues& kv);
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochRecord {
  int64_t epoch = 0;  // 1-based
  double train_loss = 0;
  double val_loss = 0;
  double val_accuracy = 0;
  double wall_time = 0;  // seconds spent in this epoch
};

struct TrainHistory {
  TrainConfig config;
  std::vector<EpochRecord> epochs;
  int64_t best_epoch = 0;  // 1-based
};

/// 1-based index of the largest value; the earliest one wins ties.
int64_t select_best_epoch(std::span<const double> val_accuracy);

/// Mean per-pixel binary cross-entropy with probabilities clamped to
/// [eps, 1 - eps]. Throws ShapeError on mismatched sizes and NumericError on
/// NaN probabilities.
double bce_loss(const Tensor<double>& prob, const Tensor<uint8_t>& gt, double eps = 1e-7);

template <typename T>
class Adam {
 public:
  Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-7)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  /// Applies one update to every learnable entry that has a gradient.
  void step(ParameterStore<T>& store);
  int64_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

struct Validation {
  double accuracy = 0;
  double loss = 0;
};

/// Inference-mode forward on each sample, cropped back to its original size.
/// Accuracy is the pixel accuracy at `threshold`, averaged over samples.
template <typename T>
Validation validate_model(const DRNet<T>& model, const std::vector<ImageSample>& samples, double threshold = 0.5,
                          double loss_eps = 1e-7);

template <typename T>
double validation_accuracy(const DRNet<T>& model, const std::vector<ImageSample>& samples, double threshold = 0.5) {
  return validate_model(model, samples, threshold).accuracy;
}

template <typename T>
struct TrainResult {
  ParameterStore<T> best;
  ParameterStore<T> last;
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains with Adam on seeded-shuffled mini-batches (order for epoch e drawn
/// with seed + e) and keeps the weights of the epoch with the highest
/// validation accuracy. The model holds the final weights on return.
template <typename T>
TrainResult<T> train(DRNet<T>& model, const DatasetSplit& split, const TrainConfig& config,
                     const EpochCallback& on_epoch = {});

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history);

}  // namespace drnet

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
#include <span>
#include <vector>

#include "drnet/tensor.hpp"

namespace drnet {

struct ConfusionCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t tn = 0;
  int64_t fn = 0;

  int64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Tallies binary predictions against binary ground truth, restricted to
/// pixels where `fov` is 1 when a mask is given. All planes must share a
/// shape and contain only 0 and 1.
ConfusionCounts confusion_counts(const Tensor<uint8_t>& pred, const Tensor<uint8_t>& gt,
                                 const Tensor<uint8_t>* fov = nullptr);

// Each throws UndefinedMetricError when its denominator is zero.
double sensitivity(const ConfusionCounts& c);
double specificity(const ConfusionCounts& c);
double accuracy(const ConfusionCounts& c);
/// The numerator is formed exactly in 128-bit integers and the denominator
/// as a product of square roots in long double, so pixel counts up to 2^62
/// neither overflow nor lose more than a few ulps.
double mcc(const ConfusionCounts& c);

/// 1 where prob > threshold, 0 otherwise (ties go to background).
template <typename T>
Tensor<uint8_t> binarize(const Tensor<T>& prob, double threshold = 0.5);

/// Scores and labels gathered from the evaluated pixels of a probability map.
struct ScoredPixels {
  std::vector<double> scores;
  std::vector<uint8_t> labels;

  void append(const ScoredPixels& other);
};

template <typename T>
ScoredPixels gather_scores(const Tensor<T>& prob, const Tensor<uint8_t>& gt, const Tensor<uint8_t>* fov = nullptr);

/// Area under the ROC curve by trapezoidal integration over every distinct
/// score threshold. Exact up to the final division.
double auc_trapezoid(std::span<const double> scores, std::span<const uint8_t> labels);
/// Mann-Whitney U statistic with midranks for ties, normalized to [0, 1].
double auc_rank(std::span<const double> scores, std::span<const uint8_t> labels);
/// Computes both estimates, requires them to agree to 1e-9 (NumericError
/// otherwise), and returns the trapezoidal value.
double auc(std::span<const double> scores, std::span<const uint8_t> labels);
double auc(const ScoredPixels& pixels);

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;  // score >= threshold counts as vessel; +inf / -inf at the ends
};

/// ROC curve from (0, 0) at +inf to (1, 1) at -inf with one point per
/// distinct score.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const uint8_t> labels);

}  // namespace drnet

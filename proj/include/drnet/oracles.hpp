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

// Independent reference implementations. They share no code with the
// metric, DropBlock, or autograd paths they are used to check.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "drnet/metrics.hpp"
#include "drnet/tensor.hpp"

namespace drnet::oracle {

/// Per-pixel double loop over (y, x) with explicit branches.
ConfusionCounts naive_counts(const Tensor<uint8_t>& pred, const Tensor<uint8_t>& gt,
                             const Tensor<uint8_t>* fov = nullptr);

/// Metric values from exact rational arithmetic (MCC: 50-digit square root),
/// rounded once to double. Undefined values are NaN.
struct ExactMetrics {
  double sen, spe, acc, mcc;
};
ExactMetrics exact_metrics(const ConfusionCounts& c);

/// O(P * N) comparison of every positive with every negative; ties count 1/2.
double pairwise_auc(std::span<const double> scores, std::span<const uint8_t> labels);

/// True when every zero of `mask` lies in some all-zero block x block window
/// fully inside the plane.
bool block_structured(const Tensor<uint8_t>& mask, int block);

struct DropBlockStats {
  int masks = 0;
  double mean_zeroed_fraction = 0;
  double expected_zeroed_fraction = 0;  // analytic value for the seed rate used
  int unstructured_masks = 0;
  bool inference_identity = false;
};

/// Draws `masks` masks on size x size features and checks block structure
/// plus bit-exact identity when training is off.
DropBlockStats dropblock_statistics(int masks, int64_t size, int block, double keep_prob, uint64_t seed);

struct GradCheckOptions {
  int64_t initial_channels = 2;
  int64_t encoder_steps = 2;
  int64_t input_size = 32;
  int64_t batch = 2;
  int samples_per_group = 50;
  /// Central difference step, in units of max(1, |w|). Small enough that a
  /// ReLU or pooling switch rarely falls inside the stencil; the extended
  /// precision reference keeps the rounding noise negligible.
  double step = 1e-6;
  /// Magnitude below which errors are measured in absolute terms.
  double floor = 1e-6;
  uint64_t seed = 7;
};

struct GroupGradResult {
  std::string group;
  int sampled = 0;
  double max_rel_error = 0;
  std::string worst;  // parameter name and flat index of the largest error
};

struct GradCheckReport {
  std::vector<GroupGradResult> groups;
  double max_rel_error = 0;
};

/// Compares analytic BCE-loss gradients of a toy model in precision T with
/// central finite differences. The finite differences are evaluated in long
/// double on the same weights, so their rounding noise stays well below the
/// tolerance even for gradients near 1e-6.
template <typename T>
GradCheckReport gradient_check(const GradCheckOptions& options = {});

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

using MccFunction = std::function<double(const ConfusionCounts&)>;

struct SelftestOptions {
  uint64_t seed = 2019;
  /// Implementation under test for MCC; defaults to drnet::mcc.
  MccFunction mcc;
  /// Smaller instance counts for quick runs.
  bool quick = false;
};

SuiteResult metric_suite(const SelftestOptions& options);
SuiteResult auc_suite(const SelftestOptions& options);
SuiteResult dropblock_suite(const SelftestOptions& options);
SuiteResult gradient_suite(const SelftestOptions& options);
SuiteResult roundtrip_suite(const SelftestOptions& options);

std::vector<SuiteResult> run_selftest(const SelftestOptions& options = {});

/// An MCC with the sign of the FP*FN term flipped; used to show the metric
/// suite detects a broken formula.
double corrupted_mcc(const ConfusionCounts& c);

}  // namespace drnet::oracle

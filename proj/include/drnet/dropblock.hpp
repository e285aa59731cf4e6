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

#include "drnet/tensor.hpp"

namespace drnet {

/// Structured dropout that zeroes contiguous square regions of a feature map.
struct DropBlockConfig {
  int block_size = 7;
  double keep_prob = 0.86;
  bool training = false;

  /// Throws ConfigError unless 0 < keep_prob <= 1 and 1 <= block_size <= min(h, w).
  void validate(int64_t height, int64_t width) const;
};

/// Bernoulli rate for block seeds such that the expected fraction of dropped
/// units is about 1 - keep_prob:
///   gamma = (1 - keep_prob) / block_size^2 * (h * w) / ((h - block_size + 1) * (w - block_size + 1))
double dropblock_gamma(double keep_prob, int block_size, int64_t height, int64_t width);

/// Keep-mask (1 = keep, 0 = drop) for a rank-4 (N, C, H, W) shape. Seeds are
/// drawn independently per (n, c) plane at every position where a full block
/// fits; each seed clears the block_size x block_size square it anchors.
Tensor<uint8_t> dropblock_mask(const Dims& dims, const DropBlockConfig& config, uint64_t seed);

/// Scale applied to surviving units: total / retained, or 0 when nothing survives.
double dropblock_scale(const Tensor<uint8_t>& mask);

/// Applies DropBlock. Outside training the input is returned unchanged.
template <typename T>
Tensor<T> dropblock_apply(const Tensor<T>& features, const DropBlockConfig& config, uint64_t seed);

}  // namespace drnet

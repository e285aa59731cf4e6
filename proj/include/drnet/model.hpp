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
#include <string>
#include <vector>

#include "drnet/blocks.hpp"
#include "drnet/key_value.hpp"

namespace drnet {

struct ModelConfig {
  int64_t initial_channels = 16;
  int64_t encoder_steps = 4;
  int64_t input_size = 1024;
  int block_size = 7;
  double keep_prob = 0.86;

  /// Throws ConfigError unless every field is in range and input_size is
  /// divisible by 2^encoder_steps.
  void validate() const;

  /// Channel width of encoder step k: initial_channels * 2^k.
  int64_t stage_channels(int64_t k) const { return initial_channels << k; }
  /// Spatial size at which encoder step k's convolution runs: input_size / 2^k.
  int64_t stage_resolution(int64_t k) const { return input_size >> k; }

  KeyValues to_key_values() const;
  /// Reads `model.*` keys (unknown keys are rejected).
  static ModelConfig from_key_values(const KeyValues& kv);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Dense residual encoder-decoder producing a per-pixel vessel probability.
///
/// Encoder step k (k = 0 .. E-1): ConvUnit -> 2x2 max pool -> residual block,
/// with width initial_channels * 2^k. A bottleneck ConvUnit follows the last
/// step. The decoder has E-1 adaptive aggregations at resolutions
/// input/2^(E-1) .. input/2; aggregation j receives the previous stage as its
/// direct input and every earlier residual block output as compressed inputs.
/// Between consecutive aggregations sits a ConvUnit + residual block. The head
/// upsamples with a transposed convolution, applies two ConvUnits, then a 1x1
/// convolution and a sigmoid.
template <typename T>
class DRNet {
 public:
  static DRNet build(const ModelConfig& config, uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const ParameterStore<T>& parameters() const { return store_; }
  ParameterStore<T>& parameters() { return store_; }

  /// Replaces all parameters and buffers; throws ShapeError if the layout differs.
  void set_parameters(const ParameterStore<T>& store);

  /// Forward pass on a (N, 1, S, S) image batch, S = config().input_size.
  ag::Var<T> forward(const ag::Var<T>& image, const ForwardContext& ctx) const;

  /// Inference helper without gradient recording.
  Tensor<T> predict(const Tensor<T>& image, bool training = false, uint64_t seed = 0) const;

  int64_t parameter_count() const { return store_.parameter_count(); }

  /// Parameter names grouped by top-level block (enc0, ..., bottleneck, agg0, dec0, ..., head).
  std::vector<std::pair<std::string, std::vector<std::string>>> parameter_groups() const;

  int64_t aggregation_count() const { return static_cast<int64_t>(aggregations_.size()); }
  const AdaptiveAggregation<T>& aggregation(size_t j) const { return aggregations_.at(j); }

 private:
  struct EncoderStep {
    layers::ConvUnit<T> conv;
    DoubleResidualBlock<T> drb;
  };
  struct DecoderStep {
    layers::ConvUnit<T> conv;
    DoubleResidualBlock<T> drb;
  };

  ModelConfig config_;
  ParameterStore<T> store_;
  std::vector<EncoderStep> encoder_;
  layers::ConvUnit<T> bottleneck_;
  std::vector<AdaptiveAggregation<T>> aggregations_;
  std::vector<DecoderStep> decoder_;
  layers::ConvTranspose2x2<T> head_up_;
  layers::ConvUnit<T> head_conv1_;
  layers::ConvUnit<T> head_conv2_;
  layers::Conv2d<T> head_out_;
};

}  // namespace drnet

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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drnet/layers.hpp"

namespace drnet {

/// Two stacked residual units. Each unit computes
///   relu(x + bn(conv3x3(relu(bn(conv3x3(x))))))
/// so shape (C, H, W) is preserved.
template <typename T>
class DoubleResidualBlock {
 public:
  DoubleResidualBlock() = default;
  DoubleResidualBlock(ParameterStore<T>& store, const std::string& name, int64_t channels, Rng& rng);

  ag::Var<T> forward(const ParameterStore<T>& store, const ag::Var<T>& x, const ForwardContext& ctx) const;

  int64_t channels() const { return channels_; }
  const std::string& name() const { return name_; }

  /// Names of every learnable tensor in the residual branches.
  std::vector<std::string> branch_parameter_names() const;

 private:
  struct Unit {
    layers::Conv2d<T> conv_a;
    layers::BatchNorm2d<T> bn_a;
    layers::Conv2d<T> conv_b;
    layers::BatchNorm2d<T> bn_b;
  };
  std::string name_;
  int64_t channels_ = 0;
  std::vector<Unit> units_;
};

/// Compression layer: DropBlock followed by a 1x1 convolution.
template <typename T>
class Compression {
 public:
  Compression() = default;
  Compression(ParameterStore<T>& store, const std::string& name, int64_t in_channels, int64_t out_channels,
              int block_size, double keep_prob, Rng& rng);

  ag::Var<T> forward(const ParameterStore<T>& store, const ag::Var<T>& x, const ForwardContext& ctx) const;
  int64_t out_channels() const { return conv_.out_channels(); }
  const std::string& conv_name() const { return conv_.name(); }

 private:
  layers::DropBlockLayer drop_;
  layers::Conv2d<T> conv_;
};

/// Changes spatial resolution by a power of two: repeated 2x2 max pooling to
/// shrink, repeated learned 2x2 stride-2 transposed convolutions to grow,
/// identity when sizes match. Channel count is preserved.
template <typename T>
class Resampler {
 public:
  Resampler() = default;
  Resampler(ParameterStore<T>& store, const std::string& name, int64_t channels, int64_t from_h, int64_t from_w,
            int64_t to_h, int64_t to_w, Rng& rng);

  ag::Var<T> forward(const ParameterStore<T>& store, const ag::Var<T>& x) const;

  /// Positive: number of 2x upsampling steps; negative: 2x downsampling steps.
  int steps() const { return steps_; }

 private:
  int steps_ = 0;
  int64_t to_h_ = 0, to_w_ = 0;
  std::vector<layers::ConvTranspose2x2<T>> ups_;
};

/// Returns log2(to / from) when the ratio is an exact power of two (possibly
/// negative); throws ConfigError otherwise.
int resample_steps(int64_t from, int64_t to);

struct AggregationInput {
  int64_t channels = 0;
  int64_t height = 0;
  int64_t width = 0;
  /// Width after compression; ignored for the direct input.
  int64_t compressed_channels = 0;
  bool direct = false;
};

struct AggregationSpec {
  int64_t target_height = 0;
  int64_t target_width = 0;
  std::vector<AggregationInput> inputs;

  /// Throws ConfigError when the input list is empty, the number of direct
  /// inputs is not exactly one, or a size or channel count is invalid.
  void validate() const;
  size_t direct_index() const;
  int64_t output_channels() const;
};

/// Adaptive aggregation: non-direct inputs are compressed then resampled to
/// the target resolution, the direct input is resampled only, and all results
/// are concatenated along the channel axis in input order.
template <typename T>
class AdaptiveAggregation {
 public:
  AdaptiveAggregation() = default;
  AdaptiveAggregation(ParameterStore<T>& store, const std::string& name, AggregationSpec spec, int block_size,
                      double keep_prob, Rng& rng);

  ag::Var<T> forward(const ParameterStore<T>& store, std::span<const ag::Var<T>> inputs,
                     const ForwardContext& ctx) const;

  const AggregationSpec& spec() const { return spec_; }
  int64_t output_channels() const { return spec_.output_channels(); }

 private:
  std::string name_;
  AggregationSpec spec_;
  std::vector<std::optional<Compression<T>>> compress_;
  std::vector<Resampler<T>> resample_;
};

}  // namespace drnet

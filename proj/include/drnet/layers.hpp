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
#include <string>
#include <vector>

#include "drnet/dropblock.hpp"
#include "drnet/ops.hpp"
#include "drnet/parameters.hpp"
#include "drnet/rng.hpp"

namespace drnet {

/// Batch statistics observed during a batch-statistics forward pass, keyed
/// by the batch-norm layer name.
struct ObservedStats {
  std::string layer;
  std::vector<double> mean;
  std::vector<double> var;  // unbiased
};

enum class NormMode {
  kRunning,  // normalize with stored running statistics
  kBatch,    // normalize with statistics of the current batch
};

struct ForwardContext {
  /// Enables DropBlock. Nothing else depends on this flag.
  bool training = false;
  uint64_t seed = 0;
  NormMode norm = NormMode::kRunning;
  /// When set in kBatch mode, batch statistics are appended here.
  std::vector<ObservedStats>* observed_stats = nullptr;
  /// When set, every named stage appends (name, output shape).
  std::vector<std::pair<std::string, Dims>>* trace = nullptr;
};

namespace layers {

/// Draws variance-scaled normal values: N(0, 2 / fan_in).
template <typename T>
Tensor<T> he_normal(Dims dims, int64_t fan_in, Rng& rng);

template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(ParameterStore<T>& store, std::string name, int64_t in_channels, int64_t out_channels, int64_t kernel,
         bool bias, Rng& rng);

  ag::Var<T> forward(const ParameterStore<T>& store, const ag::Var<T>& x) const;

  const std::string& name() const { return name_; }
  int64_t in_channels() const { return in_; }
  int64_t out_channels() const { return out_; }

 private:
  std::string name_;
  int64_t in_ = 0, out_ = 0;
  bool bias_ = false;
};

template <typename T>
class ConvTranspose2x2 {
 public:
  ConvTranspose2x2() = default;
  ConvTranspose2x2(ParameterStore<T>& store, std::string name, int64_t in_channels, int64_t out_channels, Rng& rng);

  ag::Var<T> forward(const ParameterStore<T>& store, const ag::Var<T>& x) const;
  int64_t out_channels() const { return out_; }

 private:
  std::string name_;
  int64_t in_ = 0, out_ = 0;
};

template <typename T>
class BatchNorm2d {
 public:
  static constexpr double kEps = 1e-5;

  BatchNorm2d() = default;
  BatchNorm2d(ParameterStore<T>& store, std::string name, int64_t channels);

  ag::Var<T> forward(const ParameterStore<T>& store, const ag::Var<T>& x, const ForwardContext& ctx) const;
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  int64_t channels_ = 0;
};

/// DropBlock as a network layer. The configured block size is reduced to
/// the feature size on maps smaller than the block; the per-call random
/// stream is derived from the context seed and the layer name.
class DropBlockLayer {
 public:
  DropBlockLayer() = default;
  DropBlockLayer(std::string name, int block_size, double keep_prob);

  template <typename T>
  ag::Var<T> forward(const ag::Var<T>& x, const ForwardContext& ctx) const;

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  int block_size_ = 7;
  double keep_prob_ = 0.86;
};

/// 3x3 convolution -> batch norm -> ReLU -> DropBlock.
template <typename T>
class ConvUnit {
 public:
  ConvUnit() = default;
  ConvUnit(ParameterStore<T>& store, const std::string& name, int64_t in_channels, int64_t out_channels,
           int block_size, double keep_prob, Rng& rng);

  ag::Var<T> forward(const ParameterStore<T>& store, const ag::Var<T>& x, const ForwardContext& ctx) const;
  int64_t out_channels() const { return conv_.out_channels(); }

 private:
  Conv2d<T> conv_;
  BatchNorm2d<T> bn_;
  DropBlockLayer drop_;
};

}  // namespace layers

/// Appends (name, shape) to the context trace and rejects non-finite values.
template <typename T>
void check_stage(const ForwardContext& ctx, const std::string& name, const ag::Var<T>& v);

}  // namespace drnet

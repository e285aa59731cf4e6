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

#include <span>
#include <vector>

#include "drnet/autograd.hpp"
#include "drnet/dropblock.hpp"
#include "drnet/kernels.hpp"

// Differentiable operations on Vars. Each wraps a kernel from kernels.hpp.
namespace drnet::ag {

template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>* bias);

template <typename T>
Var<T> conv_transpose2x2(const Var<T>& x, const Var<T>& weight, const Var<T>* bias);

template <typename T>
Var<T> max_pool2x2(const Var<T>& x);

/// Batch normalization with statistics of the current batch. The batch mean
/// and biased variance are written to `stats` so callers can maintain
/// running estimates.
template <typename T>
Var<T> batch_norm_batch_stats(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, double eps,
                              kernels::BatchNormStats* stats);

/// Batch normalization with fixed mean/variance.
template <typename T>
Var<T> batch_norm_fixed(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, const Tensor<T>& mean,
                        const Tensor<T>& var, double eps);

template <typename T>
Var<T> relu(const Var<T>& x);

template <typename T>
Var<T> sigmoid(const Var<T>& x);

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);

/// Concatenation along the channel axis of rank-4 inputs.
template <typename T>
Var<T> concat_channels(std::span<const Var<T>> inputs);

/// Multiplies by a fixed keep-mask and rescales survivors.
template <typename T>
Var<T> masked_scale(const Var<T>& x, Tensor<uint8_t> mask, T scale);

/// Mean binary cross-entropy between probabilities and a 0/1 target, with
/// probabilities clamped to [eps, 1 - eps]. Returns a single-element Var.
template <typename T>
Var<T> binary_cross_entropy(const Var<T>& prob, const Tensor<T>& target, double eps);

}  // namespace drnet::ag

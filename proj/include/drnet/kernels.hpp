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
#include <type_traits>
#include <vector>

#include "drnet/tensor.hpp"

// Raw forward/backward kernels on NCHW tensors. Backward kernels accumulate
// into their outputs (+=) so that callers can sum gradients from several uses.
namespace drnet::kernels {

/// Stride-1 convolution with zero "same" padding. `weight` is
/// (out_channels, in_channels, k, k) with k odd; `bias` may be null.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>* bias);

template <typename T>
void conv2d_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_out,
                     Tensor<T>* grad_input, Tensor<T>* grad_weight, Tensor<T>* grad_bias);

/// 2x2 stride-2 transposed convolution; doubles H and W.
/// `weight` is (in_channels, out_channels, 2, 2).
template <typename T>
Tensor<T> conv_transpose2x2(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>* bias);

template <typename T>
void conv_transpose2x2_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_out,
                                Tensor<T>* grad_input, Tensor<T>* grad_weight, Tensor<T>* grad_bias);

/// 2x2 stride-2 max pooling. `argmax` receives the winning offset (0..3)
/// inside each window; first maximum wins on ties.
template <typename T>
Tensor<T> max_pool2x2(const Tensor<T>& input, std::vector<uint8_t>* argmax);

template <typename T>
void max_pool2x2_backward(const std::vector<uint8_t>& argmax, const Tensor<T>& grad_out, Tensor<T>& grad_input);

/// Accumulator type: at least double, wider when T is wider.
template <typename T>
using Acc = std::conditional_t<(sizeof(T) > sizeof(double)), T, double>;

/// Held in long double so an extended-precision model keeps its precision.
struct BatchNormStats {
  std::vector<long double> mean;
  std::vector<long double> inv_std;
  std::vector<long double> var;  // biased
};

/// Normalizes with statistics computed over (N, H, W) of the input.
/// Returns the normalized-but-unscaled values in `normalized` for backward.
template <typename T>
Tensor<T> batch_norm_train(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& beta, double eps,
                           BatchNormStats& stats, Tensor<T>& normalized);

template <typename T>
void batch_norm_train_backward(const Tensor<T>& normalized, const Tensor<T>& gamma, const BatchNormStats& stats,
                               const Tensor<T>& grad_out, Tensor<T>* grad_input, Tensor<T>* grad_gamma,
                               Tensor<T>* grad_beta);

/// Normalizes with fixed (running) statistics; an affine map per channel.
template <typename T>
Tensor<T> batch_norm_fixed(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& beta,
                           const Tensor<T>& mean, const Tensor<T>& var, double eps);

template <typename T>
void batch_norm_fixed_backward(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& mean,
                               const Tensor<T>& var, double eps, const Tensor<T>& grad_out, Tensor<T>* grad_input,
                               Tensor<T>* grad_gamma, Tensor<T>* grad_beta);

}  // namespace drnet::kernels

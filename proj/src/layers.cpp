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

#include "drnet/layers.hpp"

#include <algorithm>
#include <cmath>

namespace drnet {
namespace layers {

template <typename T>
Tensor<T> he_normal(Dims dims, int64_t fan_in, Rng& rng) {
  Tensor<T> t(std::move(dims));
  const double stddev = std::sqrt(2.0 / static_cast<double>(std::max<int64_t>(1, fan_in)));
  for (auto& v : t.values()) v = static_cast<T>(rng.normal() * stddev);
  return t;
}

template <typename T>
Conv2d<T>::Conv2d(ParameterStore<T>& store, std::string name, int64_t in_channels, int64_t out_channels,
                  int64_t kernel, bool bias, Rng& rng)
    : name_(std::move(name)), in_(in_channels), out_(out_channels), bias_(bias) {
  if (in_channels < 1 || out_channels < 1 || kernel < 1 || kernel % 2 == 0) {
    throw ConfigError("conv " + name_ + ": invalid channel or kernel configuration");
  }
  store.add(name_ + ".weight", he_normal<T>({out_channels, in_channels, kernel, kernel},
                                            in_channels * kernel * kernel, rng));
  if (bias_) store.add(name_ + ".bias", Tensor<T>({out_channels}));
}

template <typename T>
ag::Var<T> Conv2d<T>::forward(const ParameterStore<T>& store, const ag::Var<T>& x) const {
  if (x.dims().size() != 4 || x.dims()[1] != in_) {
    throw ShapeError("conv " + name_ + ": expected " + std::to_string(in_) + " input channels, got shape " +
                     shape_string(x.dims()));
  }
  const auto& w = store.get(name_ + ".weight");
  if (!bias_) return ag::conv2d<T>(x, w, nullptr);
  const auto& b = store.get(name_ + ".bias");
  return ag::conv2d<T>(x, w, &b);
}

template <typename T>
ConvTranspose2x2<T>::ConvTranspose2x2(ParameterStore<T>& store, std::string name, int64_t in_channels,
                                      int64_t out_channels, Rng& rng)
    : name_(std::move(name)), in_(in_channels), out_(out_channels) {
  store.add(name_ + ".weight", he_normal<T>({in_channels, out_channels, 2, 2}, in_channels, rng));
  store.add(name_ + ".bias", Tensor<T>({out_channels}));
}

template <typename T>
ag::Var<T> ConvTranspose2x2<T>::forward(const ParameterStore<T>& store, const ag::Var<T>& x) const {
  if (x.dims().size() != 4 || x.dims()[1] != in_) {
    throw ShapeError("transposed conv " + name_ + ": expected " + std::to_string(in_) +
                     " input channels, got shape " + shape_string(x.dims()));
  }
  const auto& b = store.get(name_ + ".bias");
  return ag::conv_transpose2x2<T>(x, store.get(name_ + ".weight"), &b);
}

template <typename T>
BatchNorm2d<T>::BatchNorm2d(ParameterStore<T>& store, std::string name, int64_t channels)
    : name_(std::move(name)), channels_(channels) {
  store.add(name_ + ".gamma", Tensor<T>({channels}, T(1)));
  store.add(name_ + ".beta", Tensor<T>({channels}, T(0)));
  store.add(name_ + ".running_mean", Tensor<T>({channels}, T(0)), EntryKind::kBuffer);
  store.add(name_ + ".running_var", Tensor<T>({channels}, T(1)), EntryKind::kBuffer);
}

template <typename T>
ag::Var<T> BatchNorm2d<T>::forward(const ParameterStore<T>& store, const ag::Var<T>& x,
                                   const ForwardContext& ctx) const {
  const auto& gamma = store.get(name_ + ".gamma");
  const auto& beta = store.get(name_ + ".beta");
  if (ctx.norm == NormMode::kRunning) {
    return ag::batch_norm_fixed<T>(x, gamma, beta, store.value(name_ + ".running_mean"),
                                   store.value(name_ + ".running_var"), kEps);
  }
  kernels::BatchNormStats stats;
  auto out = ag::batch_norm_batch_stats<T>(x, gamma, beta, kEps, &stats);
  if (ctx.observed_stats) {
    const double m = static_cast<double>(x.dims()[0] * x.dims()[2] * x.dims()[3]);
    ObservedStats obs{name_, {stats.mean.begin(), stats.mean.end()}, {stats.var.begin(), stats.var.end()}};
    if (m > 1) {
      for (auto& v : obs.var) v *= m / (m - 1);
    }
    ctx.observed_stats->push_back(std::move(obs));
  }
  return out;
}

DropBlockLayer::DropBlockLayer(std::string name, int block_size, double keep_prob)
    : name_(std::move(name)), block_size_(block_size), keep_prob_(keep_prob) {
  DropBlockConfig{block_size, keep_prob, true}.validate(block_size, block_size);
}

template <typename T>
ag::Var<T> DropBlockLayer::forward(const ag::Var<T>& x, const ForwardContext& ctx) const {
  if (!ctx.training || keep_prob_ >= 1.0) return x;
  const Dims& d = x.dims();
  const int block = static_cast<int>(std::min<int64_t>({block_size_, d[2], d[3]}));
  DropBlockConfig cfg{block, keep_prob_, true};
  Tensor<uint8_t> mask = dropblock_mask(d, cfg, mix_seed(ctx.seed, hash_name(name_)));
  const T scale = static_cast<T>(dropblock_scale(mask));
  return ag::masked_scale<T>(x, std::move(mask), scale);
}

template <typename T>
ConvUnit<T>::ConvUnit(ParameterStore<T>& store, const std::string& name, int64_t in_channels, int64_t out_channels,
                      int block_size, double keep_prob, Rng& rng)
    : conv_(store, name + ".conv", in_channels, out_channels, 3, false, rng),
      bn_(store, name + ".bn", out_channels),
      drop_(name + ".drop", block_size, keep_prob) {}

template <typename T>
ag::Var<T> ConvUnit<T>::forward(const ParameterStore<T>& store, const ag::Var<T>& x,
                                const ForwardContext& ctx) const {
  auto y = ag::relu(bn_.forward(store, conv_.forward(store, x), ctx));
  return drop_.forward(y, ctx);
}

template class Conv2d<float>;
template class Conv2d<double>;
template class Conv2d<long double>;
template class ConvTranspose2x2<float>;
template class ConvTranspose2x2<double>;
template class ConvTranspose2x2<long double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class BatchNorm2d<long double>;
template class ConvUnit<float>;
template class ConvUnit<double>;
template class ConvUnit<long double>;
template Tensor<float> he_normal(Dims, int64_t, Rng&);
template Tensor<double> he_normal(Dims, int64_t, Rng&);
template Tensor<long double> he_normal(Dims, int64_t, Rng&);
template ag::Var<float> DropBlockLayer::forward(const ag::Var<float>&, const ForwardContext&) const;
template ag::Var<double> DropBlockLayer::forward(const ag::Var<double>&, const ForwardContext&) const;
template ag::Var<long double> DropBlockLayer::forward(const ag::Var<long double>&, const ForwardContext&) const;

}  // namespace layers

template <typename T>
void check_stage(const ForwardContext& ctx, const std::string& name, const ag::Var<T>& v) {
  if (!all_finite(v.value())) throw NumericError("non-finite activations at layer " + name);
  if (ctx.trace) ctx.trace->emplace_back(name, v.dims());
}

template void check_stage(const ForwardContext&, const std::string&, const ag::Var<float>&);
template void check_stage(const ForwardContext&, const std::string&, const ag::Var<double>&);
template void check_stage(const ForwardContext&, const std::string&, const ag::Var<long double>&);

}  // namespace drnet

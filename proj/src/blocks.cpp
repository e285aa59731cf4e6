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

#include "drnet/blocks.hpp"

#include <bit>

namespace drnet {

template <typename T>
DoubleResidualBlock<T>::DoubleResidualBlock(ParameterStore<T>& store, const std::string& name, int64_t channels,
                                            Rng& rng)
    : name_(name), channels_(channels) {
  for (int u = 0; u < 2; ++u) {
    const std::string p = name + ".unit" + std::to_string(u);
    units_.push_back(Unit{layers::Conv2d<T>(store, p + ".conv_a", channels, channels, 3, false, rng),
                          layers::BatchNorm2d<T>(store, p + ".bn_a", channels),
                          layers::Conv2d<T>(store, p + ".conv_b", channels, channels, 3, false, rng),
                          layers::BatchNorm2d<T>(store, p + ".bn_b", channels)});
  }
}

template <typename T>
ag::Var<T> DoubleResidualBlock<T>::forward(const ParameterStore<T>& store, const ag::Var<T>& x,
                                           const ForwardContext& ctx) const {
  if (x.dims().size() != 4 || x.dims()[1] != channels_) {
    throw ShapeError("residual block " + name_ + ": expected " + std::to_string(channels_) +
                     " channels, got shape " + shape_string(x.dims()));
  }
  ag::Var<T> h = x;
  for (const auto& u : units_) {
    auto branch = ag::relu(u.bn_a.forward(store, u.conv_a.forward(store, h), ctx));
    branch = u.bn_b.forward(store, u.conv_b.forward(store, branch), ctx);
    h = ag::relu(ag::add(h, branch));
  }
  return h;
}

template <typename T>
std::vector<std::string> DoubleResidualBlock<T>::branch_parameter_names() const {
  std::vector<std::string> names;
  for (const auto& u : units_) {
    names.push_back(u.conv_a.name() + ".weight");
    names.push_back(u.bn_a.name() + ".gamma");
    names.push_back(u.bn_a.name() + ".beta");
    names.push_back(u.conv_b.name() + ".weight");
    names.push_back(u.bn_b.name() + ".gamma");
    names.push_back(u.bn_b.name() + ".beta");
  }
  return names;
}

template <typename T>
Compression<T>::Compression(ParameterStore<T>& store, const std::string& name, int64_t in_channels,
                            int64_t out_channels, int block_size, double keep_prob, Rng& rng)
    : drop_(name + ".drop", block_size, keep_prob), conv_(store, name + ".conv", in_channels, out_channels, 1, true, rng) {
  if (out_channels < 1) throw ConfigError("compression " + name + ": target channels must be >= 1");
}

template <typename T>
ag::Var<T> Compression<T>::forward(const ParameterStore<T>& store, const ag::Var<T>& x,
                                   const ForwardContext& ctx) const {
  return conv_.forward(store, drop_.forward(x, ctx));
}

int resample_steps(int64_t from, int64_t to) {
  if (from < 1 || to < 1) throw ConfigError("resample: sizes must be positive");
  const int64_t big = std::max(from, to), small = std::min(from, to);
  if (big % small != 0 || !std::has_single_bit(static_cast<uint64_t>(big / small))) {
    throw ConfigError("resample: ratio between " + std::to_string(from) + " and " + std::to_string(to) +
                      " is not a power of two");
  }
  const int s = std::countr_zero(static_cast<uint64_t>(big / small));
  return to >= from ? s : -s;
}

template <typename T>
Resampler<T>::Resampler(ParameterStore<T>& store, const std::string& name, int64_t channels, int64_t from_h,
                        int64_t from_w, int64_t to_h, int64_t to_w, Rng& rng)
    : to_h_(to_h), to_w_(to_w) {
  steps_ = resample_steps(from_h, to_h);
  if (resample_steps(from_w, to_w) != steps_) {
    throw ConfigError("resample " + name + ": height and width scale differently");
  }
  for (int i = 0; i < steps_; ++i) {
    ups_.emplace_back(store, name + ".up" + std::to_string(i), channels, channels, rng);
  }
}

template <typename T>
ag::Var<T> Resampler<T>::forward(const ParameterStore<T>& store, const ag::Var<T>& x) const {
  ag::Var<T> y = x;
  for (int i = 0; i < -steps_; ++i) y = ag::max_pool2x2(y);
  for (const auto& up : ups_) y = up.forward(store, y);
  if (y.dims()[2] != to_h_ || y.dims()[3] != to_w_) {
    throw ShapeError("resample: produced " + shape_string(y.dims()) + ", expected spatial size " +
                     std::to_string(to_h_) + "x" + std::to_string(to_w_));
  }
  return y;
}

void AggregationSpec::validate() const {
  if (inputs.empty()) throw ConfigError("aggregation: input list is empty");
  if (target_height < 1 || target_width < 1) throw ConfigError("aggregation: target size must be positive");
  int direct = 0;
  for (const auto& in : inputs) {
    direct += in.direct ? 1 : 0;
    if (in.channels < 1 || in.height < 1 || in.width < 1) {
      throw ConfigError("aggregation: input sizes must be positive");
    }
    if (!in.direct && in.compressed_channels < 1) {
      throw ConfigError("aggregation: compressed channel count must be >= 1");
    }
    resample_steps(in.height, target_height);
    resample_steps(in.width, target_width);
  }
  if (direct != 1) {
    throw ConfigError("aggregation: exactly one direct input required, got " + std::to_string(direct));
  }
}

size_t AggregationSpec::direct_index() const {
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].direct) return i;
  }
  throw ConfigError("aggregation: no direct input");
}

int64_t AggregationSpec::output_channels() const {
  int64_t c = 0;
  for (const auto& in : inputs) c += in.direct ? in.channels : in.compressed_channels;
  return c;
}

template <typename T>
AdaptiveAggregation<T>::AdaptiveAggregation(ParameterStore<T>& store, const std::string& name, AggregationSpec spec,
                                            int block_size, double keep_prob, Rng& rng)
    : name_(name), spec_(std::move(spec)) {
  spec_.validate();
  for (size_t i = 0; i < spec_.inputs.size(); ++i) {
    const auto& in = spec_.inputs[i];
    const std::string p = name + ".in" + std::to_string(i);
    int64_t channels = in.channels;
    if (in.direct) {
      compress_.emplace_back(std::nullopt);
    } else {
      compress_.emplace_back(
          Compression<T>(store, p + ".compress", in.channels, in.compressed_channels, block_size, keep_prob, rng));
      channels = in.compressed_channels;
    }
    resample_.emplace_back(store, p + ".resample", channels, in.height, in.width, spec_.target_height,
                           spec_.target_width, rng);
  }
}

template <typename T>
ag::Var<T> AdaptiveAggregation<T>::forward(const ParameterStore<T>& store, std::span<const ag::Var<T>> inputs,
                                           const ForwardContext& ctx) const {
  if (inputs.size() != spec_.inputs.size()) {
    throw ShapeError("aggregation " + name_ + ": expected " + std::to_string(spec_.inputs.size()) +
                     " inputs, got " + std::to_string(inputs.size()));
  }
  std::vector<ag::Var<T>> parts;
  parts.reserve(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    const auto& in = spec_.inputs[i];
    const Dims& d = inputs[i].dims();
    if (d.size() != 4 || d[1] != in.channels || d[2] != in.height || d[3] != in.width) {
      throw ShapeError("aggregation " + name_ + ": input " + std::to_string(i) + " has shape " + shape_string(d));
    }
    ag::Var<T> x = compress_[i] ? compress_[i]->forward(store, inputs[i], ctx) : inputs[i];
    parts.push_back(resample_[i].forward(store, x));
  }
  if (parts.size() == 1) return parts.front();
  return ag::concat_channels<T>(parts);
}

template class DoubleResidualBlock<float>;
template class DoubleResidualBlock<double>;
template class DoubleResidualBlock<long double>;
template class Compression<float>;
template class Compression<double>;
template class Compression<long double>;
template class Resampler<float>;
template class Resampler<double>;
template class Resampler<long double>;
template class AdaptiveAggregation<float>;
template class AdaptiveAggregation<double>;
template class AdaptiveAggregation<long double>;

}  // namespace drnet

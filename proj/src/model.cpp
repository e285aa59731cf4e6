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

#include "drnet/model.hpp"

#include <algorithm>
#include <map>

namespace drnet {

void ModelConfig::validate() const {
  if (initial_channels < 1) throw ConfigError("model.initial_channels must be >= 1");
  if (encoder_steps < 2 || encoder_steps > 10) throw ConfigError("model.encoder_steps must lie in [2, 10]");
  if (input_size < 1 || input_size % (int64_t{1} << encoder_steps) != 0) {
    throw ConfigError("model.input_size " + std::to_string(input_size) + " must be divisible by 2^" +
                      std::to_string(encoder_steps));
  }
  if (block_size < 1) throw ConfigError("model.block_size must be >= 1");
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) throw ConfigError("model.keep_prob must lie in (0, 1]");
}

KeyValues ModelConfig::to_key_values() const {
  return {{"model.initial_channels", std::to_string(initial_channels)},
          {"model.encoder_steps", std::to_string(encoder_steps)},
          {"model.input_size", std::to_string(input_size)},
          {"model.block_size", std::to_string(block_size)},
          {"model.keep_prob", format_real(keep_prob)}};
}

ModelConfig ModelConfig::from_key_values(const KeyValues& kv) {
  ModelConfig c;
  for (const auto& [k, v] : kv) {
    if (k == "model.initial_channels") {
      c.initial_channels = parse_int(k, v);
    } else if (k == "model.encoder_steps") {
      c.encoder_steps = parse_int(k, v);
    } else if (k == "model.input_size") {
      c.input_size = parse_int(k, v);
    } else if (k == "model.block_size") {
      c.block_size = static_cast<int>(parse_int(k, v));
    } else if (k == "model.keep_prob") {
      c.keep_prob = parse_real(k, v);
    } else if (k.rfind("model.", 0) == 0) {
      throw ConfigError("unknown model key: " + k);
    }
  }
  return c;
}

template <typename T>
DRNet<T> DRNet<T>::build(const ModelConfig& config, uint64_t seed) {
  config.validate();
  DRNet net;
  net.config_ = config;
  auto& store = net.store_;
  Rng rng(seed);
  const int64_t steps = config.encoder_steps;
  const int64_t size = config.input_size;
  const int block = config.block_size;
  const double keep = config.keep_prob;

  struct Produced {
    int64_t channels, resolution;
  };
  std::vector<Produced> encoder_outputs;

  int64_t in_channels = 1;
  for (int64_t k = 0; k < steps; ++k) {
    const std::string p = "enc" + std::to_string(k);
    const int64_t width = config.stage_channels(k);
    net.encoder_.push_back(EncoderStep{layers::ConvUnit<T>(store, p, in_channels, width, block, keep, rng),
                                       DoubleResidualBlock<T>(store, p + ".drb", width, rng)});
    encoder_outputs.push_back({width, size >> (k + 1)});
    in_channels = width;
  }

  const int64_t deepest = config.stage_channels(steps - 1);
  net.bottleneck_ = layers::ConvUnit<T>(store, "bottleneck", deepest, deepest, block, keep, rng);

  Produced previous{deepest, size >> steps};
  std::vector<Produced> decoder_outputs;
  for (int64_t j = 0; j + 1 < steps; ++j) {
    const int64_t target = size >> (steps - 1 - j);
    const int64_t width = config.stage_channels(steps - 2 - j);
    const int64_t fan_in = 1 + steps + std::max<int64_t>(0, j - 1);
    const int64_t compressed = std::max<int64_t>(1, width / fan_in);

    AggregationSpec spec;
    spec.target_height = spec.target_width = target;
    spec.inputs.push_back({previous.channels, previous.resolution, previous.resolution, previous.channels, true});
    for (const auto& e : encoder_outputs) {
      spec.inputs.push_back({e.channels, e.resolution, e.resolution, compressed, false});
    }
    for (size_t d = 0; d + 1 < decoder_outputs.size(); ++d) {
      const auto& o = decoder_outputs[d];
      spec.inputs.push_back({o.channels, o.resolution, o.resolution, compressed, false});
    }
    const std::string name = "agg" + std::to_string(j);
    net.aggregations_.emplace_back(store, name, spec, block, keep, rng);
    const int64_t agg_channels = net.aggregations_.back().output_channels();

    if (j + 2 < steps) {
      const std::string p = "dec" + std::to_string(j);
      net.decoder_.push_back(DecoderStep{layers::ConvUnit<T>(store, p, agg_channels, width, block, keep, rng),
                                         DoubleResidualBlock<T>(store, p + ".drb", width, rng)});
      previous = {width, target};
      decoder_outputs.push_back(previous);
    } else {
      previous = {agg_channels, target};
    }
  }

  const int64_t c0 = config.initial_channels;
  net.head_up_ = layers::ConvTranspose2x2<T>(store, "head.up", previous.channels, c0, rng);
  net.head_conv1_ = layers::ConvUnit<T>(store, "head.conv1", c0, c0, block, keep, rng);
  net.head_conv2_ = layers::ConvUnit<T>(store, "head.conv2", c0, c0, block, keep, rng);
  net.head_out_ = layers::Conv2d<T>(store, "head.out", c0, 1, 1, true, rng);
  return net;
}

template <typename T>
void DRNet<T>::set_parameters(const ParameterStore<T>& store) {
  if (!store_.same_layout(store)) {
    throw ShapeError("parameter layout does not match the model configuration");
  }
  store_ = store;
}

template <typename T>
ag::Var<T> DRNet<T>::forward(const ag::Var<T>& image, const ForwardContext& ctx) const {
  const Dims& d = image.dims();
  const int64_t s = config_.input_size;
  if (d.size() != 4 || d[1] != 1 || d[2] != s || d[3] != s) {
    throw ShapeError("model input must be (N, 1, " + std::to_string(s) + ", " + std::to_string(s) + "), got " +
                     shape_string(d));
  }

  std::vector<ag::Var<T>> residual_outputs;
  ag::Var<T> x = image;
  for (size_t k = 0; k < encoder_.size(); ++k) {
    const std::string p = "enc" + std::to_string(k);
    x = encoder_[k].conv.forward(store_, x, ctx);
    check_stage(ctx, p + ".conv", x);
    x = ag::max_pool2x2(x);
    x = encoder_[k].drb.forward(store_, x, ctx);
    check_stage(ctx, p + ".drb", x);
    residual_outputs.push_back(x);
  }
  x = bottleneck_.forward(store_, x, ctx);
  check_stage(ctx, "bottleneck", x);

  std::vector<ag::Var<T>> decoder_outputs;
  for (size_t j = 0; j < aggregations_.size(); ++j) {
    std::vector<ag::Var<T>> inputs{x};
    inputs.insert(inputs.end(), residual_outputs.begin(), residual_outputs.end());
    if (!decoder_outputs.empty()) inputs.insert(inputs.end(), decoder_outputs.begin(), decoder_outputs.end() - 1);
    x = aggregations_[j].forward(store_, inputs, ctx);
    check_stage(ctx, "agg" + std::to_string(j), x);
    if (j < decoder_.size()) {
      const std::string p = "dec" + std::to_string(j);
      x = decoder_[j].conv.forward(store_, x, ctx);
      check_stage(ctx, p + ".conv", x);
      x = decoder_[j].drb.forward(store_, x, ctx);
      check_stage(ctx, p + ".drb", x);
      decoder_outputs.push_back(x);
    }
  }
  residual_outputs.clear();
  decoder_outputs.clear();

  x = head_up_.forward(store_, x);
  check_stage(ctx, "head.up", x);
  x = head_conv1_.forward(store_, x, ctx);
  x = head_conv2_.forward(store_, x, ctx);
  check_stage(ctx, "head.conv", x);
  x = head_out_.forward(store_, x);
  check_stage(ctx, "head.out", x);
  x = ag::sigmoid(x);
  check_stage(ctx, "output", x);
  return x;
}

template <typename T>
Tensor<T> DRNet<T>::predict(const Tensor<T>& image, bool training, uint64_t seed) const {
  ag::NoGradGuard guard;
  ForwardContext ctx;
  ctx.training = training;
  ctx.seed = seed;
  return forward(ag::Var<T>::leaf(image), ctx).value();
}

template <typename T>
std::vector<std::pair<std::string, std::vector<std::string>>> DRNet<T>::parameter_groups() const {
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  std::map<std::string, size_t> index;
  for (const auto& e : store_.entries()) {
    if (e.kind != EntryKind::kParameter) continue;
    std::string group = e.name.substr(0, e.name.find('.'));
    auto [it, inserted] = index.emplace(group, groups.size());
    if (inserted) groups.push_back({group, {}});
    groups[it->second].second.push_back(e.name);
  }
  return groups;
}

template class DRNet<float>;
template class DRNet<double>;
// Extended precision serves as a finite-difference reference.
template class DRNet<long double>;

}  // namespace drnet

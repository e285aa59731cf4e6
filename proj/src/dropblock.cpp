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

#include "drnet/dropblock.hpp"

#include <algorithm>
#include <string>

#include "drnet/rng.hpp"

namespace drnet {

void DropBlockConfig::validate(int64_t height, int64_t width) const {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw ConfigError("DropBlock keep_prob must lie in (0, 1], got " + std::to_string(keep_prob));
  }
  if (block_size < 1) {
    throw ConfigError("DropBlock block_size must be positive, got " + std::to_string(block_size));
  }
  if (block_size > height || block_size > width) {
    throw ConfigError("DropBlock block_size " + std::to_string(block_size) + " exceeds feature size " +
                      std::to_string(height) + "x" + std::to_string(width));
  }
}

double dropblock_gamma(double keep_prob, int block_size, int64_t height, int64_t width) {
  DropBlockConfig{block_size, keep_prob, true}.validate(height, width);
  const double b = block_size;
  const double valid = static_cast<double>(height - block_size + 1) * static_cast<double>(width - block_size + 1);
  return (1.0 - keep_prob) / (b * b) * (static_cast<double>(height) * static_cast<double>(width)) / valid;
}

Tensor<uint8_t> dropblock_mask(const Dims& dims, const DropBlockConfig& config, uint64_t seed) {
  if (dims.size() != 4) throw ShapeError("dropblock_mask: expected rank-4 shape, got " + shape_string(dims));
  const int64_t h = dims[2], w = dims[3];
  const double gamma = dropblock_gamma(config.keep_prob, config.block_size, h, w);
  Tensor<uint8_t> mask(dims, uint8_t{1});
  if (gamma <= 0.0) return mask;

  const int64_t b = config.block_size;
  const int64_t seed_h = h - b + 1, seed_w = w - b + 1;
  const int64_t planes = dims[0] * dims[1];
  for (int64_t p = 0; p < planes; ++p) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(p)));
    uint8_t* plane = mask.data() + p * h * w;
    for (int64_t y = 0; y < seed_h; ++y) {
      for (int64_t x = 0; x < seed_w; ++x) {
        if (rng.uniform() >= gamma) continue;
        for (int64_t dy = 0; dy < b; ++dy) {
          std::fill_n(plane + (y + dy) * w + x, b, uint8_t{0});
        }
      }
    }
  }
  return mask;
}

double dropblock_scale(const Tensor<uint8_t>& mask) {
  int64_t kept = 0;
  for (uint8_t m : mask.values()) kept += m;
  return kept == 0 ? 0.0 : static_cast<double>(mask.size()) / static_cast<double>(kept);
}

template <typename T>
Tensor<T> dropblock_apply(const Tensor<T>& features, const DropBlockConfig& config, uint64_t seed) {
  if (features.rank() != 4) {
    throw ShapeError("dropblock_apply: expected rank-4 features, got " + shape_string(features.dims()));
  }
  config.validate(features.height(), features.width());
  if (!all_finite(features)) throw NumericError("dropblock_apply: input contains non-finite values");
  if (!config.training) return features;

  const Tensor<uint8_t> mask = dropblock_mask(features.dims(), config, seed);
  const T scale = static_cast<T>(dropblock_scale(mask));
  Tensor<T> out(features.dims());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = mask[i] ? features[i] * scale : T(0);
  return out;
}

template Tensor<float> dropblock_apply(const Tensor<float>&, const DropBlockConfig&, uint64_t);
template Tensor<double> dropblock_apply(const Tensor<double>&, const DropBlockConfig&, uint64_t);
template Tensor<long double> dropblock_apply(const Tensor<long double>&, const DropBlockConfig&, uint64_t);

}  // namespace drnet

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

#include <algorithm>
#include <cmath>
#include <cstring>

#include "drnet/dropblock.hpp"
#include "drnet/oracles.hpp"
#include "drnet/rng.hpp"

namespace drnet::oracle {

bool block_structured(const Tensor<uint8_t>& mask, int block) {
  const int64_t h = mask.height(), w = mask.width();
  // Summed-area table of dropped units.
  std::vector<int64_t> sat(static_cast<size_t>((h + 1) * (w + 1)), 0);
  auto S = [&](int64_t y, int64_t x) -> int64_t& { return sat[static_cast<size_t>(y * (w + 1) + x)]; };
  for (int64_t y = 0; y < h; ++y) {
    for (int64_t x = 0; x < w; ++x) {
      S(y + 1, x + 1) = (mask.at(y, x) == 0 ? 1 : 0) + S(y, x + 1) + S(y + 1, x) - S(y, x);
    }
  }
  std::vector<uint8_t> covered(static_cast<size_t>(h * w), 0);
  const int64_t full = static_cast<int64_t>(block) * block;
  for (int64_t y = 0; y + block <= h; ++y) {
    for (int64_t x = 0; x + block <= w; ++x) {
      const int64_t zeros = S(y + block, x + block) - S(y, x + block) - S(y + block, x) + S(y, x);
      if (zeros != full) continue;
      for (int64_t dy = 0; dy < block; ++dy) {
        std::memset(&covered[static_cast<size_t>((y + dy) * w + x)], 1, static_cast<size_t>(block));
      }
    }
  }
  for (int64_t i = 0; i < h * w; ++i) {
    if (mask[i] == 0 && !covered[static_cast<size_t>(i)]) return false;
  }
  return true;
}

DropBlockStats dropblock_statistics(int masks, int64_t size, int block, double keep_prob, uint64_t seed) {
  DropBlockStats st;
  st.masks = masks;
  const DropBlockConfig cfg{block, keep_prob, true};
  const Dims dims = {1, 1, size, size};
  double zeroed = 0.0;
  for (int i = 0; i < masks; ++i) {
    const Tensor<uint8_t> m4 = dropblock_mask(dims, cfg, mix_seed(seed, static_cast<uint64_t>(i)));
    const Tensor<uint8_t> m = m4.reshaped({size, size});
    int64_t z = 0;
    for (uint8_t v : m.values()) z += v == 0;
    zeroed += static_cast<double>(z) / static_cast<double>(m.size());
    if (!block_structured(m, block)) ++st.unstructured_masks;
  }
  st.mean_zeroed_fraction = masks ? zeroed / masks : 0.0;

  // A unit survives when none of the seeds whose block covers it fires.
  const double gamma = dropblock_gamma(keep_prob, block, size, size);
  auto covering = [&](int64_t p) {
    const int64_t lo = std::max<int64_t>(0, p - block + 1), hi = std::min<int64_t>(p, size - block);
    return hi - lo + 1;
  };
  double expected = 0.0;
  for (int64_t y = 0; y < size; ++y) {
    for (int64_t x = 0; x < size; ++x) {
      expected += 1.0 - std::pow(1.0 - gamma, static_cast<double>(covering(y) * covering(x)));
    }
  }
  st.expected_zeroed_fraction = expected / static_cast<double>(size * size);

  Rng rng(seed);
  Tensor<float> x({2, 3, size, size});
  for (auto& v : x.values()) v = static_cast<float>(rng.normal());
  const Tensor<float> y = dropblock_apply(x, DropBlockConfig{block, keep_prob, false}, seed);
  st.inference_identity =
      y.dims() == x.dims() && std::memcmp(y.data(), x.data(), static_cast<size_t>(x.size()) * sizeof(float)) == 0;
  return st;
}

}  // namespace drnet::oracle

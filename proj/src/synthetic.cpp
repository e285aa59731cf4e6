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

#include "drnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "drnet/image_io.hpp"
#include "drnet/rng.hpp"

namespace drnet {

ImageSample make_synthetic_sample(int64_t height, int64_t width, uint64_t seed, const SyntheticOptions& options) {
  if (height < 4 || width < 4) throw ConfigError("synthetic sample must be at least 4x4");
  Rng rng(seed);
  Tensor<uint8_t> gt({height, width});
  const double h = static_cast<double>(height), w = static_cast<double>(width);

  // Quadratic Bezier strokes with a radius that tapers along the curve.
  for (int c = 0; c < options.curves; ++c) {
    const double x0 = rng.uniform() * w, y0 = rng.uniform() * h;
    const double x1 = rng.uniform() * w, y1 = rng.uniform() * h;
    const double x2 = rng.uniform() * w, y2 = rng.uniform() * h;
    const double r0 = options.min_radius + rng.uniform() * (options.max_radius - options.min_radius);
    const int steps = static_cast<int>(4 * (h + w));
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      const double px = (1 - t) * (1 - t) * x0 + 2 * (1 - t) * t * x1 + t * t * x2;
      const double py = (1 - t) * (1 - t) * y0 + 2 * (1 - t) * t * y1 + t * t * y2;
      const double r = std::max(options.min_radius, r0 * (1.0 - 0.5 * t));
      const auto ylo = static_cast<int64_t>(std::floor(py - r)), yhi = static_cast<int64_t>(std::ceil(py + r));
      const auto xlo = static_cast<int64_t>(std::floor(px - r)), xhi = static_cast<int64_t>(std::ceil(px + r));
      for (int64_t y = std::max<int64_t>(0, ylo); y <= std::min(height - 1, yhi); ++y) {
        for (int64_t x = std::max<int64_t>(0, xlo); x <= std::min(width - 1, xhi); ++x) {
          const double dx = static_cast<double>(x) + 0.5 - px, dy = static_cast<double>(y) + 0.5 - py;
          if (dx * dx + dy * dy <= r * r) gt.at(y, x) = 1;
        }
      }
    }
  }

  ImageSample s;
  s.id = "synthetic_" + std::to_string(seed);
  s.original_h = height;
  s.original_w = width;
  s.image = Tensor<float>({1, 1, height, width});
  const double cy = (h - 1) / 2, cx = (w - 1) / 2, radius = std::min(h, w) / 2;
  if (options.fov) s.fov_mask = Tensor<uint8_t>({height, width});
  for (int64_t y = 0; y < height; ++y) {
    for (int64_t x = 0; x < width; ++x) {
      const double dy = static_cast<double>(y) - cy, dx = static_cast<double>(x) - cx;
      const bool inside = dx * dx + dy * dy <= radius * radius;
      double v = 0.25 + 0.1 * std::sin(0.05 * static_cast<double>(x + y)) + options.noise * rng.normal();
      if (gt.at(y, x)) v += 0.45;
      if (options.fov && !inside) v = 0.0;
      s.image.at(0, 0, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      if (options.fov) s.fov_mask->at(y, x) = inside ? 1 : 0;
    }
  }
  s.gt_mask = std::move(gt);
  if (options.fov) {
    for (int64_t i = 0; i < s.gt_mask.size(); ++i) s.gt_mask[i] &= (*s.fov_mask)[i];
  }
  return s;
}

void write_synthetic_dataset(const std::filesystem::path& root, int count, int64_t height, int64_t width,
                             uint64_t seed, const SyntheticOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(root / "images");
  fs::create_directories(root / "GT");
  if (options.fov) fs::create_directories(root / "mask");
  for (int i = 0; i < count; ++i) {
    const ImageSample s = make_synthetic_sample(height, width, mix_seed(seed, static_cast<uint64_t>(i)), options);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "img_%03d", i);
    Tensor<uint8_t> img({height, width}), gt({height, width});
    for (int64_t p = 0; p < img.size(); ++p) {
      img[p] = static_cast<uint8_t>(std::lround(s.image[p] * 255.0f));
      gt[p] = s.gt_mask[p] ? 255 : 0;
    }
    write_png(root / "images" / (std::string(stem) + ".png"), img);
    write_png(root / "GT" / (std::string(stem) + "_GT.png"), gt);
    if (options.fov) {
      Tensor<uint8_t> fov({height, width});
      for (int64_t p = 0; p < fov.size(); ++p) fov[p] = (*s.fov_mask)[p] ? 255 : 0;
      write_png(root / "mask" / (std::string(stem) + "_Mask.png"), fov);
    }
  }
}

}  // namespace drnet

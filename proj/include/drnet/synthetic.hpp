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
#include <filesystem>

#include "drnet/data.hpp"

namespace drnet {

struct SyntheticOptions {
  int curves = 6;
  double min_radius = 0.6;
  double max_radius = 1.8;
  double noise = 0.04;
  /// Adds a circular field-of-view mask.
  bool fov = false;
};

/// Vessel-like test image: bright curved strokes on a darker noisy
/// background, with the strokes as ground truth.
ImageSample make_synthetic_sample(int64_t height, int64_t width, uint64_t seed, const SyntheticOptions& options = {});

/// Writes `count` synthetic samples as PNGs in the images/, GT/ (and mask/)
/// layout read by load_dataset. Files are named img_000.png, img_000_GT.png, ...
void write_synthetic_dataset(const std::filesystem::path& root, int count, int64_t height, int64_t width,
                             uint64_t seed, const SyntheticOptions& options = {});

}  // namespace drnet

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
#include <optional>
#include <string>
#include <vector>

#include "drnet/tensor.hpp"

namespace drnet {

enum class DatasetLayout { kIostar, kRcslo };

DatasetLayout parse_layout(const std::string& name);
std::string layout_name(DatasetLayout layout);

/// One SLO image with its annotation. `image` is (1, 1, H, W) with values in
/// [0, 1]; masks are (H, W) with values in {0, 1}. The pad fields locate the
/// original_h x original_w window inside the (possibly padded) arrays.
struct ImageSample {
  std::string id;
  Tensor<float> image;
  Tensor<uint8_t> gt_mask;
  std::optional<Tensor<uint8_t>> fov_mask;
  int64_t original_h = 0;
  int64_t original_w = 0;
  int64_t pad_top = 0;
  int64_t pad_left = 0;

  int64_t height() const { return image.height(); }
  int64_t width() const { return image.width(); }
  bool padded() const { return pad_top != 0 || pad_left != 0 || height() != original_h || width() != original_w; }
};

struct LoadOptions {
  /// 8-bit level at or above which a ground-truth pixel counts as vessel.
  int gt_threshold = 128;
};

/// Loads one image. An empty `gt` path leaves an all-background annotation;
/// an empty `fov` path leaves no field-of-view mask.
ImageSample load_sample(const std::filesystem::path& image, const std::filesystem::path& gt = {},
                        const std::filesystem::path& fov = {}, const LoadOptions& options = {});

/// Loads `<root>/images/*` with annotations from `<root>/GT` (or
/// `ground-truth`) and optional field-of-view masks from `<root>/mask` (or
/// `masks`). Files are matched by basename after stripping the extension
/// and, for annotations and masks, a trailing `_GT` / `_Mask` style suffix.
/// Samples are returned sorted by image filename.
std::vector<ImageSample> load_dataset(const std::filesystem::path& root, DatasetLayout layout,
                                      const LoadOptions& options = {});

enum class PadAnchor { kCenter, kTopLeft };

/// Zero-pads image, annotation, and mask to size x size. Centered padding
/// puts the odd remainder on the bottom/right. Throws ConfigError when the
/// sample is larger than `size`.
ImageSample pad_to(const ImageSample& sample, int64_t size, PadAnchor anchor = PadAnchor::kCenter);

/// Cuts the original window back out of a map with the sample's padded
/// dimensions. Works on (H, W) planes and (N, C, H, W) maps.
template <typename T>
Tensor<T> crop_back(const Tensor<T>& map, const ImageSample& sample);

/// Restores the sample's unpadded form.
ImageSample unpad(const ImageSample& sample);

struct DatasetSplit {
  std::vector<ImageSample> train;
  std::vector<ImageSample> val;
  std::vector<ImageSample> test;
  uint64_t seed = 0;
};

/// Holds out round(fraction * |pool|) samples (at least 1) chosen by a seeded
/// shuffle as the validation set; the rest, in original order, form the
/// training set.
DatasetSplit split_train_val(const std::vector<ImageSample>& pool, double fraction, uint64_t seed);

/// Pixels of the sample's gt mask that are vessel, as a fraction.
double vessel_fraction(const ImageSample& sample);

}  // namespace drnet

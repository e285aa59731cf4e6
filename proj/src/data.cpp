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

#include "drnet/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "drnet/image_io.hpp"
#include "drnet/rng.hpp"

namespace drnet {
namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_image_file(const fs::path& p) {
  static const char* kExt[] = {".png", ".tif", ".tiff", ".jpg", ".jpeg", ".bmp", ".pgm", ".ppm"};
  const std::string ext = lower(p.extension().string());
  return std::any_of(std::begin(kExt), std::end(kExt), [&](const char* e) { return ext == e; });
}

std::string match_key(const fs::path& p, bool strip_suffix) {
  std::string stem = lower(p.stem().string());
  if (strip_suffix) {
    static const char* kSuffixes[] = {"_gt", "-gt", " gt", "_mask", "-mask", "_fov", "-fov", "_manual1", "_label"};
    for (const char* s : kSuffixes) {
      const std::string suffix(s);
      if (stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
        stem.resize(stem.size() - suffix.size());
        break;
      }
    }
  }
  return stem;
}

std::vector<fs::path> sorted_images(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

std::optional<fs::path> first_existing(const fs::path& root, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (fs::is_directory(root / n)) return root / n;
  }
  return std::nullopt;
}

std::map<std::string, fs::path> index_by_key(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  for (const auto& p : sorted_images(dir)) {
    const std::string key = match_key(p, true);
    if (!out.emplace(key, p).second) {
      throw IngestionError("ambiguous annotation files for '" + key + "' in " + dir.string());
    }
  }
  return out;
}

Tensor<uint8_t> binarize_plane(const Tensor<uint8_t>& plane, int threshold) {
  Tensor<uint8_t> out(plane.dims());
  for (int64_t i = 0; i < plane.size(); ++i) out[i] = plane[i] >= threshold ? 1 : 0;
  return out;
}

template <typename T>
Tensor<T> pad_plane(const Tensor<T>& src, int64_t size, int64_t top, int64_t left) {
  const Dims& d = src.dims();
  Dims out_dims = d;
  out_dims[d.size() - 2] = size;
  out_dims[d.size() - 1] = size;
  Tensor<T> out(out_dims);
  const int64_t h = src.height(), w = src.width();
  const int64_t planes = src.size() / (h * w);
  for (int64_t p = 0; p < planes; ++p) {
    for (int64_t y = 0; y < h; ++y) {
      std::copy_n(src.data() + (p * h + y) * w, w, out.data() + (p * size + y + top) * size + left);
    }
  }
  return out;
}

}  // namespace

DatasetLayout parse_layout(const std::string& name) {
  const std::string n = lower(name);
  if (n == "iostar") return DatasetLayout::kIostar;
  if (n == "rcslo" || n == "rc-slo") return DatasetLayout::kRcslo;
  throw ConfigError("unknown dataset layout '" + name + "' (expected iostar or rcslo)");
}

std::string layout_name(DatasetLayout layout) { return layout == DatasetLayout::kIostar ? "iostar" : "rcslo"; }

ImageSample load_sample(const fs::path& image, const fs::path& gt, const fs::path& fov, const LoadOptions& options) {
  const Tensor<uint8_t> gray = read_gray8(image);
  ImageSample s;
  s.id = image.stem().string();
  s.original_h = gray.height();
  s.original_w = gray.width();
  std::vector<float> values(static_cast<size_t>(gray.size()));
  for (int64_t i = 0; i < gray.size(); ++i) values[static_cast<size_t>(i)] = gray[i] / 255.0f;
  s.image = Tensor<float>({1, 1, s.original_h, s.original_w}, std::move(values));

  if (gt.empty()) {
    s.gt_mask = Tensor<uint8_t>({s.original_h, s.original_w});
  } else {
    const Tensor<uint8_t> gt_raw = read_gray8(gt);
    if (!gray.same_shape(gt_raw)) {
      throw IngestionError("ground truth " + gt.filename().string() + " has shape " + shape_string(gt_raw.dims()) +
                           ", image has " + shape_string(gray.dims()));
    }
    s.gt_mask = binarize_plane(gt_raw, options.gt_threshold);
  }
  if (!fov.empty()) {
    const Tensor<uint8_t> m = read_gray8(fov);
    if (!m.same_shape(gray)) throw IngestionError("mask " + fov.filename().string() + " does not match image size");
    s.fov_mask = binarize_plane(m, options.gt_threshold);
  }
  return s;
}

std::vector<ImageSample> load_dataset(const fs::path& root, DatasetLayout layout, const LoadOptions& options) {
  const fs::path images_dir = root / "images";
  if (!fs::is_directory(images_dir)) throw IngestionError("missing images directory: " + images_dir.string());
  const auto gt_dir = first_existing(root, {"GT", "gt", "ground-truth", "ground_truth"});
  if (!gt_dir) throw IngestionError("missing ground-truth directory (GT/) under " + root.string());
  // RC-SLO patches carry no field-of-view masks.
  const auto mask_dir = layout == DatasetLayout::kIostar ? first_existing(root, {"mask", "masks", "MASK"}) : std::nullopt;

  const auto images = sorted_images(images_dir);
  if (images.empty()) throw IngestionError("no images found in " + images_dir.string());
  const auto gts = index_by_key(*gt_dir);
  const auto masks = mask_dir ? index_by_key(*mask_dir) : std::map<std::string, fs::path>{};

  std::vector<ImageSample> samples;
  samples.reserve(images.size());
  for (const auto& path : images) {
    const std::string key = match_key(path, false);
    auto gt_it = gts.find(key);
    if (gt_it == gts.end()) gt_it = gts.find(match_key(path, true));
    if (gt_it == gts.end()) throw IngestionError("no ground truth for image " + path.filename().string());

    auto mask_it = masks.find(key);
    if (mask_it == masks.end()) mask_it = masks.find(match_key(path, true));
    ImageSample s = load_sample(path, gt_it->second, mask_it != masks.end() ? mask_it->second : fs::path(), options);
    samples.push_back(std::move(s));
  }
  return samples;
}

ImageSample pad_to(const ImageSample& sample, int64_t size, PadAnchor anchor) {
  const int64_t h = sample.height(), w = sample.width();
  if (h > size || w > size) {
    throw ConfigError("cannot pad " + std::to_string(h) + "x" + std::to_string(w) + " image to " +
                      std::to_string(size));
  }
  const int64_t top = anchor == PadAnchor::kCenter ? (size - h) / 2 : 0;
  const int64_t left = anchor == PadAnchor::kCenter ? (size - w) / 2 : 0;
  ImageSample out;
  out.id = sample.id;
  out.original_h = sample.original_h;
  out.original_w = sample.original_w;
  out.pad_top = sample.pad_top + top;
  out.pad_left = sample.pad_left + left;
  out.image = pad_plane(sample.image, size, top, left);
  out.gt_mask = pad_plane(sample.gt_mask, size, top, left);
  if (sample.fov_mask) out.fov_mask = pad_plane(*sample.fov_mask, size, top, left);
  return out;
}

template <typename T>
Tensor<T> crop_back(const Tensor<T>& map, const ImageSample& sample) {
  if (map.rank() < 2 || map.height() != sample.height() || map.width() != sample.width()) {
    throw ShapeError("crop_back: map " + shape_string(map.dims()) + " does not match padded size " +
                     std::to_string(sample.height()) + "x" + std::to_string(sample.width()));
  }
  const int64_t h = map.height(), w = map.width();
  const int64_t oh = sample.original_h, ow = sample.original_w;
  Dims out_dims = map.dims();
  out_dims[out_dims.size() - 2] = oh;
  out_dims[out_dims.size() - 1] = ow;
  Tensor<T> out(out_dims);
  const int64_t planes = map.size() / (h * w);
  for (int64_t p = 0; p < planes; ++p) {
    for (int64_t y = 0; y < oh; ++y) {
      std::copy_n(map.data() + (p * h + y + sample.pad_top) * w + sample.pad_left, ow, out.data() + (p * oh + y) * ow);
    }
  }
  return out;
}

ImageSample unpad(const ImageSample& sample) {
  ImageSample out;
  out.id = sample.id;
  out.original_h = sample.original_h;
  out.original_w = sample.original_w;
  out.image = crop_back(sample.image, sample);
  out.gt_mask = crop_back(sample.gt_mask, sample);
  if (sample.fov_mask) out.fov_mask = crop_back(*sample.fov_mask, sample);
  return out;
}

DatasetSplit split_train_val(const std::vector<ImageSample>& pool, double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  if (pool.empty()) throw ConfigError("cannot split an empty training pool");
  const size_t n = pool.size();
  const size_t n_val = std::max<size_t>(1, static_cast<size_t>(std::llround(fraction * static_cast<double>(n))));
  if (n_val >= n) throw ConfigError("training pool of " + std::to_string(n) + " is too small to hold out a validation set");

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<bool> is_val(n, false);
  for (size_t i = 0; i < n_val; ++i) is_val[order[i]] = true;

  DatasetSplit split;
  split.seed = seed;
  for (size_t i = 0; i < n; ++i) {
    (is_val[i] ? split.val : split.train).push_back(pool[i]);
  }
  std::sort(split.val.begin(), split.val.end(), [](const ImageSample& a, const ImageSample& b) { return a.id < b.id; });
  return split;
}

double vessel_fraction(const ImageSample& sample) {
  int64_t v = 0;
  for (uint8_t g : sample.gt_mask.values()) v += g;
  return sample.gt_mask.size() ? static_cast<double>(v) / static_cast<double>(sample.gt_mask.size()) : 0.0;
}

template Tensor<float> crop_back(const Tensor<float>&, const ImageSample&);
template Tensor<double> crop_back(const Tensor<double>&, const ImageSample&);
template Tensor<uint8_t> crop_back(const Tensor<uint8_t>&, const ImageSample&);

}  // namespace drnet

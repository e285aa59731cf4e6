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
#include <vector>

#include "drnet/tensor.hpp"

namespace drnet {

/// Reads an image as a single (H, W) 8-bit plane. Multi-channel images are
/// collapsed by the per-pixel channel mean (rounded); 16-bit data is scaled
/// to 8 bits. Throws FormatError if the file cannot be decoded.
Tensor<uint8_t> read_gray8(const std::filesystem::path& path);

/// Writes an (H, W) 8-bit plane as PNG.
void write_png(const std::filesystem::path& path, const Tensor<uint8_t>& image);

/// Quantizes values in [0, 1] to round(255 v), clamped to [0, 255].
Tensor<uint8_t> to_gray8(const Tensor<double>& unit);

/// Places (H, W) planes of equal height side by side, left to right.
Tensor<uint8_t> hconcat(const std::vector<Tensor<uint8_t>>& panels);

/// Writes a float64 array in NumPy .npy format (version 1.0, C order).
void write_npy(const std::filesystem::path& path, const Tensor<double>& array);

/// Reads a float64 C-ordered .npy file written by write_npy or NumPy.
Tensor<double> read_npy(const std::filesystem::path& path);

}  // namespace drnet

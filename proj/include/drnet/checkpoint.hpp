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

#include <filesystem>

#include "drnet/model.hpp"

namespace drnet {

/// Binary checkpoint container. Layout (all integers little-endian):
///
///   char[8]  magic "DRNETCKP"
///   u32      format version (1)
///   u32      scalar width in bytes (4 = float32, 8 = float64)
///   u64      header length, then that many bytes of `key = value` text
///            holding the model configuration
///   u64      entry count, then per entry:
///              u32 name length, name bytes, u8 kind (0 parameter, 1 buffer),
///              u32 rank, i64 dims[rank], raw scalar data
///   u64      FNV-1a 64-bit hash of every preceding byte
inline constexpr char kCheckpointMagic[8] = {'D', 'R', 'N', 'E', 'T', 'C', 'K', 'P'};
inline constexpr uint32_t kCheckpointVersion = 1;

template <typename T>
struct Checkpoint {
  ModelConfig config;
  ParameterStore<T> store;
};

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config, const ParameterStore<T>& store);

/// Reads a checkpoint, converting stored scalars to T if needed. Throws
/// FormatError on a corrupt or truncated file.
template <typename T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path);

/// Loads weights into `model`; throws ShapeError if the stored configuration
/// or any parameter shape disagrees with the model.
template <typename T>
void load_weights(const std::filesystem::path& path, DRNet<T>& model);

/// Builds a model from the embedded configuration and loads its weights.
template <typename T>
DRNet<T> load_model(const std::filesystem::path& path);

}  // namespace drnet

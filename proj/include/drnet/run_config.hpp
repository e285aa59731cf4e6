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
#include <string>
#include <vector>

#include "drnet/data.hpp"
#include "drnet/evaluation.hpp"
#include "drnet/model.hpp"
#include "drnet/training.hpp"

namespace drnet {

/// Environment variable that overrides `data.root`.
inline constexpr const char* kDataRootEnv = "DRNET_DATA_ROOT";

/// Everything a command needs, serializable as `key = value` lines with
/// dotted keys (data.*, model.*, train.*, eval.*, output.dir, seed).
struct RunConfig {
  std::string data_root;
  DatasetLayout layout = DatasetLayout::kIostar;
  /// Dataset evaluated after training; empty means the held-out part of data_root.
  std::string test_root;
  DatasetLayout test_layout = DatasetLayout::kIostar;
  /// The first train_count images (filename order) form the training pool;
  /// the rest are the test set.
  int64_t train_count = 20;
  double val_fraction = 0.1;
  int gt_threshold = 128;
  PadAnchor pad_anchor = PadAnchor::kCenter;

  ModelConfig model;
  TrainConfig train;
  EvaluationOptions eval;
  std::string output_dir = "runs/default";
  /// Seeds weight initialization, the validation split, and (unless
  /// train.seed is set explicitly) batch order and DropBlock.
  uint64_t seed = 0;

  void validate() const;
  KeyValues to_key_values() const;
  static RunConfig from_key_values(const KeyValues& kv);

  static RunConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Sets one key. Accepts dotted keys with '-' or '_' (model.encoder-steps)
  /// and the short forms epochs, batch-size, lr, seed, data-root, layout,
  /// test-root, test-layout, out, threshold, fov.
  void set(const std::string& key, const std::string& value);
  /// Applies `--key value` / `--key=value` pairs; a bare `--fov` means true.
  void apply_args(const std::vector<std::string>& args);
  /// Applies DRNET_DATA_ROOT when set.
  void apply_environment();
};

}  // namespace drnet

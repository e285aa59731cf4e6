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

#include "drnet/run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace drnet {
namespace {

std::string anchor_name(PadAnchor a) { return a == PadAnchor::kCenter ? "center" : "top-left"; }

PadAnchor parse_anchor(const std::string& key, const std::string& v) {
  if (v == "center") return PadAnchor::kCenter;
  if (v == "top-left" || v == "top_left") return PadAnchor::kTopLeft;
  throw ConfigError(key + ": expected center or top-left, got '" + v + "'");
}

std::string canonical_key(std::string key) {
  static const std::map<std::string, std::string> kAliases = {
      {"epochs", "train.epochs"},     {"batch_size", "train.batch_size"}, {"lr", "train.learning_rate"},
      {"data_root", "data.root"},     {"layout", "data.layout"},          {"out", "output.dir"},
      {"output_dir", "output.dir"},   {"threshold", "eval.threshold"},    {"fov", "eval.fov"},
      {"test_root", "data.test_root"}, {"test_layout", "data.test_layout"}};
  std::replace(key.begin(), key.end(), '-', '_');
  const auto it = kAliases.find(key);
  return it == kAliases.end() ? key : it->second;
}

}  // namespace

void RunConfig::validate() const {
  if (train_count < 0) throw ConfigError("data.train_count must be >= 0");
  if (!(val_fraction > 0 && val_fraction < 1)) throw ConfigError("data.val_fraction must lie in (0, 1)");
  if (gt_threshold < 1 || gt_threshold > 255) throw ConfigError("data.gt_threshold must lie in [1, 255]");
  if (!(eval.threshold >= 0 && eval.threshold <= 1)) throw ConfigError("eval.threshold must lie in [0, 1]");
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
  model.validate();
  train.validate();
}

KeyValues RunConfig::to_key_values() const {
  KeyValues kv = {{"seed", std::to_string(seed)},
                  {"data.root", data_root},
                  {"data.layout", layout_name(layout)},
                  {"data.test_root", test_root},
                  {"data.test_layout", layout_name(test_layout)},
                  {"data.train_count", std::to_string(train_count)},
                  {"data.val_fraction", format_real(val_fraction)},
                  {"data.gt_threshold", std::to_string(gt_threshold)},
                  {"data.pad_anchor", anchor_name(pad_anchor)}};
  for (auto& p : model.to_key_values()) kv.push_back(std::move(p));
  for (auto& p : train.to_key_values()) kv.push_back(std::move(p));
  kv.emplace_back("eval.threshold", format_real(eval.threshold));
  kv.emplace_back("eval.fov", eval.use_fov ? "true" : "false");
  kv.emplace_back("output.dir", output_dir);
  return kv;
}

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
  RunConfig c;
  c.model = ModelConfig::from_key_values(kv);
  c.train = TrainConfig::from_key_values(kv);
  bool train_seed_given = false;
  bool test_layout_given = false;
  for (const auto& [k, v] : kv) {
    if (k == "seed") {
      c.seed = static_cast<uint64_t>(parse_int(k, v));
    } else if (k == "data.root") {
      c.data_root = v;
    } else if (k == "data.layout") {
      c.layout = parse_layout(v);
    } else if (k == "data.test_root") {
      c.test_root = v;
    } else if (k == "data.test_layout") {
      c.test_layout = parse_layout(v);
      test_layout_given = true;
    } else if (k == "data.train_count") {
      c.train_count = parse_int(k, v);
    } else if (k == "data.val_fraction") {
      c.val_fraction = parse_real(k, v);
    } else if (k == "data.gt_threshold") {
      c.gt_threshold = static_cast<int>(parse_int(k, v));
    } else if (k == "data.pad_anchor") {
      c.pad_anchor = parse_anchor(k, v);
    } else if (k == "eval.threshold") {
      c.eval.threshold = parse_real(k, v);
    } else if (k == "eval.fov") {
      c.eval.use_fov = parse_bool(k, v);
    } else if (k == "output.dir") {
      c.output_dir = v;
    } else if (k == "train.seed") {
      train_seed_given = true;
    } else if (k.rfind("model.", 0) != 0 && k.rfind("train.", 0) != 0) {
      throw ConfigError("unknown configuration key: " + k);
    }
  }
  if (!train_seed_given) c.train.seed = c.seed;
  if (!test_layout_given) c.test_layout = c.layout;
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_key_values(parse_key_values(buf.str()));
  } catch (const FormatError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void RunConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  out << format_key_values(to_key_values());
}

void RunConfig::set(const std::string& raw_key, const std::string& value) {
  const std::string key = canonical_key(raw_key);
  KeyValues kv = to_key_values();
  auto it = std::find_if(kv.begin(), kv.end(), [&](const auto& p) { return p.first == key; });
  if (it == kv.end()) throw ConfigError("unknown configuration key: " + raw_key);
  // The batch order seed follows the global seed unless set separately.
  if (key == "seed" && train.seed == seed) {
    auto ts = std::find_if(kv.begin(), kv.end(), [](const auto& p) { return p.first == "train.seed"; });
    ts->second = value;
  }
  if (key == "data.layout" && test_layout == layout) {
    auto tl = std::find_if(kv.begin(), kv.end(), [](const auto& p) { return p.first == "data.test_layout"; });
    tl->second = value;
  }
  it->second = value;
  *this = from_key_values(kv);
}

void RunConfig::apply_args(const std::vector<std::string>& args) {
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() == 2) throw ConfigError("unexpected argument '" + a + "'");
    std::string key = a.substr(2), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else if (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) {
      value = args[++i];
    } else if (canonical_key(key) == "eval.fov") {
      value = "true";
    } else {
      throw ConfigError("missing value for --" + key);
    }
    set(key, value);
  }
}

void RunConfig::apply_environment() {
  if (const char* root = std::getenv(kDataRootEnv); root && *root) data_root = root;
}

}  // namespace drnet

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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "drnet/checkpoint.hpp"
#include "drnet/model.hpp"
#include "test_support.hpp"

namespace drnet {
namespace {

using testing::random_tensor;
using testing::ScratchDir;

ModelConfig toy_config(int64_t size = 32, int64_t steps = 2, int64_t channels = 2) {
  ModelConfig c;
  c.initial_channels = channels;
  c.encoder_steps = steps;
  c.input_size = size;
  c.block_size = 3;
  return c;
}

Tensor<float> image_of(int64_t size, uint64_t seed, int64_t batch = 1) {
  return random_tensor({batch, 1, size, size}, seed, 0.0, 1.0).cast<float>();
}

TEST(ModelConfig, StageWidthsDoubleFromInitial) {
  const ModelConfig c;
  EXPECT_EQ(c.stage_channels(0), 16);
  EXPECT_EQ(c.stage_channels(1), 32);
  EXPECT_EQ(c.stage_channels(2), 64);
  EXPECT_EQ(c.stage_channels(3), 128);
  EXPECT_EQ(c.stage_resolution(3), 128);
}

TEST(ModelConfig, RejectsInvalidValues) {
  ModelConfig c = toy_config();
  c.input_size = 30;
  EXPECT_THROW(c.validate(), ConfigError);
  c = toy_config();
  c.keep_prob = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = toy_config();
  c.encoder_steps = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = toy_config();
  c.initial_channels = 0;
  EXPECT_THROW(DRNet<float>::build(c, 1), ConfigError);
}

TEST(ModelConfig, KeyValueRoundTrip) {
  ModelConfig c = toy_config(64, 3, 4);
  c.keep_prob = 0.75;
  EXPECT_EQ(ModelConfig::from_key_values(c.to_key_values()), c);
}

TEST(DRNet, ToyModelProducesProbabilityMap) {
  const auto model = DRNet<float>::build(toy_config(), 1);
  const Tensor<float> y = model.predict(image_of(32, 2, 2));
  ASSERT_EQ(y.dims(), (Dims{2, 1, 32, 32}));
  for (float v : y.values()) {
    ASSERT_GT(v, 0.0f);
    ASSERT_LT(v, 1.0f);
  }
}

TEST(DRNet, OutputMatchesInputSize) {
  for (auto [size, steps] : {std::pair<int64_t, int64_t>{32, 2}, {64, 3}, {1024, 4}}) {
    const auto model = DRNet<float>::build(toy_config(size, steps), 3);
    EXPECT_EQ(model.predict(image_of(size, 4)).dims(), (Dims{1, 1, size, size})) << size;
  }
}

TEST(DRNet, RejectsWrongInputShape) {
  const auto model = DRNet<float>::build(toy_config(), 1);
  EXPECT_THROW(model.predict(image_of(64, 1)), ShapeError);
  EXPECT_THROW(model.predict(Tensor<float>({1, 2, 32, 32})), ShapeError);
}

TEST(DRNet, StageTraceFollowsArchitecture) {
  const auto model = DRNet<float>::build(toy_config(64, 3), 1);
  std::vector<std::pair<std::string, Dims>> trace;
  ForwardContext ctx;
  ctx.trace = &trace;
  ag::NoGradGuard guard;
  model.forward(ag::Var<float>::leaf(image_of(64, 1)), ctx);
  auto shape_of = [&](const std::string& name) {
    for (const auto& [n, d] : trace) {
      if (n == name) return d;
    }
    return Dims{};
  };
  EXPECT_EQ(shape_of("enc0.drb"), (Dims{1, 2, 32, 32}));
  EXPECT_EQ(shape_of("enc2.drb"), (Dims{1, 8, 8, 8}));
  EXPECT_EQ(model.aggregation_count(), 2);
  EXPECT_EQ(shape_of("output"), (Dims{1, 1, 64, 64}));
  // Aggregations run from input / 2^(E-1) up to input / 2.
  EXPECT_EQ(model.aggregation(0).spec().target_height, 16);
  EXPECT_EQ(model.aggregation(1).spec().target_height, 32);
}

TEST(DRNet, SameSeedBuildsIdenticalModels) {
  const auto a = DRNet<float>::build(toy_config(), 9);
  const auto b = DRNet<float>::build(toy_config(), 9);
  const auto c = DRNet<float>::build(toy_config(), 10);
  EXPECT_TRUE(a.parameters() == b.parameters());
  EXPECT_FALSE(a.parameters() == c.parameters());
}

TEST(DRNet, ZeroOutputLayerGivesOneHalf) {
  auto model = DRNet<float>::build(toy_config(), 1);
  model.parameters().mutable_value("head.out.weight").fill(0.0f);
  model.parameters().mutable_value("head.out.bias").fill(0.0f);
  const Tensor<float> y = model.predict(image_of(32, 3));
  for (float v : y.values()) ASSERT_EQ(v, 0.5f);
}

TEST(DRNet, InferenceIsDeterministic) {
  const auto model = DRNet<float>::build(toy_config(), 1);
  const Tensor<float> x = image_of(32, 5);
  EXPECT_EQ(model.predict(x), model.predict(x));
}

TEST(DRNet, TrainingWithFullRetentionEqualsInference) {
  ModelConfig c = toy_config();
  c.keep_prob = 1.0;
  const auto model = DRNet<float>::build(c, 1);
  const Tensor<float> x = image_of(32, 5);
  EXPECT_EQ(model.predict(x, /*training=*/true, 123), model.predict(x));
}

TEST(DRNet, DropBlockChangesTrainingOutputsOnly) {
  const auto model = DRNet<float>::build(toy_config(), 1);
  const Tensor<float> x = image_of(32, 5);
  EXPECT_NE(model.predict(x, true, 1), model.predict(x));
  EXPECT_EQ(model.predict(x, true, 1), model.predict(x, true, 1));
}

TEST(DRNet, NonFiniteWeightNamesTheLayer) {
  auto model = DRNet<float>::build(toy_config(), 1);
  model.parameters().mutable_value("bottleneck.conv.weight")[0] = std::numeric_limits<float>::quiet_NaN();
  try {
    model.predict(image_of(32, 1));
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("bottleneck"), std::string::npos) << e.what();
  }
}

TEST(DRNet, ParameterCountProperties) {
  const auto small = DRNet<float>::build(toy_config(32, 2, 2), 1);
  const auto wide = DRNet<float>::build(toy_config(32, 2, 4), 1);
  const auto big_input = DRNet<float>::build(toy_config(64, 2, 2), 1);
  EXPECT_GT(small.parameter_count(), 0);
  EXPECT_GT(wide.parameter_count(), 2 * small.parameter_count());
  // Weights are convolutional, so the input size does not change the count.
  EXPECT_EQ(big_input.parameter_count(), small.parameter_count());
  int64_t counted = 0;
  for (const auto& [group, names] : small.parameter_groups()) {
    for (const auto& n : names) counted += small.parameters().value(n).size();
  }
  EXPECT_EQ(counted, small.parameter_count());
}

TEST(DRNet, ParameterGroupsCoverEveryBlock) {
  const auto model = DRNet<float>::build(toy_config(64, 3), 1);
  std::vector<std::string> groups;
  for (const auto& [g, names] : model.parameter_groups()) groups.push_back(g);
  const std::vector<std::string> expected = {"enc0", "enc1", "enc2", "bottleneck", "agg0",
                                             "dec0", "agg1", "head"};
  for (const auto& g : expected) {
    EXPECT_NE(std::find(groups.begin(), groups.end(), g), groups.end()) << g;
  }
}

TEST(Checkpoint, RoundTripIsBitExact) {
  ScratchDir dir("ckpt");
  const auto model = DRNet<float>::build(toy_config(), 4);
  save_checkpoint(dir / "m.ckpt", model.config(), model.parameters());
  const auto restored = load_model<float>(dir / "m.ckpt");
  EXPECT_EQ(restored.config(), model.config());
  EXPECT_TRUE(restored.parameters() == model.parameters());
  const Tensor<float> x = image_of(32, 6);
  EXPECT_EQ(restored.predict(x), model.predict(x));
}

TEST(Checkpoint, DoubleCheckpointLoadsIntoDouble) {
  ScratchDir dir("ckpt");
  const auto model = DRNet<double>::build(toy_config(), 4);
  save_checkpoint(dir / "m.ckpt", model.config(), model.parameters());
  auto other = DRNet<double>::build(toy_config(), 5);
  load_weights(dir / "m.ckpt", other);
  EXPECT_TRUE(other.parameters() == model.parameters());
}

TEST(Checkpoint, MismatchedConfigurationIsAShapeError) {
  ScratchDir dir("ckpt");
  const auto model = DRNet<float>::build(toy_config(32, 2, 2), 4);
  save_checkpoint(dir / "m.ckpt", model.config(), model.parameters());
  auto wider = DRNet<float>::build(toy_config(32, 2, 4), 4);
  EXPECT_THROW(load_weights(dir / "m.ckpt", wider), ShapeError);
}

TEST(Checkpoint, CorruptOrTruncatedFilesAreFormatErrors) {
  ScratchDir dir("ckpt");
  const auto model = DRNet<float>::build(toy_config(), 4);
  const auto path = dir / "m.ckpt";
  save_checkpoint(path, model.config(), model.parameters());
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& b) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
  };

  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x5a;
  write(flipped);
  EXPECT_THROW(load_checkpoint<float>(path), FormatError);

  write(bytes.substr(0, bytes.size() / 3));
  EXPECT_THROW(load_checkpoint<float>(path), FormatError);

  write("not a checkpoint at all");
  EXPECT_THROW(load_checkpoint<float>(path), FormatError);

  EXPECT_THROW(load_checkpoint<float>(dir / "missing.ckpt"), FormatError);
}

}  // namespace
}  // namespace drnet

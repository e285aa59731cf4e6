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

#include <cstring>

#include "drnet/blocks.hpp"
#include "drnet/dropblock.hpp"
#include "drnet/oracles.hpp"
#include "test_support.hpp"

namespace drnet {
namespace {

using testing::check_gradients;
using testing::random_binary;
using testing::random_tensor;

template <typename T>
using ValueOf = typename std::decay_t<decltype(std::declval<T>().value())>::value_type;

// A block built twice from one seed: once in double, once in long double.
template <template <typename> class Block>
struct Pair {
  ParameterStore<double> store;
  ParameterStore<long double> ref_store;
  Block<double> d;
  Block<long double> ld;

  template <typename... Args>
  explicit Pair(uint64_t seed, Args&&... args) {
    Rng a(seed), b(seed);
    d = Block<double>(store, args..., a);
    ld = Block<long double>(ref_store, args..., b);
  }
  template <typename T>
  const Block<T>& get() const {
    if constexpr (std::is_same_v<T, double>) {
      return d;
    } else {
      return ld;
    }
  }
};

// ---------------------------------------------------------------- DropBlock

TEST(DropBlockGamma, RetentionOneDropsNothing) { EXPECT_EQ(dropblock_gamma(1.0, 7, 64, 64), 0.0); }

TEST(DropBlockGamma, BlockSizeOneIsPerUnitRate) { EXPECT_NEAR(dropblock_gamma(0.9, 1, 32, 32), 0.1, 1e-15); }

TEST(DropBlockGamma, DefaultSettingsOn64) {
  const double expected = (1.0 - 0.86) / 49.0 * (64.0 * 64.0) / (58.0 * 58.0);
  EXPECT_NEAR(dropblock_gamma(0.86, 7, 64, 64), expected, 1e-15);
  EXPECT_NEAR(dropblock_gamma(0.86, 7, 64, 64), 0.003479, 5e-7);
}

TEST(DropBlockGamma, BlockLargerThanFeatureIsRejected) {
  EXPECT_THROW(dropblock_gamma(0.9, 9, 8, 16), ConfigError);
  EXPECT_THROW(dropblock_gamma(0.9, 9, 16, 8), ConfigError);
}

TEST(DropBlockConfig, RejectsInvalidRetention) {
  EXPECT_THROW((DropBlockConfig{7, 0.0, true}.validate(32, 32)), ConfigError);
  EXPECT_THROW((DropBlockConfig{7, 1.5, true}.validate(32, 32)), ConfigError);
  EXPECT_THROW((DropBlockConfig{0, 0.9, true}.validate(32, 32)), ConfigError);
  EXPECT_NO_THROW((DropBlockConfig{7, 1.0, true}.validate(32, 32)));
}

TEST(DropBlockApply, InferenceIsBitExactIdentity) {
  const Tensor<float> x = random_tensor({2, 3, 16, 16}, 1).cast<float>();
  for (double keep : {0.1, 0.5, 0.86}) {
    const Tensor<float> y = dropblock_apply(x, DropBlockConfig{5, keep, false}, 99);
    ASSERT_EQ(std::memcmp(x.data(), y.data(), sizeof(float) * static_cast<size_t>(x.size())), 0);
  }
}

TEST(DropBlockApply, RetentionOneIsIdentityInTraining) {
  const Tensor<double> x = random_tensor({2, 3, 16, 16}, 2);
  EXPECT_EQ(dropblock_apply(x, DropBlockConfig{7, 1.0, true}, 5), x);
}

TEST(DropBlockApply, SurvivorsAreRescaledByTotalOverKept) {
  const Tensor<double> x({1, 2, 32, 32}, 1.0);
  const DropBlockConfig cfg{7, 0.7, true};
  const Tensor<uint8_t> mask = dropblock_mask(x.dims(), cfg, 17);
  const double scale = dropblock_scale(mask);
  int64_t kept = 0;
  for (uint8_t m : mask.values()) kept += m;
  ASSERT_GT(kept, 0);
  EXPECT_DOUBLE_EQ(scale, static_cast<double>(mask.size()) / static_cast<double>(kept));
  const Tensor<double> y = dropblock_apply(x, cfg, 17);
  for (int64_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(y[i], mask[i] ? scale : 0.0);
}

TEST(DropBlockApply, NonFiniteInputIsReported) {
  Tensor<double> x({1, 1, 16, 16}, 1.0);
  x[5] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(dropblock_apply(x, DropBlockConfig{3, 0.9, true}, 1), NumericError);
}

TEST(DropBlockMask, DeterministicPerSeedAndIndependentPerChannel) {
  const DropBlockConfig cfg{3, 0.8, true};
  const Tensor<uint8_t> a = dropblock_mask({1, 2, 32, 32}, cfg, 7), b = dropblock_mask({1, 2, 32, 32}, cfg, 7);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, dropblock_mask({1, 2, 32, 32}, cfg, 8));
  const int64_t plane = 32 * 32;
  EXPECT_NE(std::memcmp(a.data(), a.data() + plane, static_cast<size_t>(plane)), 0);
}

TEST(DropBlockMask, DroppedRegionsAreWholeBlocks) {
  const DropBlockConfig cfg{7, 0.86, true};
  for (uint64_t s = 0; s < 200; ++s) {
    const Tensor<uint8_t> m = dropblock_mask({1, 1, 32, 32}, cfg, s).reshaped({32, 32});
    ASSERT_TRUE(oracle::block_structured(m, 7)) << "seed " << s;
  }
}

TEST(DropBlockMask, MeanDroppedFractionNearOneMinusRetention) {
  const auto st = oracle::dropblock_statistics(1000, 32, 7, 0.86, 2019);
  EXPECT_NEAR(st.mean_zeroed_fraction, 0.14, 0.02);
  // The Monte-Carlo estimate also tracks the exact expectation of the sampler.
  EXPECT_NEAR(st.mean_zeroed_fraction, st.expected_zeroed_fraction, 0.005);
  EXPECT_EQ(st.unstructured_masks, 0);
  EXPECT_TRUE(st.inference_identity);
}

// With block size 1 each unit must be dropped independently at rate 1 - keep.
TEST(DropBlockMask, BlockSizeOneMatchesUnstructuredDropout) {
  const DropBlockConfig cfg{1, 0.8, true};
  const int masks = 2000;
  const int64_t side = 8, n = side * side;
  std::vector<double> dropped(static_cast<size_t>(n), 0.0);
  double both = 0, first = 0, second = 0, pairs = 0;
  for (int s = 0; s < masks; ++s) {
    const Tensor<uint8_t> m = dropblock_mask({1, 1, side, side}, cfg, static_cast<uint64_t>(s));
    for (int64_t i = 0; i < n; ++i) dropped[static_cast<size_t>(i)] += m[i] == 0;
    for (int64_t i = 0; i + 1 < n; i += 2) {
      const bool a = m[i] == 0, b = m[i + 1] == 0;
      both += a && b;
      first += a;
      second += b;
      pairs += 1;
    }
  }
  // Per-position counts against the binomial expectation (63 degrees of freedom).
  const double p = 0.2, expected = masks * p;
  double chi2 = 0;
  for (double d : dropped) chi2 += (d - expected) * (d - expected) / (expected * (1 - p));
  EXPECT_LT(chi2, 103.4);  // 0.999 quantile
  // Neighbouring units: joint drop rate against the product of marginals.
  const double pa = first / pairs, pb = second / pairs, pab = both / pairs;
  const double z = (pab - pa * pb) / std::sqrt(pa * pb * (1 - pa * pb) / pairs);
  EXPECT_LT(std::abs(z), 3.3);
}

// --------------------------------------------------------- residual block

TEST(DoubleResidualBlock, PreservesShape) {
  ParameterStore<float> store;
  Rng rng(1);
  const DoubleResidualBlock<float> drb(store, "drb", 16, rng);
  const auto x = ag::Var<float>::leaf(random_tensor({1, 16, 64, 64}, 2).cast<float>());
  ForwardContext ctx;
  EXPECT_EQ(drb.forward(store, x, ctx).dims(), (Dims{1, 16, 64, 64}));
  ctx.norm = NormMode::kBatch;
  EXPECT_EQ(drb.forward(store, x, ctx).dims(), (Dims{1, 16, 64, 64}));
}

TEST(DoubleResidualBlock, ZeroBranchWeightsGiveIdentity) {
  ParameterStore<double> store;
  Rng rng(3);
  const DoubleResidualBlock<double> drb(store, "drb", 4, rng);
  for (const auto& name : drb.branch_parameter_names()) {
    if (name.ends_with(".weight")) store.mutable_value(name).fill(0.0);
  }
  // Running statistics (0, 1) with unit gamma and zero beta pass values through.
  const Tensor<double> input = random_tensor({2, 4, 12, 12}, 4, 0.0, 2.0);
  const auto y = drb.forward(store, ag::Var<double>::leaf(input), ForwardContext{});
  EXPECT_EQ(y.value(), input);
}

TEST(DoubleResidualBlock, RejectsChannelMismatch) {
  ParameterStore<double> store;
  Rng rng(3);
  const DoubleResidualBlock<double> drb(store, "drb", 4, rng);
  EXPECT_THROW(drb.forward(store, ag::Var<double>::leaf(Tensor<double>({1, 3, 8, 8})), ForwardContext{}),
               ShapeError);
}

TEST(DoubleResidualBlock, GradientsMatchFiniteDifferences) {
  const Pair<DoubleResidualBlock> blk(5, "drb", int64_t{2});
  ForwardContext ctx;
  ctx.norm = NormMode::kBatch;
  const auto r = check_gradients(blk.store, random_tensor({2, 2, 8, 8}, 6), random_binary({2, 2, 8, 8}, 7),
                                 [&](const auto& s, const auto& x) {
                                   return blk.template get<ValueOf<decltype(x)>>().forward(s, x, ctx);
                                 });
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_GT(r.checked, 100);
}

// -------------------------------------------------------------- compression

TEST(Compression, ReducesChannelsAndKeepsResolution) {
  ParameterStore<float> store;
  Rng rng(1);
  const Compression<float> c(store, "c", 64, 16, 7, 0.86, rng);
  const auto x = ag::Var<float>::leaf(Tensor<float>({1, 64, 128, 128}, 0.5f));
  ForwardContext ctx;
  ctx.training = true;
  ctx.seed = 3;
  EXPECT_EQ(c.forward(store, x, ctx).dims(), (Dims{1, 16, 128, 128}));
}

TEST(Compression, IdentityRowsPassChannelSubsetThrough) {
  ParameterStore<double> store;
  Rng rng(1);
  const Compression<double> c(store, "c", 6, 3, 3, 0.5, rng);
  Tensor<double>& w = store.mutable_value(c.conv_name() + ".weight");
  w.fill(0.0);
  const int64_t picks[3] = {4, 0, 2};
  for (int64_t o = 0; o < 3; ++o) w.at(o, picks[o], 0, 0) = 1.0;
  if (store.contains(c.conv_name() + ".bias")) store.mutable_value(c.conv_name() + ".bias").fill(0.0);

  const Tensor<double> input = random_tensor({2, 6, 8, 8}, 9);
  const auto y = c.forward(store, ag::Var<double>::leaf(input), ForwardContext{}).value();
  for (int64_t n = 0; n < 2; ++n) {
    for (int64_t o = 0; o < 3; ++o) {
      for (int64_t p = 0; p < 64; ++p) {
        ASSERT_EQ(y.data()[(n * 3 + o) * 64 + p], input.data()[(n * 6 + picks[o]) * 64 + p]);
      }
    }
  }
}

TEST(Compression, DropBlockPrecedesConvolution) {
  // With a constant input, a dropped block shows up as a block of exact
  // bias values in every output channel.
  ParameterStore<double> store;
  Rng rng(2);
  const Compression<double> c(store, "c", 1, 2, 3, 0.7, rng);
  ForwardContext ctx;
  ctx.training = true;
  ctx.seed = 4;
  const auto y = c.forward(store, ag::Var<double>::leaf(Tensor<double>({1, 1, 16, 16}, 1.0)), ctx).value();
  int zeros = 0;
  for (int64_t i = 0; i < 256; ++i) zeros += y[i] == 0.0;
  EXPECT_GT(zeros, 0);
  for (int64_t i = 0; i < 256; ++i) EXPECT_EQ(y[i] == 0.0, y[256 + i] == 0.0);
}

TEST(Compression, GradientsMatchFiniteDifferences) {
  const Pair<Compression> blk(8, "c", int64_t{4}, int64_t{2}, 3, 0.8);
  ForwardContext ctx;
  ctx.training = true;
  ctx.seed = 11;
  const auto r = check_gradients(blk.store, random_tensor({2, 4, 8, 8}, 12), random_binary({2, 2, 8, 8}, 13),
                                 [&](const auto& s, const auto& x) {
                                   return blk.template get<ValueOf<decltype(x)>>().forward(s, x, ctx);
                                 });
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

// ---------------------------------------------------------------- resampling

TEST(Resampler, HalvesWithOneMaxPool) {
  ParameterStore<float> store;
  Rng rng(1);
  const Resampler<float> r(store, "r", 16, 512, 512, 256, 256, rng);
  EXPECT_EQ(r.steps(), -1);
  const Tensor<float> input = random_tensor({1, 16, 512, 512}, 2).cast<float>();
  const auto y = r.forward(store, ag::Var<float>::leaf(input)).value();
  ASSERT_EQ(y.dims(), (Dims{1, 16, 256, 256}));
  for (int64_t c = 0; c < 16; c += 5) {
    for (int64_t yy = 0; yy < 256; yy += 37) {
      for (int64_t xx = 0; xx < 256; xx += 41) {
        const float m = std::max({input.at(0, c, 2 * yy, 2 * xx), input.at(0, c, 2 * yy, 2 * xx + 1),
                                  input.at(0, c, 2 * yy + 1, 2 * xx), input.at(0, c, 2 * yy + 1, 2 * xx + 1)});
        EXPECT_EQ(y.at(0, c, yy, xx), m);
      }
    }
  }
}

TEST(Resampler, EqualSizeIsIdentity) {
  ParameterStore<double> store;
  Rng rng(1);
  const Resampler<double> r(store, "r", 3, 16, 16, 16, 16, rng);
  const Tensor<double> input = random_tensor({2, 3, 16, 16}, 3);
  EXPECT_EQ(r.forward(store, ag::Var<double>::leaf(input)).value(), input);
  EXPECT_EQ(store.size(), 0u);
}

TEST(Resampler, MaxPoolOfConstantIsConstant) {
  ParameterStore<double> store;
  Rng rng(1);
  const Resampler<double> r(store, "r", 2, 32, 32, 8, 8, rng);
  const auto y = r.forward(store, ag::Var<double>::leaf(Tensor<double>({1, 2, 32, 32}, 0.25))).value();
  EXPECT_EQ(y, Tensor<double>({1, 2, 8, 8}, 0.25));
}

TEST(Resampler, GrowsWithTransposedConvolutions) {
  ParameterStore<double> store;
  Rng rng(1);
  const Resampler<double> r(store, "r", 3, 4, 4, 16, 16, rng);
  EXPECT_EQ(r.steps(), 2);
  EXPECT_EQ(r.forward(store, ag::Var<double>::leaf(random_tensor({1, 3, 4, 4}, 4))).dims(), (Dims{1, 3, 16, 16}));
}

TEST(Resampler, NonPowerOfTwoRatioIsRejected) {
  EXPECT_THROW(resample_steps(24, 16), ConfigError);
  EXPECT_THROW(resample_steps(16, 48), ConfigError);
  EXPECT_EQ(resample_steps(64, 16), -2);
  EXPECT_EQ(resample_steps(8, 8), 0);
  ParameterStore<double> store;
  Rng rng(1);
  EXPECT_THROW(Resampler<double>(store, "r", 2, 12, 12, 8, 8, rng), ConfigError);
}

TEST(Resampler, GradientsMatchFiniteDifferences) {
  for (auto [from, to] : {std::pair<int64_t, int64_t>{8, 16}, {16, 4}}) {
    const Pair<Resampler> blk(9, "r", int64_t{2}, from, from, to, to);
    const auto r = check_gradients(blk.store, random_tensor({2, 2, from, from}, 14), random_binary({2, 2, to, to}, 15),
                                   [&](const auto& s, const auto& x) {
                                     return blk.template get<ValueOf<decltype(x)>>().forward(s, x);
                                   });
    EXPECT_LT(r.max_rel_error, 1e-4) << from << "->" << to << " " << r.worst;
  }
}

// ---------------------------------------------------------------- aggregation

AggregationSpec two_input_spec(int64_t size) {
  AggregationSpec spec;
  spec.target_height = spec.target_width = size;
  spec.inputs = {AggregationInput{16, size, size, 0, true}, AggregationInput{32, size / 2, size / 2, 16, false}};
  return spec;
}

TEST(AdaptiveAggregation, SingleDirectInputPassesThrough) {
  AggregationSpec spec;
  spec.target_height = spec.target_width = 8;
  spec.inputs = {AggregationInput{3, 8, 8, 0, true}};
  ParameterStore<double> store;
  Rng rng(1);
  const AdaptiveAggregation<double> agg(store, "agg", spec, 3, 0.9, rng);
  const std::vector<ag::Var<double>> in = {ag::Var<double>::leaf(random_tensor({1, 3, 8, 8}, 2))};
  EXPECT_EQ(agg.forward(store, in, ForwardContext{}).value(), in[0].value());
}

TEST(AdaptiveAggregation, ConcatenatesCompressedInputsAtTarget) {
  const AggregationSpec spec = two_input_spec(512);
  EXPECT_EQ(spec.output_channels(), 32);
  ParameterStore<float> store;
  Rng rng(1);
  const AdaptiveAggregation<float> agg(store, "agg", spec, 7, 0.86, rng);
  const std::vector<ag::Var<float>> in = {ag::Var<float>::leaf(Tensor<float>({1, 16, 512, 512}, 0.1f)),
                                          ag::Var<float>::leaf(Tensor<float>({1, 32, 256, 256}, 0.2f))};
  EXPECT_EQ(agg.forward(store, in, ForwardContext{}).dims(), (Dims{1, 32, 512, 512}));
}

TEST(AdaptiveAggregation, ZeroInputsGiveZeroOutput) {
  const AggregationSpec spec = two_input_spec(16);
  ParameterStore<double> store;
  Rng rng(1);
  const AdaptiveAggregation<double> agg(store, "agg", spec, 3, 0.9, rng);
  const std::vector<ag::Var<double>> in = {ag::Var<double>::leaf(Tensor<double>({1, 16, 16, 16})),
                                           ag::Var<double>::leaf(Tensor<double>({1, 32, 8, 8}))};
  EXPECT_EQ(agg.forward(store, in, ForwardContext{}).value(), Tensor<double>({1, 32, 16, 16}));
}

TEST(AdaptiveAggregation, OutputChannelsAreTheSumOfDeclaredWidths) {
  AggregationSpec spec;
  spec.target_height = spec.target_width = 8;
  spec.inputs = {AggregationInput{5, 16, 16, 3, false}, AggregationInput{7, 8, 8, 0, true},
                 AggregationInput{9, 4, 4, 2, false}};
  EXPECT_EQ(spec.output_channels(), 3 + 7 + 2);
  EXPECT_EQ(spec.direct_index(), 1u);
  ParameterStore<double> store;
  Rng rng(1);
  const AdaptiveAggregation<double> agg(store, "agg", spec, 3, 0.9, rng);
  const std::vector<ag::Var<double>> in = {ag::Var<double>::leaf(random_tensor({1, 5, 16, 16}, 1)),
                                           ag::Var<double>::leaf(random_tensor({1, 7, 8, 8}, 2)),
                                           ag::Var<double>::leaf(random_tensor({1, 9, 4, 4}, 3))};
  const auto y = agg.forward(store, in, ForwardContext{}).value();
  EXPECT_EQ(y.dims(), (Dims{1, 12, 8, 8}));
  // The direct input lands unchanged in its slot after the first input's channels.
  for (int64_t c = 0; c < 7; ++c) {
    for (int64_t p = 0; p < 64; ++p) ASSERT_EQ(y.data()[(3 + c) * 64 + p], in[1].value().data()[c * 64 + p]);
  }
}

TEST(AdaptiveAggregation, RejectsBadSpecs) {
  AggregationSpec empty;
  empty.target_height = empty.target_width = 8;
  EXPECT_THROW(empty.validate(), ConfigError);

  AggregationSpec none = empty;
  none.inputs = {AggregationInput{4, 8, 8, 2, false}};
  EXPECT_THROW(none.validate(), ConfigError);

  AggregationSpec two = empty;
  two.inputs = {AggregationInput{4, 8, 8, 0, true}, AggregationInput{4, 8, 8, 0, true}};
  EXPECT_THROW(two.validate(), ConfigError);

  ParameterStore<double> store;
  Rng rng(1);
  EXPECT_THROW(AdaptiveAggregation<double>(store, "agg", two, 3, 0.9, rng), ConfigError);
}

TEST(AdaptiveAggregation, GradientsMatchFiniteDifferences) {
  AggregationSpec spec;
  spec.target_height = spec.target_width = 8;
  spec.inputs = {AggregationInput{2, 16, 16, 2, false}, AggregationInput{2, 8, 8, 0, true},
                 AggregationInput{4, 4, 4, 1, false}};
  const Pair<AdaptiveAggregation> blk(10, "agg", spec, 3, 0.8);
  ForwardContext ctx;
  ctx.training = true;
  ctx.seed = 21;
  // The helper takes one input tensor, so the three inputs travel packed.
  const Tensor<double> a = random_tensor({2, 2, 16, 16}, 16), b = random_tensor({2, 2, 8, 8}, 17),
                       c = random_tensor({2, 4, 4, 4}, 18);
  Tensor<double> packed({a.size() + b.size() + c.size()});
  std::copy_n(a.data(), a.size(), packed.data());
  std::copy_n(b.data(), b.size(), packed.data() + a.size());
  std::copy_n(c.data(), c.size(), packed.data() + a.size() + b.size());

  auto forward = [&](const auto& s, const auto& x) {
    using T = ValueOf<decltype(x)>;
    const Tensor<T>& v = x.value();
    std::vector<ag::Var<T>> parts;
    int64_t offset = 0;
    for (const Dims& d : {a.dims(), b.dims(), c.dims()}) {
      Tensor<T> t(d);
      std::copy_n(v.data() + offset, t.size(), t.data());
      offset += t.size();
      parts.push_back(ag::Var<T>::leaf(std::move(t)));
    }
    return blk.template get<T>().forward(s, parts, ctx);
  };
  const auto r = check_gradients(blk.store, packed, random_binary({2, 5, 8, 8}, 19), forward, /*check_input=*/false);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_EQ(r.checked, 16);  // two compressions and one transposed convolution
}

}  // namespace
}  // namespace drnet

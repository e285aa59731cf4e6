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

#include <algorithm>
#include <cmath>

#include "drnet/model.hpp"
#include "drnet/oracles.hpp"
#include "drnet/rng.hpp"

namespace drnet::oracle {
namespace {

struct Problem {
  Tensor<double> image;
  Tensor<double> target;
};

Problem make_problem(const GradCheckOptions& o) {
  Rng rng(mix_seed(o.seed, 1));
  Problem p{Tensor<double>({o.batch, 1, o.input_size, o.input_size}),
            Tensor<double>({o.batch, 1, o.input_size, o.input_size})};
  for (int64_t i = 0; i < p.image.size(); ++i) {
    p.image[i] = rng.uniform();
    p.target[i] = rng.uniform() < 0.2 ? 1.0 : 0.0;
  }
  return p;
}

ForwardContext grad_context(const GradCheckOptions& o) {
  ForwardContext ctx;
  ctx.training = true;
  ctx.seed = mix_seed(o.seed, 2);
  ctx.norm = NormMode::kBatch;
  return ctx;
}

constexpr double kLossEps = 1e-7;

template <typename T>
ag::Var<T> loss_of(const DRNet<T>& model, const Problem& p, const GradCheckOptions& o) {
  const auto prob = model.forward(ag::Var<T>::leaf(p.image.cast<T>()), grad_context(o));
  return ag::binary_cross_entropy(prob, p.target.cast<T>(), kLossEps);
}

}  // namespace

template <typename T>
GradCheckReport gradient_check(const GradCheckOptions& o) {
  ModelConfig cfg;
  cfg.initial_channels = o.initial_channels;
  cfg.encoder_steps = o.encoder_steps;
  cfg.input_size = o.input_size;
  const DRNet<T> model = DRNet<T>::build(cfg, o.seed);
  const Problem problem = make_problem(o);

  model.parameters().zero_grad();
  loss_of(model, problem, o).backward();

  // Finite differences in extended precision on the very same weights.
  using R = long double;
  DRNet<R> ref = DRNet<R>::build(cfg, o.seed);
  ref.set_parameters(model.parameters().template cast<R>());
  auto ref_loss = [&] {
    ag::NoGradGuard guard;
    return loss_of(ref, problem, o).value()[0];
  };

  GradCheckReport report;
  Rng rng(mix_seed(o.seed, 3));
  for (const auto& [group, names] : model.parameter_groups()) {
    // Flat (name, index) list of every scalar in the group.
    std::vector<std::pair<const std::string*, int64_t>> scalars;
    for (const auto& name : names) {
      for (int64_t i = 0; i < model.parameters().value(name).size(); ++i) scalars.emplace_back(&name, i);
    }
    rng.shuffle(scalars);
    const size_t n = std::min(scalars.size(), static_cast<size_t>(o.samples_per_group));

    GroupGradResult g;
    g.group = group;
    for (size_t s = 0; s < n; ++s) {
      const std::string& name = *scalars[s].first;
      const int64_t idx = scalars[s].second;
      const double analytic = static_cast<double>(model.parameters().get(name).grad()[idx]);

      R& w = ref.parameters().mutable_value(name)[idx];
      const R w0 = w;
      const R h = static_cast<R>(o.step) * std::max<R>(1, std::abs(w0));
      w = w0 + h;
      const R up = ref_loss();
      w = w0 - h;
      const R down = ref_loss();
      w = w0;
      const double numeric = static_cast<double>((up - down) / ((w0 + h) - (w0 - h)));

      const double err = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), o.floor});
      if (err > g.max_rel_error || g.worst.empty()) {
        g.max_rel_error = std::max(g.max_rel_error, err);
        g.worst = name + "[" + std::to_string(idx) + "] analytic=" + std::to_string(analytic) +
                  " numeric=" + std::to_string(numeric);
      }
      ++g.sampled;
    }
    report.max_rel_error = std::max(report.max_rel_error, g.max_rel_error);
    report.groups.push_back(std::move(g));
  }
  return report;
}

template GradCheckReport gradient_check<float>(const GradCheckOptions&);
template GradCheckReport gradient_check<double>(const GradCheckOptions&);

}  // namespace drnet::oracle

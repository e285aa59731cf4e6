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

#include "drnet/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "drnet/evaluation.hpp"
#include "drnet/ops.hpp"
#include "drnet/rng.hpp"

namespace drnet {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw ConfigError("train.learning_rate must be > 0");
  if (optimizer != "adam") throw ConfigError("train.optimizer: only 'adam' is supported");
  if (loss != "bce") throw ConfigError("train.loss: only 'bce' is supported");
  if (checkpoint_metric != "val_accuracy") throw ConfigError("train.checkpoint_metric: only 'val_accuracy' is supported");
  if (!(threshold >= 0 && threshold <= 1)) throw ConfigError("train.threshold must lie in [0, 1]");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1) || !(adam_beta2 >= 0 && adam_beta2 < 1)) {
    throw ConfigError("train.adam_beta1/2 must lie in [0, 1)");
  }
  if (!(adam_eps > 0)) throw ConfigError("train.adam_eps must be > 0");
  if (!(loss_eps > 0 && loss_eps < 0.5)) throw ConfigError("train.loss_eps must lie in (0, 0.5)");
  if (!(bn_momentum > 0 && bn_momentum <= 1)) throw ConfigError("train.bn_momentum must lie in (0, 1]");
}

KeyValues TrainConfig::to_key_values() const {
  return {{"train.batch_size", std::to_string(batch_size)},
          {"train.epochs", std::to_string(epochs)},
          {"train.learning_rate", format_real(learning_rate)},
          {"train.optimizer", optimizer},
          {"train.loss", loss},
          {"train.checkpoint_metric", checkpoint_metric},
          {"train.seed", std::to_string(seed)},
          {"train.threshold", format_real(threshold)},
          {"train.adam_beta1", format_real(adam_beta1)},
          {"train.adam_beta2", format_real(adam_beta2)},
          {"train.adam_eps", format_real(adam_eps)},
          {"train.loss_eps", format_real(loss_eps)},
          {"train.bn_momentum", format_real(bn_momentum)}};
}

TrainConfig TrainConfig::from_key_values(const KeyValues& kv) {
  TrainConfig c;
  for (const auto& [k, v] : kv) {
    if (k == "train.batch_size") {
      c.batch_size = parse_int(k, v);
    } else if (k == "train.epochs") {
      c.epochs = parse_int(k, v);
    } else if (k == "train.learning_rate") {
      c.learning_rate = parse_real(k, v);
    } else if (k == "train.optimizer") {
      c.optimizer = v;
    } else if (k == "train.loss") {
      c.loss = v;
    } else if (k == "train.checkpoint_metric") {
      c.checkpoint_metric = v;
    } else if (k == "train.seed") {
      c.seed = static_cast<uint64_t>(parse_int(k, v));
    } else if (k == "train.threshold") {
      c.threshold = parse_real(k, v);
    } else if (k == "train.adam_beta1") {
      c.adam_beta1 = parse_real(k, v);
    } else if (k == "train.adam_beta2") {
      c.adam_beta2 = parse_real(k, v);
    } else if (k == "train.adam_eps") {
      c.adam_eps = parse_real(k, v);
    } else if (k == "train.loss_eps") {
      c.loss_eps = parse_real(k, v);
    } else if (k == "train.bn_momentum") {
      c.bn_momentum = parse_real(k, v);
    } else if (k.rfind("train.", 0) == 0) {
      throw ConfigError("unknown train key: " + k);
    }
  }
  return c;
}

int64_t select_best_epoch(std::span<const double> val_accuracy) {
  if (val_accuracy.empty()) throw ConfigError("select_best_epoch: empty history");
  size_t best = 0;
  for (size_t i = 1; i < val_accuracy.size(); ++i) {
    if (val_accuracy[i] > val_accuracy[best]) best = i;
  }
  return static_cast<int64_t>(best) + 1;
}

double bce_loss(const Tensor<double>& prob, const Tensor<uint8_t>& gt, double eps) {
  if (prob.size() != gt.size()) {
    throw ShapeError("bce_loss: probabilities " + shape_string(prob.dims()) + " vs ground truth " +
                     shape_string(gt.dims()));
  }
  if (prob.size() == 0) throw ShapeError("bce_loss: empty input");
  double sum = 0.0;
  for (int64_t i = 0; i < prob.size(); ++i) {
    if (std::isnan(prob[i])) throw NumericError("bce_loss: NaN probability");
    const double p = std::clamp(prob[i], eps, 1.0 - eps);
    sum -= gt[i] ? std::log(p) : std::log1p(-p);
  }
  return sum / static_cast<double>(prob.size());
}

template <typename T>
void Adam<T>::step(ParameterStore<T>& store) {
  const auto& entries = store.entries();
  if (m_.empty()) {
    m_.resize(entries.size());
    v_.resize(entries.size());
  }
  if (m_.size() != entries.size()) throw ShapeError("Adam: parameter store layout changed between steps");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.kind != EntryKind::kParameter || !e.var.has_grad()) continue;
    const Tensor<T>& g = e.var.grad();
    auto& m = m_[i];
    auto& v = v_[i];
    if (m.empty()) {
      m.assign(static_cast<size_t>(g.size()), 0.0);
      v.assign(static_cast<size_t>(g.size()), 0.0);
    }
    Tensor<T>& w = store.mutable_value(e.name);
    for (int64_t j = 0; j < g.size(); ++j) {
      const double gj = static_cast<double>(g[j]);
      auto& mj = m[static_cast<size_t>(j)];
      auto& vj = v[static_cast<size_t>(j)];
      mj = beta1_ * mj + (1.0 - beta1_) * gj;
      vj = beta2_ * vj + (1.0 - beta2_) * gj * gj;
      w[j] -= static_cast<T>(lr_ * (mj / c1) / (std::sqrt(vj / c2) + eps_));
    }
  }
}

template <typename T>
Validation validate_model(const DRNet<T>& model, const std::vector<ImageSample>& samples, double threshold,
                          double loss_eps) {
  if (samples.empty()) throw ConfigError("validation set is empty");
  const ModelPredictor<T> predictor(model);
  Validation out;
  for (const auto& s : samples) {
    const Tensor<double> prob = predict_sample(predictor, s);
    const ImageSample original = s.padded() ? unpad(s) : s;
    out.accuracy += accuracy(confusion_counts(binarize(prob, threshold), original.gt_mask));
    out.loss += bce_loss(prob, original.gt_mask, loss_eps);
  }
  out.accuracy /= static_cast<double>(samples.size());
  out.loss /= static_cast<double>(samples.size());
  return out;
}

template <typename T>
TrainResult<T> train(DRNet<T>& model, const DatasetSplit& split, const TrainConfig& config,
                     const EpochCallback& on_epoch) {
  config.validate();
  if (split.train.empty()) throw ConfigError("training set is empty");
  if (split.val.empty()) throw ConfigError("validation set is empty");
  const int64_t size = model.config().input_size;

  // Training batches use the padded images; the loss covers the full input.
  std::vector<ImageSample> train_set;
  train_set.reserve(split.train.size());
  for (const auto& s : split.train) {
    train_set.push_back(s.height() == size && s.width() == size ? s : pad_to(s, size));
  }

  TrainResult<T> result;
  result.history.config = config;
  Adam<T> adam(config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_eps);
  ParameterStore<T>& store = model.parameters();
  double best_acc = -1.0;
  uint64_t step = 0;
  const int64_t n = static_cast<int64_t>(train_set.size());
  const int64_t plane = size * size;

  for (int64_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<int64_t> order(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    Rng rng(config.seed + static_cast<uint64_t>(epoch));
    rng.shuffle(order);

    double loss_sum = 0.0;
    int64_t batches = 0;
    for (int64_t b0 = 0; b0 < n; b0 += config.batch_size) {
      const int64_t bs = std::min(config.batch_size, n - b0);
      Tensor<T> images({bs, 1, size, size});
      Tensor<T> targets({bs, 1, size, size});
      for (int64_t k = 0; k < bs; ++k) {
        const ImageSample& s = train_set[static_cast<size_t>(order[static_cast<size_t>(b0 + k)])];
        for (int64_t i = 0; i < plane; ++i) {
          images[k * plane + i] = static_cast<T>(s.image[i]);
          targets[k * plane + i] = static_cast<T>(s.gt_mask[i]);
        }
      }

      const int64_t batch_index = batches + 1;
      std::vector<ObservedStats> observed;
      try {
        ForwardContext ctx;
        ctx.training = true;
        ctx.seed = mix_seed(config.seed, step);
        ctx.norm = NormMode::kBatch;
        ctx.observed_stats = &observed;
        const auto prob = model.forward(ag::Var<T>::leaf(std::move(images)), ctx);
        const auto loss = ag::binary_cross_entropy(prob, targets, config.loss_eps);
        const double lv = static_cast<double>(loss.value()[0]);
        if (!std::isfinite(lv)) throw NumericError("non-finite loss");
        store.zero_grad();
        loss.backward();
        adam.step(store);
        loss_sum += lv;
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ": " + e.what());
      }
      const double mom = config.bn_momentum;
      for (const auto& obs : observed) {
        Tensor<T>& rm = store.mutable_value(obs.layer + ".running_mean");
        Tensor<T>& rv = store.mutable_value(obs.layer + ".running_var");
        for (size_t c = 0; c < obs.mean.size(); ++c) {
          const auto i = static_cast<int64_t>(c);
          rm[i] = static_cast<T>((1.0 - mom) * static_cast<double>(rm[i]) + mom * obs.mean[c]);
          rv[i] = static_cast<T>((1.0 - mom) * static_cast<double>(rv[i]) + mom * obs.var[c]);
        }
      }
      ++batches;
      ++step;
    }
    store.zero_grad();

    const Validation val = validate_model(model, split.val, config.threshold, config.loss_eps);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(batches);
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (val.accuracy > best_acc) {
      best_acc = val.accuracy;
      result.best = store;
      result.history.best_epoch = epoch;
    }
    result.history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.last = store;
  return result;
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  out << "epoch,train_loss,val_loss,val_accuracy,wall_time\n";
  for (const auto& r : history.epochs) {
    out << r.epoch << ',' << format_real(r.train_loss) << ',' << format_real(r.val_loss) << ','
        << format_real(r.val_accuracy) << ',' << format_real(r.wall_time) << "\n";
  }
}

#define DRNET_INSTANTIATE_TRAIN(T)                                                                          \
  template class Adam<T>;                                                                                   \
  template Validation validate_model(const DRNet<T>&, const std::vector<ImageSample>&, double, double);     \
  template TrainResult<T> train(DRNet<T>&, const DatasetSplit&, const TrainConfig&, const EpochCallback&);

DRNET_INSTANTIATE_TRAIN(float)
DRNET_INSTANTIATE_TRAIN(double)

}  // namespace drnet

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

#include "drnet/evaluation.hpp"

namespace drnet {
namespace {

template <typename F>
std::optional<double> defined(F&& f) {
  try {
    return f();
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
}

}  // namespace

template <typename T>
Tensor<double> ModelPredictor<T>::predict(const ImageSample& padded) const {
  const Tensor<T> prob = model_.predict(padded.image.template cast<T>());
  return prob.template cast<double>().reshaped({prob.height(), prob.width()});
}

Tensor<double> GroundTruthOracle::predict(const ImageSample& padded) const { return padded.gt_mask.cast<double>(); }

Tensor<double> predict_sample(const Predictor& predictor, const ImageSample& sample) {
  const int64_t size = predictor.input_size();
  if (size == 0 || (sample.height() == size && sample.width() == size)) {
    return crop_back(predictor.predict(sample), sample);
  }
  const ImageSample padded = pad_to(sample.padded() ? unpad(sample) : sample, size);
  return crop_back(predictor.predict(padded), padded);
}

ImageMetrics image_metrics(const std::string& id, const Tensor<double>& prob, const Tensor<uint8_t>& gt,
                           const Tensor<uint8_t>* fov, double threshold) {
  ImageMetrics m;
  m.id = id;
  m.counts = confusion_counts(binarize(prob, threshold), gt, fov);
  m.values.sen = defined([&] { return sensitivity(m.counts); });
  m.values.spe = defined([&] { return specificity(m.counts); });
  m.values.acc = defined([&] { return accuracy(m.counts); });
  m.values.mcc = defined([&] { return mcc(m.counts); });
  m.values.auc = defined([&] { return auc(gather_scores(prob, gt, fov)); });
  return m;
}

MetricsReport aggregate(std::vector<ImageMetrics> images, const ScoredPixels& pooled, bool used_fov) {
  MetricsReport r;
  r.used_fov = used_fov;
  for (const auto& im : images) r.total += im.counts;
  r.pooled.sen = sensitivity(r.total);
  r.pooled.spe = specificity(r.total);
  r.pooled.acc = accuracy(r.total);
  r.pooled.mcc = mcc(r.total);
  r.pooled.auc = auc(pooled);
  r.roc = roc_curve(pooled.scores, pooled.labels);

  auto mean_of = [&](std::optional<double> MetricValues::*field) -> std::optional<double> {
    double sum = 0.0;
    int n = 0;
    for (const auto& im : images) {
      if (const auto& v = im.values.*field) {
        sum += *v;
        ++n;
      }
    }
    return n ? std::optional<double>(sum / n) : std::nullopt;
  };
  r.per_image_mean.sen = mean_of(&MetricValues::sen);
  r.per_image_mean.spe = mean_of(&MetricValues::spe);
  r.per_image_mean.acc = mean_of(&MetricValues::acc);
  r.per_image_mean.auc = mean_of(&MetricValues::auc);
  r.per_image_mean.mcc = mean_of(&MetricValues::mcc);
  r.images = std::move(images);
  return r;
}

MetricsReport evaluate_dataset(const Predictor& predictor, const std::vector<ImageSample>& samples,
                               const EvaluationOptions& options) {
  if (samples.empty()) throw ConfigError("evaluate_dataset: no samples");
  std::vector<ImageMetrics> images;
  ScoredPixels pooled;
  bool used_fov = false;
  for (const auto& sample : samples) {
    const Tensor<double> prob = predict_sample(predictor, sample);
    const ImageSample original = sample.padded() ? unpad(sample) : sample;
    const Tensor<uint8_t>* fov = options.use_fov && original.fov_mask ? &*original.fov_mask : nullptr;
    used_fov = used_fov || fov != nullptr;
    images.push_back(image_metrics(sample.id, prob, original.gt_mask, fov, options.threshold));
    pooled.append(gather_scores(prob, original.gt_mask, fov));
  }
  return aggregate(std::move(images), pooled, used_fov);
}

template class ModelPredictor<float>;
template class ModelPredictor<double>;

}  // namespace drnet

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

#include "drnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace drnet {
namespace {

using i128 = __int128;

void check_binary_plane(const Tensor<uint8_t>& t, const char* what) {
  for (uint8_t v : t.values()) {
    if (v > 1) throw DomainError(std::string(what) + " is not binary (found value " + std::to_string(v) + ")");
  }
}

void check_pair(std::span<const double> scores, std::span<const uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("auc: " + std::to_string(scores.size()) + " scores but " + std::to_string(labels.size()) +
                     " labels");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw NumericError("auc: NaN score");
  }
  for (uint8_t l : labels) {
    if (l > 1) throw DomainError("auc: labels are not binary");
  }
}

// Scores of each class, sorted ascending.
void split_by_class(std::span<const double> scores, std::span<const uint8_t> labels, std::vector<double>& pos,
                    std::vector<double>& neg) {
  for (size_t i = 0; i < scores.size(); ++i) (labels[i] ? pos : neg).push_back(scores[i]);
  if (pos.empty() || neg.empty()) throw UndefinedMetricError("auc: ground truth contains a single class");
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
}

double ratio(int64_t num, int64_t den, const char* metric) {
  if (den == 0) throw UndefinedMetricError(std::string(metric) + " is undefined: zero denominator");
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion_counts(const Tensor<uint8_t>& pred, const Tensor<uint8_t>& gt, const Tensor<uint8_t>* fov) {
  if (!pred.same_shape(gt)) {
    throw ShapeError("confusion_counts: prediction " + shape_string(pred.dims()) + " vs ground truth " +
                     shape_string(gt.dims()));
  }
  if (fov && !fov->same_shape(gt)) {
    throw ShapeError("confusion_counts: mask " + shape_string(fov->dims()) + " vs ground truth " +
                     shape_string(gt.dims()));
  }
  check_binary_plane(pred, "prediction");
  check_binary_plane(gt, "ground truth");
  if (fov) check_binary_plane(*fov, "field-of-view mask");

  // Index 2*gt + pred: 0 tn, 1 fp, 2 fn, 3 tp.
  int64_t tally[4] = {0, 0, 0, 0};
  const uint8_t* p = pred.data();
  const uint8_t* g = gt.data();
  const uint8_t* m = fov ? fov->data() : nullptr;
  for (int64_t i = 0; i < pred.size(); ++i) {
    if (m && !m[i]) continue;
    ++tally[2 * g[i] + p[i]];
  }
  return {tally[3], tally[1], tally[0], tally[2]};
}

double sensitivity(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn, "sensitivity"); }
double specificity(const ConfusionCounts& c) { return ratio(c.tn, c.tn + c.fp, "specificity"); }
double accuracy(const ConfusionCounts& c) { return ratio(c.tp + c.tn, c.total(), "accuracy"); }

double mcc(const ConfusionCounts& c) {
  const int64_t a = c.tp + c.fp, b = c.tp + c.fn, d = c.tn + c.fp, e = c.tn + c.fn;
  if (a == 0 || b == 0 || d == 0 || e == 0) throw UndefinedMetricError("MCC is undefined: a marginal sum is zero");
  const i128 num = static_cast<i128>(c.tp) * c.tn - static_cast<i128>(c.fp) * c.fn;
  const long double den = std::sqrt(static_cast<long double>(a)) * std::sqrt(static_cast<long double>(b)) *
                          std::sqrt(static_cast<long double>(d)) * std::sqrt(static_cast<long double>(e));
  const long double v = static_cast<long double>(num) / den;
  return static_cast<double>(std::clamp(v, -1.0L, 1.0L));
}

template <typename T>
Tensor<uint8_t> binarize(const Tensor<T>& prob, double threshold) {
  Tensor<uint8_t> out(prob.dims());
  for (int64_t i = 0; i < prob.size(); ++i) {
    if (std::isnan(static_cast<double>(prob[i]))) throw NumericError("binarize: NaN probability");
    out[i] = static_cast<double>(prob[i]) > threshold ? 1 : 0;
  }
  return out;
}

void ScoredPixels::append(const ScoredPixels& other) {
  scores.insert(scores.end(), other.scores.begin(), other.scores.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

template <typename T>
ScoredPixels gather_scores(const Tensor<T>& prob, const Tensor<uint8_t>& gt, const Tensor<uint8_t>* fov) {
  if (prob.size() != gt.size() || prob.height() != gt.height() || prob.width() != gt.width()) {
    throw ShapeError("gather_scores: probabilities " + shape_string(prob.dims()) + " vs ground truth " +
                     shape_string(gt.dims()));
  }
  if (fov && !fov->same_shape(gt)) throw ShapeError("gather_scores: mask shape differs from ground truth");
  check_binary_plane(gt, "ground truth");
  ScoredPixels out;
  out.scores.reserve(static_cast<size_t>(gt.size()));
  out.labels.reserve(static_cast<size_t>(gt.size()));
  for (int64_t i = 0; i < gt.size(); ++i) {
    if (fov && !(*fov)[i]) continue;
    out.scores.push_back(static_cast<double>(prob[i]));
    out.labels.push_back(gt[i]);
  }
  return out;
}

double auc_trapezoid(std::span<const double> scores, std::span<const uint8_t> labels) {
  check_pair(scores, labels);
  std::vector<double> pos, neg;
  split_by_class(scores, labels, pos, neg);

  // Walk thresholds from high to low. Each step moves dfp negatives and dtp
  // positives above the threshold; twice the trapezoid area is dfp * (2 tp + dtp).
  i128 twice_area = 0;
  int64_t tp = 0;
  auto ip = pos.rbegin(), in = neg.rbegin();
  while (ip != pos.rend() || in != neg.rend()) {
    double t = -std::numeric_limits<double>::infinity();
    if (ip != pos.rend()) t = *ip;
    if (in != neg.rend()) t = std::max(t, *in);
    int64_t dtp = 0, dfp = 0;
    while (ip != pos.rend() && *ip == t) ++ip, ++dtp;
    while (in != neg.rend() && *in == t) ++in, ++dfp;
    twice_area += static_cast<i128>(dfp) * (2 * tp + dtp);
    tp += dtp;
  }
  const long double den = 2.0L * static_cast<long double>(pos.size()) * static_cast<long double>(neg.size());
  return static_cast<double>(static_cast<long double>(twice_area) / den);
}

double auc_rank(std::span<const double> scores, std::span<const uint8_t> labels) {
  check_pair(scores, labels);
  std::vector<double> all(scores.begin(), scores.end());
  std::sort(all.begin(), all.end());
  int64_t n_pos = 0;
  // Twice the rank sum of positives; the midrank of a tie block at 1-based
  // positions lo+1 .. hi is (lo + 1 + hi) / 2.
  i128 twice_rank_sum = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    ++n_pos;
    const auto lo = std::lower_bound(all.begin(), all.end(), scores[i]) - all.begin();
    const auto hi = std::upper_bound(all.begin(), all.end(), scores[i]) - all.begin();
    twice_rank_sum += lo + 1 + hi;
  }
  const int64_t n_neg = static_cast<int64_t>(scores.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedMetricError("auc: ground truth contains a single class");
  const i128 twice_u = twice_rank_sum - static_cast<i128>(n_pos) * (n_pos + 1);
  const long double den = 2.0L * static_cast<long double>(n_pos) * static_cast<long double>(n_neg);
  return static_cast<double>(static_cast<long double>(twice_u) / den);
}

double auc(std::span<const double> scores, std::span<const uint8_t> labels) {
  const double a = auc_trapezoid(scores, labels);
  const double b = auc_rank(scores, labels);
  if (std::abs(a - b) > 1e-9) {
    throw NumericError("auc: trapezoidal (" + std::to_string(a) + ") and rank (" + std::to_string(b) +
                       ") estimates disagree");
  }
  return a;
}

double auc(const ScoredPixels& pixels) { return auc(pixels.scores, pixels.labels); }

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const uint8_t> labels) {
  check_pair(scores, labels);
  std::vector<double> pos, neg;
  split_by_class(scores, labels, pos, neg);
  const double P = static_cast<double>(pos.size()), N = static_cast<double>(neg.size());
  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  int64_t tp = 0, fp = 0;
  auto ip = pos.rbegin(), in = neg.rbegin();
  while (ip != pos.rend() || in != neg.rend()) {
    double t = -std::numeric_limits<double>::infinity();
    if (ip != pos.rend()) t = *ip;
    if (in != neg.rend()) t = std::max(t, *in);
    while (ip != pos.rend() && *ip == t) ++ip, ++tp;
    while (in != neg.rend() && *in == t) ++in, ++fp;
    curve.push_back({static_cast<double>(fp) / N, static_cast<double>(tp) / P, t});
  }
  curve.push_back({1.0, 1.0, -std::numeric_limits<double>::infinity()});
  return curve;
}

template Tensor<uint8_t> binarize(const Tensor<float>&, double);
template Tensor<uint8_t> binarize(const Tensor<double>&, double);
template ScoredPixels gather_scores(const Tensor<float>&, const Tensor<uint8_t>&, const Tensor<uint8_t>*);
template ScoredPixels gather_scores(const Tensor<double>&, const Tensor<uint8_t>&, const Tensor<uint8_t>*);

}  // namespace drnet

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

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>

#include "drnet/oracles.hpp"

namespace drnet::oracle {
namespace mp = boost::multiprecision;

ConfusionCounts naive_counts(const Tensor<uint8_t>& pred, const Tensor<uint8_t>& gt, const Tensor<uint8_t>* fov) {
  if (pred.dims() != gt.dims() || (fov && fov->dims() != gt.dims())) throw ShapeError("naive_counts: shape mismatch");
  ConfusionCounts c;
  for (int64_t y = 0; y < gt.height(); ++y) {
    for (int64_t x = 0; x < gt.width(); ++x) {
      if (fov && fov->at(y, x) == 0) continue;
      const int p = pred.at(y, x), g = gt.at(y, x);
      if (p > 1 || g > 1) throw DomainError("naive_counts: non-binary input");
      if (p == 1 && g == 1) {
        c.tp++;
      } else if (p == 1 && g == 0) {
        c.fp++;
      } else if (p == 0 && g == 0) {
        c.tn++;
      } else {
        c.fn++;
      }
    }
  }
  return c;
}

ExactMetrics exact_metrics(const ConfusionCounts& c) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto ratio = [&](int64_t num, int64_t den) {
    if (den == 0) return nan;
    return static_cast<double>(mp::cpp_rational(num, den));
  };
  ExactMetrics m;
  m.sen = ratio(c.tp, c.tp + c.fn);
  m.spe = ratio(c.tn, c.tn + c.fp);
  m.acc = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn);

  const mp::cpp_int tp = c.tp, tn = c.tn, fp = c.fp, fn = c.fn;
  const mp::cpp_int num = tp * tn - fp * fn;
  const mp::cpp_int den2 = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den2 == 0) {
    m.mcc = nan;
  } else {
    using F = mp::cpp_bin_float_50;
    m.mcc = static_cast<double>(F(num) / mp::sqrt(F(den2)));
  }
  return m;
}

double pairwise_auc(std::span<const double> scores, std::span<const uint8_t> labels) {
  // Twice the count keeps ties exact.
  int64_t twice = 0, pos = 0, neg = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i]) {
      ++pos;
    } else {
      ++neg;
    }
  }
  if (pos == 0 || neg == 0) throw UndefinedMetricError("pairwise_auc: single class");
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) {
        twice += 2;
      } else if (scores[i] == scores[j]) {
        twice += 1;
      }
    }
  }
  return static_cast<double>(mp::cpp_rational(twice, 2 * pos * neg));
}

double corrupted_mcc(const ConfusionCounts& c) {
  const double a = static_cast<double>(c.tp + c.fp), b = static_cast<double>(c.tp + c.fn);
  const double d = static_cast<double>(c.tn + c.fp), e = static_cast<double>(c.tn + c.fn);
  const double num = static_cast<double>(c.tp) * c.tn + static_cast<double>(c.fp) * c.fn;
  return num / std::sqrt(a * b * d * e);
}

}  // namespace drnet::oracle

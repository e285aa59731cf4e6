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
#include <limits>

#include "drnet/ops.hpp"

namespace drnet::ag {

template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>* bias) {
  Tensor<T> out = kernels::conv2d(x.value(), weight.value(), bias ? &bias->value() : nullptr);
  std::vector<Var<T>> inputs{x, weight};
  if (bias) inputs.push_back(*bias);
  return make_result<T>(std::move(out), std::move(inputs), [](Node<T>& self) {
    kernels::conv2d_backward(self.parents[0]->value, self.parents[1]->value, self.grad, self.parent_grad(0),
                             self.parent_grad(1), self.parents.size() > 2 ? self.parent_grad(2) : nullptr);
  });
}

template <typename T>
Var<T> conv_transpose2x2(const Var<T>& x, const Var<T>& weight, const Var<T>* bias) {
  Tensor<T> out = kernels::conv_transpose2x2(x.value(), weight.value(), bias ? &bias->value() : nullptr);
  std::vector<Var<T>> inputs{x, weight};
  if (bias) inputs.push_back(*bias);
  return make_result<T>(std::move(out), std::move(inputs), [](Node<T>& self) {
    kernels::conv_transpose2x2_backward(self.parents[0]->value, self.parents[1]->value, self.grad,
                                        self.parent_grad(0), self.parent_grad(1),
                                        self.parents.size() > 2 ? self.parent_grad(2) : nullptr);
  });
}

template <typename T>
Var<T> max_pool2x2(const Var<T>& x) {
  const bool track = grad_enabled() && x.requires_grad();
  auto argmax = std::make_shared<std::vector<uint8_t>>();
  Tensor<T> out = kernels::max_pool2x2(x.value(), track ? argmax.get() : nullptr);
  return make_result<T>(std::move(out), {x}, [argmax](Node<T>& self) {
    if (Tensor<T>* gx = self.parent_grad(0)) kernels::max_pool2x2_backward(*argmax, self.grad, *gx);
  });
}

template <typename T>
Var<T> batch_norm_batch_stats(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, double eps,
                              kernels::BatchNormStats* stats) {
  if (x.value().rank() != 4 || gamma.value().size() != x.value().dim(1) || beta.value().size() != x.value().dim(1)) {
    throw ShapeError("batch_norm: parameter size does not match channels of " + shape_string(x.dims()));
  }
  auto saved = std::make_shared<kernels::BatchNormStats>();
  auto normalized = std::make_shared<Tensor<T>>();
  Tensor<T> out = kernels::batch_norm_train(x.value(), gamma.value(), beta.value(), eps, *saved, *normalized);
  if (stats) *stats = *saved;
  if (!(grad_enabled() && (x.requires_grad() || gamma.requires_grad() || beta.requires_grad()))) {
    normalized.reset();
  }
  return make_result<T>(std::move(out), {x, gamma, beta}, [saved, normalized](Node<T>& self) {
    kernels::batch_norm_train_backward(*normalized, self.parents[1]->value, *saved, self.grad, self.parent_grad(0),
                                       self.parent_grad(1), self.parent_grad(2));
  });
}

template <typename T>
Var<T> batch_norm_fixed(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, const Tensor<T>& mean,
                        const Tensor<T>& var, double eps) {
  if (x.value().rank() != 4 || gamma.value().size() != x.value().dim(1) || mean.size() != x.value().dim(1)) {
    throw ShapeError("batch_norm: parameter size does not match channels of " + shape_string(x.dims()));
  }
  Tensor<T> out = kernels::batch_norm_fixed(x.value(), gamma.value(), beta.value(), mean, var, eps);
  return make_result<T>(std::move(out), {x, gamma, beta}, [mean, var, eps](Node<T>& self) {
    kernels::batch_norm_fixed_backward(self.parents[0]->value, self.parents[1]->value, mean, var, eps, self.grad,
                                       self.parent_grad(0), self.parent_grad(1), self.parent_grad(2));
  });
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  Tensor<T> out(x.dims());
  const Tensor<T>& in = x.value();
  // Written so NaN passes through and the finiteness checks still see it.
  for (int64_t i = 0; i < out.size(); ++i) out[i] = in[i] <= T(0) ? T(0) : in[i];
  return make_result<T>(std::move(out), {x}, [](Node<T>& self) {
    Tensor<T>* gx = self.parent_grad(0);
    if (!gx) return;
    const Tensor<T>& in = self.parents[0]->value;
    for (int64_t i = 0; i < in.size(); ++i) {
      if (in[i] > T(0)) (*gx)[i] += self.grad[i];
    }
  });
}

template <typename T>
Var<T> sigmoid(const Var<T>& x) {
  Tensor<T> out(x.dims());
  const Tensor<T>& in = x.value();
  // Saturated values are pulled back into the open interval (0, 1).
  const T lo = std::numeric_limits<T>::min();
  const T hi = std::nextafter(T(1), T(0));
  for (int64_t i = 0; i < out.size(); ++i) {
    const T v = in[i];
    const T y = v >= T(0) ? T(1) / (T(1) + std::exp(-v)) : std::exp(v) / (T(1) + std::exp(v));
    out[i] = std::clamp(y, lo, hi);
  }
  return make_result<T>(std::move(out), {x}, [](Node<T>& self) {
    Tensor<T>* gx = self.parent_grad(0);
    if (!gx) return;
    using A = kernels::Acc<T>;
    for (int64_t i = 0; i < self.value.size(); ++i) {
      const A y = self.value[i];
      (*gx)[i] += static_cast<T>(static_cast<A>(self.grad[i]) * y * (1 - y));
    }
  });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  if (a.dims() != b.dims()) {
    throw ShapeError("add: shape mismatch " + shape_string(a.dims()) + " vs " + shape_string(b.dims()));
  }
  Tensor<T> out(a.dims());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + b.value()[i];
  return make_result<T>(std::move(out), {a, b}, [](Node<T>& self) {
    for (size_t p = 0; p < 2; ++p) {
      if (Tensor<T>* g = self.parent_grad(p)) {
        for (int64_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
      }
    }
  });
}

template <typename T>
Var<T> concat_channels(std::span<const Var<T>> inputs) {
  if (inputs.empty()) throw ShapeError("concat_channels: no inputs");
  const Dims& first = inputs[0].dims();
  if (first.size() != 4) throw ShapeError("concat_channels: expected rank-4 inputs");
  int64_t channels = 0;
  for (const auto& in : inputs) {
    const Dims& d = in.dims();
    if (d.size() != 4 || d[0] != first[0] || d[2] != first[2] || d[3] != first[3]) {
      throw ShapeError("concat_channels: incompatible shapes " + shape_string(first) + " and " + shape_string(d));
    }
    channels += d[1];
  }
  const int64_t n_batch = first[0], hw = first[2] * first[3];
  Tensor<T> out({n_batch, channels, first[2], first[3]});
  int64_t offset = 0;
  for (const auto& in : inputs) {
    const int64_t c = in.dims()[1];
    for (int64_t n = 0; n < n_batch; ++n) {
      std::copy_n(in.value().data() + n * c * hw, c * hw, out.data() + (n * channels + offset) * hw);
    }
    offset += c;
  }
  std::vector<Var<T>> parents(inputs.begin(), inputs.end());
  return make_result<T>(std::move(out), std::move(parents), [](Node<T>& self) {
    const int64_t n_batch = self.value.dim(0), channels = self.value.dim(1);
    const int64_t hw = self.value.dim(2) * self.value.dim(3);
    int64_t offset = 0;
    for (size_t p = 0; p < self.parents.size(); ++p) {
      const int64_t c = self.parents[p]->value.dim(1);
      if (Tensor<T>* g = self.parent_grad(p)) {
        for (int64_t n = 0; n < n_batch; ++n) {
          const T* src = self.grad.data() + (n * channels + offset) * hw;
          T* dst = g->data() + n * c * hw;
          for (int64_t i = 0; i < c * hw; ++i) dst[i] += src[i];
        }
      }
      offset += c;
    }
  });
}

template <typename T>
Var<T> masked_scale(const Var<T>& x, Tensor<uint8_t> mask, T scale) {
  if (mask.dims() != x.dims()) throw ShapeError("masked_scale: mask shape mismatch");
  Tensor<T> out(x.dims());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = mask[i] ? x.value()[i] * scale : T(0);
  auto shared_mask = std::make_shared<Tensor<uint8_t>>(std::move(mask));
  return make_result<T>(std::move(out), {x}, [shared_mask, scale](Node<T>& self) {
    Tensor<T>* gx = self.parent_grad(0);
    if (!gx) return;
    for (int64_t i = 0; i < gx->size(); ++i) {
      if ((*shared_mask)[i]) (*gx)[i] += self.grad[i] * scale;
    }
  });
}

template <typename T>
Var<T> binary_cross_entropy(const Var<T>& prob, const Tensor<T>& target, double eps) {
  if (prob.dims() != target.dims()) {
    throw ShapeError("binary_cross_entropy: prediction " + shape_string(prob.dims()) + " vs target " +
                     shape_string(target.dims()));
  }
  using A = kernels::Acc<T>;
  const Tensor<T>& p = prob.value();
  const A lo = eps, hi = 1.0 - eps;
  A sum = 0;
  for (int64_t i = 0; i < p.size(); ++i) {
    const A v = static_cast<A>(p[i]);
    if (std::isnan(v)) throw NumericError("binary_cross_entropy: prediction is NaN");
    const A c = std::clamp(v, lo, hi);
    sum -= target[i] > T(0.5) ? std::log(c) : std::log1p(-c);
  }
  const A n = static_cast<A>(p.size());
  Tensor<T> out({1}, static_cast<T>(sum / n));
  return make_result<T>(std::move(out), {prob}, [target, lo, hi, n](Node<T>& self) {
    Tensor<T>* gp = self.parent_grad(0);
    if (!gp) return;
    const Tensor<T>& p = self.parents[0]->value;
    using A = kernels::Acc<T>;
    const A g = static_cast<A>(self.grad[0]) / n;
    for (int64_t i = 0; i < p.size(); ++i) {
      const A v = static_cast<A>(p[i]);
      if (v < lo || v > hi) continue;
      const A d = target[i] > T(0.5) ? -1 / v : 1 / (1 - v);
      (*gp)[i] += static_cast<T>(g * d);
    }
  });
}

#define DRNET_INSTANTIATE_OPS(T)                                                                                   \
  template Var<T> conv2d(const Var<T>&, const Var<T>&, const Var<T>*);                                             \
  template Var<T> conv_transpose2x2(const Var<T>&, const Var<T>&, const Var<T>*);                                  \
  template Var<T> max_pool2x2(const Var<T>&);                                                                      \
  template Var<T> batch_norm_batch_stats(const Var<T>&, const Var<T>&, const Var<T>&, double,                      \
                                         kernels::BatchNormStats*);                                                \
  template Var<T> batch_norm_fixed(const Var<T>&, const Var<T>&, const Var<T>&, const Tensor<T>&,                  \
                                   const Tensor<T>&, double);                                                      \
  template Var<T> relu(const Var<T>&);                                                                             \
  template Var<T> sigmoid(const Var<T>&);                                                                          \
  template Var<T> add(const Var<T>&, const Var<T>&);                                                               \
  template Var<T> concat_channels(std::span<const Var<T>>);                                                        \
  template Var<T> masked_scale(const Var<T>&, Tensor<uint8_t>, T);                                                 \
  template Var<T> binary_cross_entropy(const Var<T>&, const Tensor<T>&, double);

DRNET_INSTANTIATE_OPS(float)
DRNET_INSTANTIATE_OPS(double)
DRNET_INSTANTIATE_OPS(long double)

}  // namespace drnet::ag

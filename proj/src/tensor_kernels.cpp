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

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>

#include "drnet/kernels.hpp"

namespace drnet::kernels {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>, 0, Eigen::OuterStride<>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>, 0, Eigen::OuterStride<>>;

// Upper bound on the number of elements in one im2col tile.
constexpr int64_t kColumnBudget = int64_t{1} << 22;

template <typename T>
void check_conv_args(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>* bias) {
  if (input.rank() != 4 || weight.rank() != 4) {
    throw ShapeError("conv2d: expected rank-4 input and weight, got " + shape_string(input.dims()) + " and " +
                     shape_string(weight.dims()));
  }
  if (weight.dim(1) != input.dim(1)) {
    throw ShapeError("conv2d: weight expects " + std::to_string(weight.dim(1)) + " input channels, input has " +
                     std::to_string(input.dim(1)));
  }
  if (weight.dim(2) != weight.dim(3) || weight.dim(2) % 2 == 0) {
    throw ShapeError("conv2d: kernel must be square with odd size, got " + shape_string(weight.dims()));
  }
  if (bias && bias->size() != weight.dim(0)) {
    throw ShapeError("conv2d: bias size does not match output channels");
  }
}

// Rows [y0, y1) of one image unrolled into a (C*k*k) x ((y1-y0)*W) matrix.
template <typename T>
void im2col(const T* img, int64_t channels, int64_t h, int64_t w, int64_t k, int64_t y0, int64_t y1, T* col) {
  const int64_t pad = k / 2;
  const int64_t np = (y1 - y0) * w;
  for (int64_t c = 0; c < channels; ++c) {
    for (int64_t ky = 0; ky < k; ++ky) {
      for (int64_t kx = 0; kx < k; ++kx) {
        T* dst = col + ((c * k + ky) * k + kx) * np;
        const int64_t x_lo = std::max<int64_t>(0, pad - kx);
        const int64_t x_hi = std::min<int64_t>(w, w + pad - kx);
        for (int64_t y = y0; y < y1; ++y, dst += w) {
          const int64_t iy = y + ky - pad;
          if (iy < 0 || iy >= h || x_lo >= x_hi) {
            std::fill(dst, dst + w, T(0));
            continue;
          }
          const T* src = img + (c * h + iy) * w;
          std::fill(dst, dst + x_lo, T(0));
          std::copy(src + x_lo + kx - pad, src + x_hi + kx - pad, dst + x_lo);
          std::fill(dst + x_hi, dst + w, T(0));
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, int64_t channels, int64_t h, int64_t w, int64_t k, int64_t y0, int64_t y1, T* img) {
  const int64_t pad = k / 2;
  const int64_t np = (y1 - y0) * w;
  for (int64_t c = 0; c < channels; ++c) {
    for (int64_t ky = 0; ky < k; ++ky) {
      for (int64_t kx = 0; kx < k; ++kx) {
        const T* src = col + ((c * k + ky) * k + kx) * np;
        const int64_t x_lo = std::max<int64_t>(0, pad - kx);
        const int64_t x_hi = std::min<int64_t>(w, w + pad - kx);
        for (int64_t y = y0; y < y1; ++y, src += w) {
          const int64_t iy = y + ky - pad;
          if (iy < 0 || iy >= h) continue;
          T* dst = img + (c * h + iy) * w;
          for (int64_t x = x_lo; x < x_hi; ++x) dst[x + kx - pad] += src[x];
        }
      }
    }
  }
}

int64_t rows_per_tile(int64_t col_rows, int64_t w, int64_t h) {
  return std::clamp<int64_t>(kColumnBudget / std::max<int64_t>(1, col_rows * w), 1, h);
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>* bias) {
  check_conv_args(input, weight, bias);
  const int64_t n_batch = input.dim(0), cin = input.dim(1), h = input.dim(2), w = input.dim(3);
  const int64_t cout = weight.dim(0), k = weight.dim(2), kk = cin * k * k, hw = h * w;
  Tensor<T> out({n_batch, cout, h, w});
  ConstMatMap<T> wmat(weight.data(), cout, kk, Eigen::OuterStride<>(kk));

  if (k == 1) {
    for (int64_t n = 0; n < n_batch; ++n) {
      ConstMatMap<T> x(input.data() + n * cin * hw, cin, hw, Eigen::OuterStride<>(hw));
      MatMap<T> y(out.data() + n * cout * hw, cout, hw, Eigen::OuterStride<>(hw));
      y.noalias() = wmat * x;
    }
  } else {
    const int64_t rows = rows_per_tile(kk, w, h);
    std::vector<T> col(static_cast<size_t>(kk * rows * w));
    for (int64_t n = 0; n < n_batch; ++n) {
      const T* img = input.data() + n * cin * hw;
      for (int64_t y0 = 0; y0 < h; y0 += rows) {
        const int64_t y1 = std::min(h, y0 + rows);
        const int64_t np = (y1 - y0) * w;
        im2col(img, cin, h, w, k, y0, y1, col.data());
        ConstMatMap<T> colm(col.data(), kk, np, Eigen::OuterStride<>(np));
        MatMap<T> y(out.data() + n * cout * hw + y0 * w, cout, np, Eigen::OuterStride<>(hw));
        y.noalias() = wmat * colm;
      }
    }
  }

  if (bias) {
    for (int64_t n = 0; n < n_batch; ++n) {
      for (int64_t c = 0; c < cout; ++c) {
        T* p = out.data() + (n * cout + c) * hw;
        const T b = (*bias)[c];
        for (int64_t i = 0; i < hw; ++i) p[i] += b;
      }
    }
  }
  return out;
}

template <typename T>
void conv2d_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_out,
                     Tensor<T>* grad_input, Tensor<T>* grad_weight, Tensor<T>* grad_bias) {
  const int64_t n_batch = input.dim(0), cin = input.dim(1), h = input.dim(2), w = input.dim(3);
  const int64_t cout = weight.dim(0), k = weight.dim(2), kk = cin * k * k, hw = h * w;
  require_shape(grad_out, {n_batch, cout, h, w}, "conv2d backward");
  ConstMatMap<T> wmat(weight.data(), cout, kk, Eigen::OuterStride<>(kk));
  // Weight gradients reduce over every pixel of the batch; sum them in Acc<T>.
  using A = Acc<T>;
  std::optional<RowMat<A>> gw;
  if (grad_weight) gw.emplace(RowMat<A>::Zero(cout, kk));

  if (k == 1) {
    for (int64_t n = 0; n < n_batch; ++n) {
      ConstMatMap<T> x(input.data() + n * cin * hw, cin, hw, Eigen::OuterStride<>(hw));
      ConstMatMap<T> dy(grad_out.data() + n * cout * hw, cout, hw, Eigen::OuterStride<>(hw));
      if (gw) gw->noalias() += dy.template cast<A>() * x.transpose().template cast<A>();
      if (grad_input) {
        MatMap<T> dx(grad_input->data() + n * cin * hw, cin, hw, Eigen::OuterStride<>(hw));
        dx.noalias() += wmat.transpose() * dy;
      }
    }
  } else {
    const int64_t rows = rows_per_tile(kk, w, h);
    std::vector<T> col(static_cast<size_t>(kk * rows * w));
    for (int64_t n = 0; n < n_batch; ++n) {
      const T* img = input.data() + n * cin * hw;
      for (int64_t y0 = 0; y0 < h; y0 += rows) {
        const int64_t y1 = std::min(h, y0 + rows);
        const int64_t np = (y1 - y0) * w;
        ConstMatMap<T> dy(grad_out.data() + n * cout * hw + y0 * w, cout, np, Eigen::OuterStride<>(hw));
        MatMap<T> colm(col.data(), kk, np, Eigen::OuterStride<>(np));
        if (gw) {
          im2col(img, cin, h, w, k, y0, y1, col.data());
          gw->noalias() += dy.template cast<A>() * colm.transpose().template cast<A>();
        }
        if (grad_input) {
          colm.noalias() = wmat.transpose() * dy;
          col2im_add(col.data(), cin, h, w, k, y0, y1, grad_input->data() + n * cin * hw);
        }
      }
    }
  }

  if (gw) {
    MatMap<T>(grad_weight->data(), cout, kk, Eigen::OuterStride<>(kk)) += gw->template cast<T>();
  }

  if (grad_bias) {
    for (int64_t n = 0; n < n_batch; ++n) {
      for (int64_t c = 0; c < cout; ++c) {
        const T* p = grad_out.data() + (n * cout + c) * hw;
        Acc<T> s = 0;
        for (int64_t i = 0; i < hw; ++i) s += p[i];
        (*grad_bias)[c] += static_cast<T>(s);
      }
    }
  }
}

template <typename T>
Tensor<T> conv_transpose2x2(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>* bias) {
  if (input.rank() != 4 || weight.rank() != 4 || weight.dim(0) != input.dim(1) || weight.dim(2) != 2 ||
      weight.dim(3) != 2) {
    throw ShapeError("conv_transpose2x2: incompatible input " + shape_string(input.dims()) + " and weight " +
                     shape_string(weight.dims()));
  }
  const int64_t n_batch = input.dim(0), cin = input.dim(1), h = input.dim(2), w = input.dim(3);
  const int64_t cout = weight.dim(1), hw = h * w, ow = 2 * w;
  if (bias && bias->size() != cout) throw ShapeError("conv_transpose2x2: bias size mismatch");
  Tensor<T> out({n_batch, cout, 2 * h, 2 * w});
  ConstMatMap<T> wmat(weight.data(), cin, cout * 4, Eigen::OuterStride<>(cout * 4));
  RowMat<T> y(cout * 4, hw);
  for (int64_t n = 0; n < n_batch; ++n) {
    ConstMatMap<T> x(input.data() + n * cin * hw, cin, hw, Eigen::OuterStride<>(hw));
    y.noalias() = wmat.transpose() * x;
    for (int64_t co = 0; co < cout; ++co) {
      const T b = bias ? (*bias)[co] : T(0);
      T* dst = out.data() + (n * cout + co) * 4 * hw;
      for (int64_t d = 0; d < 4; ++d) {
        const int64_t dy = d / 2, dx = d % 2;
        const T* src = y.data() + (co * 4 + d) * hw;
        for (int64_t r = 0; r < h; ++r) {
          T* row = dst + (2 * r + dy) * ow + dx;
          for (int64_t c = 0; c < w; ++c) row[2 * c] = src[r * w + c] + b;
        }
      }
    }
  }
  return out;
}

template <typename T>
void conv_transpose2x2_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_out,
                                Tensor<T>* grad_input, Tensor<T>* grad_weight, Tensor<T>* grad_bias) {
  const int64_t n_batch = input.dim(0), cin = input.dim(1), h = input.dim(2), w = input.dim(3);
  const int64_t cout = weight.dim(1), hw = h * w, ow = 2 * w;
  require_shape(grad_out, {n_batch, cout, 2 * h, 2 * w}, "conv_transpose2x2 backward");
  ConstMatMap<T> wmat(weight.data(), cin, cout * 4, Eigen::OuterStride<>(cout * 4));
  RowMat<T> g(cout * 4, hw);
  using A = Acc<T>;
  RowMat<A> gw = RowMat<A>::Zero(grad_weight ? cin : 0, grad_weight ? cout * 4 : 0);
  for (int64_t n = 0; n < n_batch; ++n) {
    for (int64_t co = 0; co < cout; ++co) {
      const T* src = grad_out.data() + (n * cout + co) * 4 * hw;
      for (int64_t d = 0; d < 4; ++d) {
        const int64_t dy = d / 2, dx = d % 2;
        T* dst = g.data() + (co * 4 + d) * hw;
        for (int64_t r = 0; r < h; ++r) {
          const T* row = src + (2 * r + dy) * ow + dx;
          for (int64_t c = 0; c < w; ++c) dst[r * w + c] = row[2 * c];
        }
      }
    }
    ConstMatMap<T> x(input.data() + n * cin * hw, cin, hw, Eigen::OuterStride<>(hw));
    if (grad_input) {
      MatMap<T> dxm(grad_input->data() + n * cin * hw, cin, hw, Eigen::OuterStride<>(hw));
      dxm.noalias() += wmat * g;
    }
    if (grad_weight) gw.noalias() += x.template cast<A>() * g.transpose().template cast<A>();
    if (grad_bias) {
      for (int64_t co = 0; co < cout; ++co) {
        Acc<T> s = 0;
        const T* p = g.data() + co * 4 * hw;
        for (int64_t i = 0; i < 4 * hw; ++i) s += p[i];
        (*grad_bias)[co] += static_cast<T>(s);
      }
    }
  }
  if (grad_weight) {
    MatMap<T>(grad_weight->data(), cin, cout * 4, Eigen::OuterStride<>(cout * 4)) += gw.template cast<T>();
  }
}

template <typename T>
Tensor<T> max_pool2x2(const Tensor<T>& input, std::vector<uint8_t>* argmax) {
  if (input.rank() != 4 || input.dim(2) % 2 != 0 || input.dim(3) % 2 != 0) {
    throw ShapeError("max_pool2x2: expected rank-4 input with even H and W, got " + shape_string(input.dims()));
  }
  const int64_t planes = input.dim(0) * input.dim(1), h = input.dim(2), w = input.dim(3);
  const int64_t oh = h / 2, ow = w / 2;
  Tensor<T> out({input.dim(0), input.dim(1), oh, ow});
  if (argmax) argmax->assign(static_cast<size_t>(out.size()), 0);
  for (int64_t p = 0; p < planes; ++p) {
    const T* src = input.data() + p * h * w;
    T* dst = out.data() + p * oh * ow;
    for (int64_t y = 0; y < oh; ++y) {
      const T* r0 = src + 2 * y * w;
      const T* r1 = r0 + w;
      for (int64_t x = 0; x < ow; ++x) {
        const T cand[4] = {r0[2 * x], r0[2 * x + 1], r1[2 * x], r1[2 * x + 1]};
        uint8_t best = 0;
        // A NaN candidate wins so it propagates instead of being dropped.
        for (uint8_t i = 1; i < 4 && !std::isnan(cand[best]); ++i) {
          if (cand[i] > cand[best] || std::isnan(cand[i])) best = i;
        }
        dst[y * ow + x] = cand[best];
        if (argmax) (*argmax)[static_cast<size_t>(p * oh * ow + y * ow + x)] = best;
      }
    }
  }
  return out;
}

template <typename T>
void max_pool2x2_backward(const std::vector<uint8_t>& argmax, const Tensor<T>& grad_out, Tensor<T>& grad_input) {
  const int64_t planes = grad_input.dim(0) * grad_input.dim(1), h = grad_input.dim(2), w = grad_input.dim(3);
  const int64_t oh = h / 2, ow = w / 2;
  for (int64_t p = 0; p < planes; ++p) {
    T* dst = grad_input.data() + p * h * w;
    const T* g = grad_out.data() + p * oh * ow;
    const uint8_t* a = argmax.data() + p * oh * ow;
    for (int64_t y = 0; y < oh; ++y) {
      for (int64_t x = 0; x < ow; ++x) {
        const uint8_t i = a[y * ow + x];
        dst[(2 * y + i / 2) * w + 2 * x + i % 2] += g[y * ow + x];
      }
    }
  }
}

template <typename T>
Tensor<T> batch_norm_train(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& beta, double eps,
                           BatchNormStats& stats, Tensor<T>& normalized) {
  const int64_t n_batch = input.dim(0), c_count = input.dim(1), hw = input.dim(2) * input.dim(3);
  const Acc<T> m = static_cast<Acc<T>>(n_batch * hw);
  stats.mean.assign(static_cast<size_t>(c_count), 0.0);
  stats.inv_std.assign(static_cast<size_t>(c_count), 0.0);
  stats.var.assign(static_cast<size_t>(c_count), 0.0);
  normalized = Tensor<T>(input.dims());
  Tensor<T> out(input.dims());
  for (int64_t c = 0; c < c_count; ++c) {
    Acc<T> sum = 0;
    for (int64_t n = 0; n < n_batch; ++n) {
      const T* p = input.data() + (n * c_count + c) * hw;
      for (int64_t i = 0; i < hw; ++i) sum += p[i];
    }
    const Acc<T> mean = sum / m;
    Acc<T> sq = 0;
    for (int64_t n = 0; n < n_batch; ++n) {
      const T* p = input.data() + (n * c_count + c) * hw;
      for (int64_t i = 0; i < hw; ++i) {
        const Acc<T> d = p[i] - mean;
        sq += d * d;
      }
    }
    const Acc<T> inv_std = 1 / std::sqrt(sq / m + static_cast<Acc<T>>(eps));
    stats.mean[c] = mean;
    stats.inv_std[c] = inv_std;
    stats.var[c] = sq / m;
    const T g = gamma[c], b = beta[c];
    for (int64_t n = 0; n < n_batch; ++n) {
      const int64_t off = (n * c_count + c) * hw;
      const T* p = input.data() + off;
      T* xh = normalized.data() + off;
      T* o = out.data() + off;
      for (int64_t i = 0; i < hw; ++i) {
        xh[i] = static_cast<T>((p[i] - mean) * inv_std);
        o[i] = g * xh[i] + b;
      }
    }
  }
  return out;
}

template <typename T>
void batch_norm_train_backward(const Tensor<T>& normalized, const Tensor<T>& gamma, const BatchNormStats& stats,
                               const Tensor<T>& grad_out, Tensor<T>* grad_input, Tensor<T>* grad_gamma,
                               Tensor<T>* grad_beta) {
  const int64_t n_batch = normalized.dim(0), c_count = normalized.dim(1);
  const int64_t hw = normalized.dim(2) * normalized.dim(3);
  const Acc<T> m = static_cast<Acc<T>>(n_batch * hw);
  for (int64_t c = 0; c < c_count; ++c) {
    Acc<T> sum_dy = 0, sum_dy_xh = 0;
    for (int64_t n = 0; n < n_batch; ++n) {
      const int64_t off = (n * c_count + c) * hw;
      const T* dy = grad_out.data() + off;
      const T* xh = normalized.data() + off;
      for (int64_t i = 0; i < hw; ++i) {
        sum_dy += dy[i];
        sum_dy_xh += static_cast<Acc<T>>(dy[i]) * xh[i];
      }
    }
    if (grad_gamma) (*grad_gamma)[c] += static_cast<T>(sum_dy_xh);
    if (grad_beta) (*grad_beta)[c] += static_cast<T>(sum_dy);
    if (!grad_input) continue;
    const Acc<T> scale = static_cast<Acc<T>>(gamma[c]) * static_cast<Acc<T>>(stats.inv_std[c]) / m;
    for (int64_t n = 0; n < n_batch; ++n) {
      const int64_t off = (n * c_count + c) * hw;
      const T* dy = grad_out.data() + off;
      const T* xh = normalized.data() + off;
      T* dx = grad_input->data() + off;
      for (int64_t i = 0; i < hw; ++i) {
        dx[i] += static_cast<T>(scale * (m * dy[i] - sum_dy - xh[i] * sum_dy_xh));
      }
    }
  }
}

template <typename T>
Tensor<T> batch_norm_fixed(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& beta,
                           const Tensor<T>& mean, const Tensor<T>& var, double eps) {
  const int64_t n_batch = input.dim(0), c_count = input.dim(1), hw = input.dim(2) * input.dim(3);
  Tensor<T> out(input.dims());
  for (int64_t c = 0; c < c_count; ++c) {
    const Acc<T> scale = gamma[c] / std::sqrt(static_cast<Acc<T>>(var[c]) + static_cast<Acc<T>>(eps));
    const Acc<T> shift = beta[c] - mean[c] * scale;
    const T s = static_cast<T>(scale), t = static_cast<T>(shift);
    for (int64_t n = 0; n < n_batch; ++n) {
      const int64_t off = (n * c_count + c) * hw;
      const T* p = input.data() + off;
      T* o = out.data() + off;
      for (int64_t i = 0; i < hw; ++i) o[i] = s * p[i] + t;
    }
  }
  return out;
}

template <typename T>
void batch_norm_fixed_backward(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& mean,
                               const Tensor<T>& var, double eps, const Tensor<T>& grad_out, Tensor<T>* grad_input,
                               Tensor<T>* grad_gamma, Tensor<T>* grad_beta) {
  const int64_t n_batch = input.dim(0), c_count = input.dim(1), hw = input.dim(2) * input.dim(3);
  for (int64_t c = 0; c < c_count; ++c) {
    const Acc<T> inv_std = 1 / std::sqrt(static_cast<Acc<T>>(var[c]) + static_cast<Acc<T>>(eps));
    const T s = static_cast<T>(gamma[c] * inv_std);
    Acc<T> sum_dy = 0, sum_dy_xh = 0;
    for (int64_t n = 0; n < n_batch; ++n) {
      const int64_t off = (n * c_count + c) * hw;
      const T* p = input.data() + off;
      const T* dy = grad_out.data() + off;
      for (int64_t i = 0; i < hw; ++i) {
        sum_dy += dy[i];
        sum_dy_xh += static_cast<Acc<T>>(dy[i]) * (p[i] - mean[c]) * inv_std;
      }
      if (grad_input) {
        T* dx = grad_input->data() + off;
        for (int64_t i = 0; i < hw; ++i) dx[i] += s * dy[i];
      }
    }
    if (grad_gamma) (*grad_gamma)[c] += static_cast<T>(sum_dy_xh);
    if (grad_beta) (*grad_beta)[c] += static_cast<T>(sum_dy);
  }
}

#define DRNET_INSTANTIATE_KERNELS(T)                                                                               \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>*);                                 \
  template void conv2d_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, Tensor<T>*, Tensor<T>*,      \
                                Tensor<T>*);                                                                       \
  template Tensor<T> conv_transpose2x2(const Tensor<T>&, const Tensor<T>&, const Tensor<T>*);                      \
  template void conv_transpose2x2_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, Tensor<T>*,       \
                                           Tensor<T>*, Tensor<T>*);                                                \
  template Tensor<T> max_pool2x2(const Tensor<T>&, std::vector<uint8_t>*);                                         \
  template void max_pool2x2_backward(const std::vector<uint8_t>&, const Tensor<T>&, Tensor<T>&);                   \
  template Tensor<T> batch_norm_train(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, double,                \
                                      BatchNormStats&, Tensor<T>&);                                                \
  template void batch_norm_train_backward(const Tensor<T>&, const Tensor<T>&, const BatchNormStats&,               \
                                          const Tensor<T>&, Tensor<T>*, Tensor<T>*, Tensor<T>*);                   \
  template Tensor<T> batch_norm_fixed(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,      \
                                      const Tensor<T>&, double);                                                   \
  template void batch_norm_fixed_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,  \
                                          double, const Tensor<T>&, Tensor<T>*, Tensor<T>*, Tensor<T>*);

DRNET_INSTANTIATE_KERNELS(float)
DRNET_INSTANTIATE_KERNELS(double)
DRNET_INSTANTIATE_KERNELS(long double)

}  // namespace drnet::kernels

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

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "drnet/errors.hpp"

namespace drnet {

using Dims = std::vector<int64_t>;

inline std::string shape_string(const Dims& dims) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < dims.size(); ++i) os << (i ? ", " : "") << dims[i];
  os << ')';
  return os.str();
}

inline int64_t element_count(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), int64_t{1}, std::multiplies<>());
}

/// Dense row-major array. Feature maps use rank 4 in NCHW order; masks and
/// single-channel images use rank 2 (H, W).
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(Dims dims, T fill = T{}) : dims_(std::move(dims)) {
    for (auto d : dims_) {
      if (d < 0) throw ShapeError("negative tensor dimension in " + shape_string(dims_));
    }
    data_.assign(static_cast<size_t>(element_count(dims_)), fill);
  }

  Tensor(Dims dims, std::vector<T> values) : dims_(std::move(dims)), data_(std::move(values)) {
    if (static_cast<int64_t>(data_.size()) != element_count(dims_)) {
      throw ShapeError("value count " + std::to_string(data_.size()) + " does not match shape " +
                       shape_string(dims_));
    }
  }

  const Dims& dims() const noexcept { return dims_; }
  size_t rank() const noexcept { return dims_.size(); }
  int64_t dim(size_t i) const { return dims_.at(i); }
  int64_t size() const noexcept { return static_cast<int64_t>(data_.size()); }
  bool empty() const noexcept { return data_.empty(); }

  // NCHW accessors; height/width are the two trailing dimensions for any rank >= 2.
  int64_t batch() const { return require_rank(4), dims_[0]; }
  int64_t channels() const { return require_rank(4), dims_[1]; }
  int64_t height() const { return dims_.at(dims_.size() - 2); }
  int64_t width() const { return dims_.back(); }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  T& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  const T& operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  T& at(int64_t n, int64_t c, int64_t y, int64_t x) {
    return data_[static_cast<size_t>(((n * dims_[1] + c) * dims_[2] + y) * dims_[3] + x)];
  }
  const T& at(int64_t n, int64_t c, int64_t y, int64_t x) const {
    return data_[static_cast<size_t>(((n * dims_[1] + c) * dims_[2] + y) * dims_[3] + x)];
  }
  T& at(int64_t y, int64_t x) { return data_[static_cast<size_t>(y * dims_.back() + x)]; }
  const T& at(int64_t y, int64_t x) const { return data_[static_cast<size_t>(y * dims_.back() + x)]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  Tensor reshaped(Dims dims) const& { return Tensor(std::move(dims), data_); }
  Tensor reshaped(Dims dims) && { return Tensor(std::move(dims), std::move(data_)); }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.size());
    for (size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return Tensor<U>(dims_, std::move(out));
  }

  bool same_shape(const Tensor& other) const noexcept { return dims_ == other.dims_; }

  friend bool operator==(const Tensor& a, const Tensor& b) { return a.dims_ == b.dims_ && a.data_ == b.data_; }

 private:
  void require_rank(size_t r) const {
    if (dims_.size() != r) {
      throw ShapeError("expected rank " + std::to_string(r) + " tensor, got " + shape_string(dims_));
    }
  }

  Dims dims_;
  std::vector<T> data_;
};

template <typename T>
bool all_finite(const Tensor<T>& t) {
  for (const T& v : t.values()) {
    if (!std::isfinite(static_cast<double>(v))) return false;
  }
  return true;
}

template <typename T>
void require_shape(const Tensor<T>& t, const Dims& expected, const char* what) {
  if (t.dims() != expected) {
    throw ShapeError(std::string(what) + ": expected shape " + shape_string(expected) + ", got " +
                     shape_string(t.dims()));
  }
}

}  // namespace drnet

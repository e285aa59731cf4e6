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

#include <functional>
#include <memory>
#include <unordered_set>
#include <utility>
#include <vector>

#include "drnet/tensor.hpp"

// Reverse-mode differentiation over a dynamically recorded graph. Each Var
// owns a node; results of operations keep their inputs alive only while
// gradients are being recorded, so inference releases intermediate maps as
// soon as they go out of scope.
namespace drnet::ag {

namespace detail {
inline bool& grad_mode_flag() {
  thread_local bool enabled = true;
  return enabled;
}
}  // namespace detail

inline bool grad_enabled() { return detail::grad_mode_flag(); }

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard() : previous_(detail::grad_mode_flag()) { detail::grad_mode_flag() = false; }
  ~NoGradGuard() { detail::grad_mode_flag() = previous_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

template <typename T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward_fn;

  Tensor<T>& grad_buffer() {
    if (grad.dims() != value.dims()) grad = Tensor<T>(value.dims());
    return grad;
  }

  /// Gradient buffer of parent `i`, or null if that parent needs none.
  Tensor<T>* parent_grad(size_t i) {
    Node& p = *parents[i];
    return p.requires_grad ? &p.grad_buffer() : nullptr;
  }
};

template <typename T>
class Var {
 public:
  Var() = default;

  static Var leaf(Tensor<T> value, bool requires_grad = false) {
    auto node = std::make_shared<Node<T>>();
    node->value = std::move(value);
    node->requires_grad = requires_grad;
    return Var(std::move(node));
  }

  bool defined() const noexcept { return static_cast<bool>(node_); }
  const Tensor<T>& value() const { return node_->value; }
  Tensor<T>& mutable_value() { return node_->value; }
  const Tensor<T>& grad() const { return node_->grad; }
  bool has_grad() const { return node_->grad.dims() == node_->value.dims() && !node_->grad.empty(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  const Dims& dims() const { return node_->value.dims(); }

  Node<T>* node() const noexcept { return node_.get(); }
  const std::shared_ptr<Node<T>>& shared() const noexcept { return node_; }

  void zero_grad() const {
    if (node_) node_->grad = Tensor<T>();
  }

  /// Back-propagates from this scalar (single-element) value.
  void backward() const {
    if (node_->value.size() != 1) throw ShapeError("backward() requires a scalar output");
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> seen;
    std::vector<std::pair<Node<T>*, size_t>> stack{{node_.get(), 0}};
    seen.insert(node_.get());
    while (!stack.empty()) {
      auto& [n, next] = stack.back();
      if (next < n->parents.size()) {
        Node<T>* p = n->parents[next++].get();
        if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
      } else {
        order.push_back(n);
        stack.pop_back();
      }
    }
    node_->grad_buffer().fill(T(1));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Node<T>* n = *it;
      if (!n->backward_fn || n->grad.empty()) continue;
      n->backward_fn(*n);
      if (n != node_.get()) n->grad = Tensor<T>();
    }
  }

 private:
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}
  std::shared_ptr<Node<T>> node_;

  template <typename U>
  friend Var<U> make_result(Tensor<U>, std::vector<Var<U>>, std::function<void(Node<U>&)>);
};

/// Wraps an operation's output. The backward closure is recorded only when
/// recording is enabled and at least one input requires a gradient.
template <typename T>
Var<T> make_result(Tensor<T> value, std::vector<Var<T>> inputs, std::function<void(Node<T>&)> backward_fn) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  bool needs = false;
  if (grad_enabled()) {
    for (const auto& in : inputs) needs = needs || in.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->parents.reserve(inputs.size());
    for (auto& in : inputs) node->parents.push_back(in.shared());
    node->backward_fn = std::move(backward_fn);
  }
  return Var<T>(std::move(node));
}

}  // namespace drnet::ag

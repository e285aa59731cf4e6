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

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "drnet/autograd.hpp"

namespace drnet {

enum class EntryKind : uint8_t { kParameter = 0, kBuffer = 1 };

/// Named, ordered collection of learnable parameters and non-learnable
/// buffers (batch-norm running statistics). Copies are deep.
template <typename T>
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    EntryKind kind;
    ag::Var<T> var;
  };

  ParameterStore() = default;
  ParameterStore(const ParameterStore& other) { copy_from(other); }
  ParameterStore& operator=(const ParameterStore& other) {
    if (this != &other) copy_from(other);
    return *this;
  }
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;

  ag::Var<T> add(const std::string& name, Tensor<T> value, EntryKind kind = EntryKind::kParameter) {
    if (index_.count(name)) throw ConfigError("duplicate parameter name: " + name);
    index_.emplace(name, entries_.size());
    entries_.push_back({name, kind, ag::Var<T>::leaf(std::move(value), kind == EntryKind::kParameter)});
    return entries_.back().var;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const ag::Var<T>& get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ShapeError("unknown parameter: " + name);
    return entries_[it->second].var;
  }

  const Tensor<T>& value(const std::string& name) const { return get(name).value(); }
  Tensor<T>& mutable_value(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ShapeError("unknown parameter: " + name);
    return entries_[it->second].var.mutable_value();
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::vector<Entry>& entries() noexcept { return entries_; }
  size_t size() const noexcept { return entries_.size(); }

  /// Number of scalar learnable parameters (buffers excluded).
  int64_t parameter_count() const {
    int64_t n = 0;
    for (const auto& e : entries_) {
      if (e.kind == EntryKind::kParameter) n += e.var.value().size();
    }
    return n;
  }

  void zero_grad() const {
    for (const auto& e : entries_) e.var.zero_grad();
  }

  /// Same names, kinds, and shapes in the same order.
  bool same_layout(const ParameterStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (size_t i = 0; i < entries_.size(); ++i) {
      const auto& a = entries_[i];
      const auto& b = other.entries_[i];
      if (a.name != b.name || a.kind != b.kind || a.var.dims() != b.var.dims()) return false;
    }
    return true;
  }

  template <typename U>
  ParameterStore<U> cast() const {
    ParameterStore<U> out;
    for (const auto& e : entries_) out.add(e.name, e.var.value().template cast<U>(), e.kind);
    return out;
  }

  friend bool operator==(const ParameterStore& a, const ParameterStore& b) {
    if (!a.same_layout(b)) return false;
    for (size_t i = 0; i < a.entries_.size(); ++i) {
      if (!(a.entries_[i].var.value() == b.entries_[i].var.value())) return false;
    }
    return true;
  }

 private:
  void copy_from(const ParameterStore& other) {
    entries_.clear();
    index_.clear();
    for (const auto& e : other.entries_) add(e.name, e.var.value(), e.kind);
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, size_t> index_;
};

}  // namespace drnet

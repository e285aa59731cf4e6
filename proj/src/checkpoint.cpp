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

#include "drnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "drnet/rng.hpp"

namespace drnet {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  template <typename V>
  void put(V v) {
    const char* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof(V));
  }
  void bytes(const void* p, size_t n) { buf_.append(static_cast<const char*>(p), n); }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <typename V>
  V get() {
    V v;
    std::memcpy(&v, take(sizeof(V)), sizeof(V));
    return v;
  }
  const char* take(size_t n) {
    if (n > data_.size() - pos_) throw FormatError("checkpoint is truncated");
    const char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }
  size_t position() const { return pos_; }

 private:
  std::string_view data_;
  size_t pos_ = 0;
};

uint64_t fnv1a(std::string_view bytes) { return hash_name(bytes); }

template <typename Stored, typename T>
Tensor<T> read_values(Reader& r, Dims dims) {
  const int64_t n = element_count(dims);
  std::vector<T> values(static_cast<size_t>(n));
  const char* p = r.take(static_cast<size_t>(n) * sizeof(Stored));
  for (int64_t i = 0; i < n; ++i) {
    Stored s;
    std::memcpy(&s, p + i * sizeof(Stored), sizeof(Stored));
    values[static_cast<size_t>(i)] = static_cast<T>(s);
  }
  return Tensor<T>(std::move(dims), std::move(values));
}

}  // namespace

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config, const ParameterStore<T>& store) {
  Writer w;
  w.bytes(kCheckpointMagic, sizeof(kCheckpointMagic));
  w.put<uint32_t>(kCheckpointVersion);
  w.put<uint32_t>(sizeof(T));
  const std::string header = format_key_values(config.to_key_values());
  w.put<uint64_t>(header.size());
  w.bytes(header.data(), header.size());
  w.put<uint64_t>(store.size());
  for (const auto& e : store.entries()) {
    w.put<uint32_t>(static_cast<uint32_t>(e.name.size()));
    w.bytes(e.name.data(), e.name.size());
    w.put<uint8_t>(static_cast<uint8_t>(e.kind));
    const Dims& dims = e.var.dims();
    w.put<uint32_t>(static_cast<uint32_t>(dims.size()));
    for (int64_t d : dims) w.put<int64_t>(d);
    w.bytes(e.var.value().data(), static_cast<size_t>(e.var.value().size()) * sizeof(T));
  }
  w.put<uint64_t>(fnv1a(w.buffer()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open checkpoint for writing: " + path.string());
  out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  if (!out) throw FormatError("failed writing checkpoint: " + path.string());
}

template <typename T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof(kCheckpointMagic) + 8 + 8 ||
      std::memcmp(data.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw FormatError("not a DRNet checkpoint: " + path.string());
  }
  const std::string_view body(data.data(), data.size() - 8);
  uint64_t stored_hash;
  std::memcpy(&stored_hash, data.data() + body.size(), 8);
  if (stored_hash != fnv1a(body)) throw FormatError("checkpoint checksum mismatch: " + path.string());

  Reader r(body);
  r.take(sizeof(kCheckpointMagic));
  const auto version = r.get<uint32_t>();
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
  const auto width = r.get<uint32_t>();
  if (width != 4 && width != 8) throw FormatError("unsupported scalar width " + std::to_string(width));
  const auto header_len = r.get<uint64_t>();
  const std::string header(r.take(header_len), header_len);

  Checkpoint<T> ckpt;
  ckpt.config = ModelConfig::from_key_values(parse_key_values(header));
  const auto count = r.get<uint64_t>();
  for (uint64_t i = 0; i < count; ++i) {
    const auto name_len = r.get<uint32_t>();
    std::string name(r.take(name_len), name_len);
    const auto kind = r.get<uint8_t>();
    if (kind > 1) throw FormatError("invalid entry kind in checkpoint");
    const auto rank = r.get<uint32_t>();
    if (rank > 8) throw FormatError("invalid tensor rank in checkpoint");
    Dims dims(rank);
    for (auto& d : dims) {
      d = r.get<int64_t>();
      if (d < 0) throw FormatError("negative dimension in checkpoint");
    }
    Tensor<T> value = width == 4 ? read_values<float, T>(r, std::move(dims)) : read_values<double, T>(r, std::move(dims));
    ckpt.store.add(name, std::move(value), static_cast<EntryKind>(kind));
  }
  if (r.position() != body.size()) throw FormatError("trailing bytes in checkpoint");
  return ckpt;
}

template <typename T>
void load_weights(const std::filesystem::path& path, DRNet<T>& model) {
  Checkpoint<T> ckpt = load_checkpoint<T>(path);
  if (!(ckpt.config == model.config())) {
    throw ShapeError("checkpoint configuration does not match the model (" +
                     format_key_values(ckpt.config.to_key_values()) + ")");
  }
  model.set_parameters(ckpt.store);
}

template <typename T>
DRNet<T> load_model(const std::filesystem::path& path) {
  Checkpoint<T> ckpt = load_checkpoint<T>(path);
  DRNet<T> model = DRNet<T>::build(ckpt.config, 0);
  model.set_parameters(ckpt.store);
  return model;
}

#define DRNET_INSTANTIATE_CKPT(T)                                                                      \
  template void save_checkpoint(const std::filesystem::path&, const ModelConfig&, const ParameterStore<T>&); \
  template Checkpoint<T> load_checkpoint(const std::filesystem::path&);                                \
  template void load_weights(const std::filesystem::path&, DRNet<T>&);                                 \
  template DRNet<T> load_model(const std::filesystem::path&);

DRNET_INSTANTIATE_CKPT(float)
DRNET_INSTANTIATE_CKPT(double)

}  // namespace drnet

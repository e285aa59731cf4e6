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

#include "drnet/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <regex>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace drnet {

Tensor<uint8_t> read_gray8(const std::filesystem::path& path) {
  cv::Mat img;
  try {
    img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw FormatError("cannot decode image " + path.string() + ": " + e.what());
  }
  if (img.empty()) throw FormatError("cannot decode image " + path.string());

  double scale = 1.0;
  switch (img.depth()) {
    case CV_8U:
      break;
    case CV_16U:
      scale = 255.0 / 65535.0;
      break;
    case CV_32F:
    case CV_64F:
      scale = 255.0;
      break;
    default:
      throw FormatError("unsupported pixel depth in " + path.string());
  }
  cv::Mat values;
  img.convertTo(values, CV_64F, scale);

  const int h = values.rows, w = values.cols, channels = values.channels();
  // Alpha does not carry intensity.
  const int used = channels == 4 ? 3 : (channels == 2 ? 1 : channels);
  Tensor<uint8_t> out({h, w});
  for (int y = 0; y < h; ++y) {
    const double* row = values.ptr<double>(y);
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      for (int c = 0; c < used; ++c) sum += row[x * channels + c];
      out.at(y, x) = static_cast<uint8_t>(std::clamp(std::lround(sum / used), 0L, 255L));
    }
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Tensor<uint8_t>& image) {
  if (image.rank() != 2) throw ShapeError("write_png: expected an (H, W) plane, got " + shape_string(image.dims()));
  cv::Mat mat(static_cast<int>(image.height()), static_cast<int>(image.width()), CV_8UC1,
              const_cast<uint8_t*>(image.data()));
  if (!cv::imwrite(path.string(), mat)) throw FormatError("cannot write image " + path.string());
}

Tensor<uint8_t> to_gray8(const Tensor<double>& unit) {
  Tensor<uint8_t> out(unit.dims());
  for (int64_t i = 0; i < unit.size(); ++i) {
    out[i] = static_cast<uint8_t>(std::clamp(std::lround(255.0 * unit[i]), 0L, 255L));
  }
  return out;
}

Tensor<uint8_t> hconcat(const std::vector<Tensor<uint8_t>>& panels) {
  if (panels.empty()) throw ShapeError("hconcat: no panels");
  const int64_t h = panels.front().height();
  int64_t w = 0;
  for (const auto& p : panels) {
    if (p.rank() != 2 || p.height() != h) throw ShapeError("hconcat: panels must be (H, W) planes of equal height");
    w += p.width();
  }
  Tensor<uint8_t> out({h, w});
  int64_t x0 = 0;
  for (const auto& p : panels) {
    for (int64_t y = 0; y < h; ++y) std::copy_n(p.data() + y * p.width(), p.width(), out.data() + y * w + x0);
    x0 += p.width();
  }
  return out;
}

void write_npy(const std::filesystem::path& path, const Tensor<double>& array) {
  static_assert(std::endian::native == std::endian::little, "npy output assumes a little-endian host");
  std::string shape = "(";
  for (int64_t d : array.dims()) shape += std::to_string(d) + ", ";
  if (array.rank() > 1) shape.resize(shape.size() - 2);
  shape += ")";
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': " + shape + ", }";
  // Magic (6) + version (2) + length (2) + header + newline, padded to 64 bytes.
  const size_t total = 10 + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header += '\n';
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  const uint16_t len = static_cast<uint16_t>(header.size());
  out.write("\x93NUMPY\x01\x00", 8);
  out.write(reinterpret_cast<const char*>(&len), 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(array.data()), static_cast<std::streamsize>(array.size() * sizeof(double)));
  if (!out) throw FormatError("cannot write " + path.string());
}

Tensor<double> read_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  uint16_t len = 0;
  if (!in.read(magic, 8) || std::memcmp(magic, "\x93NUMPY\x01", 7) != 0 || !in.read(reinterpret_cast<char*>(&len), 2)) {
    throw FormatError("not an npy file: " + path.string());
  }
  std::string header(len, '\0');
  if (!in.read(header.data(), len)) throw FormatError("truncated npy header: " + path.string());
  if (header.find("'<f8'") == std::string::npos || header.find("'fortran_order': False") == std::string::npos) {
    throw FormatError("only C-ordered little-endian float64 npy files are supported: " + path.string());
  }
  std::smatch m;
  if (!std::regex_search(header, m, std::regex(R"('shape':\s*\(([^)]*)\))"))) {
    throw FormatError("npy header has no shape: " + path.string());
  }
  Dims dims;
  const std::string list = m[1].str();
  const std::regex number(R"(\d+)");
  for (std::sregex_iterator it(list.begin(), list.end(), number), end; it != end; ++it) {
    dims.push_back(std::stoll(it->str()));
  }
  Tensor<double> out(dims);
  if (!in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size() * sizeof(double)))) {
    throw FormatError("truncated npy data: " + path.string());
  }
  return out;
}

}  // namespace drnet

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

// Python bindings for the DRNet core library.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <vector>

#include "drnet/checkpoint.hpp"
#include "drnet/data.hpp"
#include "drnet/dropblock.hpp"
#include "drnet/errors.hpp"
#include "drnet/metrics.hpp"
#include "drnet/model.hpp"
#include "drnet/oracles.hpp"
#include "drnet/synthetic.hpp"

namespace py = pybind11;

namespace {

using namespace drnet;

template <typename T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <typename T>
Tensor<T> to_tensor(const Array<T>& a, Dims dims) {
  const T* p = a.data();
  return Tensor<T>(std::move(dims), std::vector<T>(p, p + a.size()));
}

template <typename T>
Tensor<T> plane(const Array<T>& a, const char* what) {
  if (a.ndim() != 2) throw ShapeError(std::string(what) + " must be a 2-D array");
  return to_tensor(a, {a.shape(0), a.shape(1)});
}

template <typename T>
py::array_t<T> to_numpy(const Tensor<T>& t, std::vector<py::ssize_t> shape) {
  py::array_t<T> out(shape);
  std::copy(t.data(), t.data() + t.size(), out.mutable_data());
  return out;
}

template <typename T>
py::array_t<T> plane_to_numpy(const Tensor<T>& t) {
  return to_numpy(t, {t.dims()[t.dims().size() - 2], t.dims().back()});
}

std::vector<double> as_scores(const Array<double>& a) { return {a.data(), a.data() + a.size()}; }
std::vector<uint8_t> as_labels(const Array<uint8_t>& a) { return {a.data(), a.data() + a.size()}; }

ImageSample sample_from(const Array<float>& image, const std::optional<Array<uint8_t>>& gt) {
  ImageSample s;
  const Tensor<float> img = plane(image, "image");
  s.original_h = img.dims()[0];
  s.original_w = img.dims()[1];
  s.image = Tensor<float>({1, 1, s.original_h, s.original_w}, std::vector<float>(img.data(), img.data() + img.size()));
  s.gt_mask = gt ? plane(*gt, "gt") : Tensor<uint8_t>({s.original_h, s.original_w});
  if (s.gt_mask.dims() != Dims{s.original_h, s.original_w}) throw ShapeError("gt must match the image shape");
  return s;
}

py::dict config_dict(const ModelConfig& c) {
  py::dict d;
  d["initial_channels"] = c.initial_channels;
  d["encoder_steps"] = c.encoder_steps;
  d["input_size"] = c.input_size;
  d["block_size"] = c.block_size;
  d["keep_prob"] = c.keep_prob;
  return d;
}

// Wraps a float model; images are 2-D arrays padded internally to input_size.
class Model {
 public:
  explicit Model(DRNet<float> model) : model_(std::move(model)) {}

  static Model build(int64_t initial_channels, int64_t encoder_steps, int64_t input_size, int block_size,
                     double keep_prob, uint64_t seed) {
    ModelConfig c;
    c.initial_channels = initial_channels;
    c.encoder_steps = encoder_steps;
    c.input_size = input_size;
    c.block_size = block_size;
    c.keep_prob = keep_prob;
    return Model(DRNet<float>::build(c, seed));
  }

  py::array_t<float> predict(const Array<float>& image) const {
    const ImageSample padded = pad_to(sample_from(image, std::nullopt), model_.config().input_size);
    Tensor<float> prob;
    {
      py::gil_scoped_release release;
      prob = model_.predict(padded.image);
    }
    return plane_to_numpy(crop_back(prob, padded));
  }

  void save(const std::filesystem::path& path) const { save_checkpoint(path, model_.config(), model_.parameters()); }

  py::dict config() const { return config_dict(model_.config()); }
  int64_t parameter_count() const { return model_.parameter_count(); }

 private:
  DRNet<float> model_;
};

}  // namespace

PYBIND11_MODULE(_drnet, m) {
  m.doc() = "DRNet retinal vessel segmentation core";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<IngestionError>(m, "IngestionError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", base.ptr());

  py::class_<ConfusionCounts>(m, "ConfusionCounts")
      .def(py::init([](int64_t tp, int64_t fp, int64_t tn, int64_t fn) { return ConfusionCounts{tp, fp, tn, fn}; }),
           py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"))
      .def_readwrite("tp", &ConfusionCounts::tp)
      .def_readwrite("fp", &ConfusionCounts::fp)
      .def_readwrite("tn", &ConfusionCounts::tn)
      .def_readwrite("fn", &ConfusionCounts::fn)
      .def_property_readonly("total", &ConfusionCounts::total)
      .def("__repr__", [](const ConfusionCounts& c) {
        return "ConfusionCounts(tp=" + std::to_string(c.tp) + ", fp=" + std::to_string(c.fp) +
               ", tn=" + std::to_string(c.tn) + ", fn=" + std::to_string(c.fn) + ")";
      });

  m.def(
      "confusion_counts",
      [](const Array<uint8_t>& pred, const Array<uint8_t>& gt, const std::optional<Array<uint8_t>>& fov) {
        const Tensor<uint8_t> f = fov ? plane(*fov, "fov") : Tensor<uint8_t>();
        return confusion_counts(plane(pred, "pred"), plane(gt, "gt"), fov ? &f : nullptr);
      },
      py::arg("pred"), py::arg("gt"), py::arg("fov") = py::none(),
      "Counts pixels of binary prediction and annotation arrays, optionally inside a field of view.");
  m.def("sensitivity", &sensitivity, py::arg("counts"));
  m.def("specificity", &specificity, py::arg("counts"));
  m.def("accuracy", &accuracy, py::arg("counts"));
  m.def("mcc", &mcc, py::arg("counts"));
  m.def(
      "binarize",
      [](const Array<float>& prob, double threshold) { return plane_to_numpy(binarize(plane(prob, "prob"), threshold)); },
      py::arg("prob"), py::arg("threshold") = 0.5, "Marks pixels strictly above the threshold as vessel.");
  m.def(
      "auc", [](const Array<double>& scores, const Array<uint8_t>& labels) {
        return auc(as_scores(scores), as_labels(labels));
      },
      py::arg("scores"), py::arg("labels"), "Area under the ROC curve with ties counted as one half.");

  m.def("dropblock_gamma", &dropblock_gamma, py::arg("keep_prob"), py::arg("block_size"), py::arg("height"),
        py::arg("width"), "Seed rate that drops a 1 - keep_prob share of a height x width feature map.");

  m.def(
      "synthetic_sample",
      [](int64_t height, int64_t width, uint64_t seed) {
        const ImageSample s = make_synthetic_sample(height, width, seed);
        return py::make_tuple(plane_to_numpy(s.image), plane_to_numpy(s.gt_mask));
      },
      py::arg("height"), py::arg("width"), py::arg("seed"),
      "Returns an (image, vessel mask) pair of vessel-like curves on a noisy background.");

  m.def(
      "pad_to",
      [](const Array<float>& image, int64_t size) {
        const ImageSample s = pad_to(sample_from(image, std::nullopt), size);
        return py::make_tuple(plane_to_numpy(s.image), s.pad_top, s.pad_left);
      },
      py::arg("image"), py::arg("size"), "Centers an image in a zero-padded size x size canvas.");

  py::class_<Model>(m, "Model")
      .def_static("build", &Model::build, py::arg("initial_channels") = 16, py::arg("encoder_steps") = 4,
                  py::arg("input_size") = 1024, py::arg("block_size") = 7, py::arg("keep_prob") = 0.86,
                  py::arg("seed") = 0)
      .def_static(
          "load", [](const std::filesystem::path& path) { return Model(load_model<float>(path)); }, py::arg("path"))
      .def("predict", &Model::predict, py::arg("image"),
           "Returns the vessel probability map of a 2-D image no larger than input_size.")
      .def("save", &Model::save, py::arg("path"))
      .def_property_readonly("config", &Model::config)
      .def_property_readonly("parameter_count", &Model::parameter_count);

  m.def(
      "selftest",
      [](uint64_t seed, bool quick) {
        oracle::SelftestOptions o;
        o.seed = seed;
        o.quick = quick;
        std::vector<oracle::SuiteResult> results;
        {
          py::gil_scoped_release release;
          results = oracle::run_selftest(o);
        }
        py::list out;
        for (const auto& r : results) out.append(py::make_tuple(r.name, r.passed, r.detail));
        return out;
      },
      py::arg("seed") = 2019, py::arg("quick") = true,
      "Runs the oracle suites and returns (name, passed, detail) tuples.");
}

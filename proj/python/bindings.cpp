/* Copyright 2026 The geodiv Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cstring>

#include "geodiv/consistency.hpp"
#include "geodiv/embedding_store.hpp"
#include "geodiv/errors.hpp"
#include "geodiv/indicators.hpp"
#include "geodiv/manifold_metrics.hpp"
#include "geodiv/prompt_builder.hpp"
#include "geodiv/run_config.hpp"
#include "geodiv/stratification.hpp"

namespace py = pybind11;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// Builds a dataset from an (n, dim) array plus per-record metadata lists.
geodiv::EmbeddingDataset dataset_from_numpy(FloatArray vectors, const std::vector<std::string>& ids,
                                            const std::vector<std::string>& objects,
                                            const std::vector<std::string>& regions,
                                            std::optional<std::vector<std::string>> countries,
                                            const std::string& source, const std::string& prompt_kind,
                                            const std::string& label) {
  if (vectors.ndim() != 2) throw geodiv::DataError("vectors must be a 2-D array");
  const auto n = static_cast<std::size_t>(vectors.shape(0));
  const auto dim = static_cast<std::size_t>(vectors.shape(1));
  if (ids.size() != n || objects.size() != n || regions.size() != n || (countries && countries->size() != n)) {
    throw geodiv::DataError("metadata lists must have one entry per row");
  }
  std::vector<geodiv::EmbeddingRecord> records(n);
  const float* data = vectors.data();
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = records[i];
    r.id = ids[i];
    r.vector.assign(data + i * dim, data + (i + 1) * dim);
    r.object = objects[i];
    r.region = regions[i];
    if (countries && !(*countries)[i].empty()) r.country = (*countries)[i];
    r.source = geodiv::parse_source(source);
    r.prompt_kind = geodiv::parse_prompt_kind(prompt_kind);
  }
  return geodiv::EmbeddingDataset(dim, std::move(records), label);
}

py::array_t<float> vectors_of(const geodiv::EmbeddingDataset& ds) {
  py::array_t<float> out({ds.size(), ds.dim()});
  float* dst = out.mutable_data();
  for (const auto& r : ds.records()) {
    std::memcpy(dst, r.vector.data(), r.vector.size() * sizeof(float));
    dst += r.vector.size();
  }
  return out;
}

py::dict metrics_dict(const geodiv::MetricResult& m) {
  py::dict d;
  d["value"] = m.value;
  d["n_real"] = m.n_real;
  d["n_generated"] = m.n_generated;
  d["k"] = m.k;
  d["hits"] = m.hits;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geodiversity indicators over embedding datasets";

  static py::exception<geodiv::Error> base(m, "GeodivError");
  static py::exception<geodiv::ConfigError> config_error(m, "ConfigError", base.ptr());
  static py::exception<geodiv::DataError> data_error(m, "DataError", base.ptr());
  static py::exception<geodiv::PreconditionError> precondition_error(m, "PreconditionError", base.ptr());
  static py::exception<geodiv::IoError> io_error(m, "IoError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const geodiv::ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const geodiv::DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const geodiv::PreconditionError& e) {
      py::set_error(precondition_error, e.what());
    } catch (const geodiv::IoError& e) {
      py::set_error(io_error, e.what());
    }
  });

  py::class_<geodiv::EmbeddingDataset>(m, "EmbeddingDataset")
      .def(py::init(&dataset_from_numpy), py::arg("vectors"), py::arg("ids"), py::arg("objects"),
           py::arg("regions"), py::arg("countries") = py::none(), py::arg("source") = "real",
           py::arg("prompt_kind") = "none", py::arg("label") = "")
      .def_property_readonly("dim", &geodiv::EmbeddingDataset::dim)
      .def_property_readonly("label", &geodiv::EmbeddingDataset::label)
      .def("__len__", &geodiv::EmbeddingDataset::size)
      .def("vectors", &vectors_of)
      .def("ids", [](const geodiv::EmbeddingDataset& ds) {
        std::vector<std::string> out;
        for (const auto& r : ds.records()) out.push_back(r.id);
        return out;
      })
      .def("objects", [](const geodiv::EmbeddingDataset& ds) {
        std::vector<std::string> out;
        for (const auto& r : ds.records()) out.push_back(r.object);
        return out;
      })
      .def("regions", [](const geodiv::EmbeddingDataset& ds) {
        std::vector<std::string> out;
        for (const auto& r : ds.records()) out.push_back(r.region);
        return out;
      })
      .def("slice",
           [](const geodiv::EmbeddingDataset& ds, std::optional<std::string> object,
              std::optional<std::string> region) {
             return geodiv::slice(ds, geodiv::RecordFilter{.object = object, .region = region});
           },
           py::arg("object") = py::none(), py::arg("region") = py::none())
      .def("checksum", &geodiv::dataset_checksum)
      .def("__eq__", [](const geodiv::EmbeddingDataset& a, const geodiv::EmbeddingDataset& b) { return a == b; });

  m.def("load_dataset", &geodiv::load_dataset, py::arg("path"));
  m.def("write_dataset", &geodiv::write_dataset, py::arg("dataset"), py::arg("path"));

  py::class_<geodiv::ManifoldModel>(m, "ManifoldModel")
      .def_property_readonly("k", &geodiv::ManifoldModel::k)
      .def_property_readonly("radii", [](const geodiv::ManifoldModel& mm) {
        return std::vector<double>(mm.radii().begin(), mm.radii().end());
      });

  m.def("build_manifold", &geodiv::build_manifold, py::arg("real"), py::arg("k") = geodiv::kDefaultK,
        py::arg("workers") = 1);
  m.def("precision",
        [](const geodiv::ManifoldModel& mm, const geodiv::EmbeddingDataset& gen, std::size_t workers) {
          return metrics_dict(geodiv::precision(mm, gen, workers));
        },
        py::arg("manifold"), py::arg("generated"), py::arg("workers") = 1);
  m.def("coverage",
        [](const geodiv::ManifoldModel& mm, const geodiv::EmbeddingDataset& gen, std::size_t workers) {
          return metrics_dict(geodiv::coverage(mm, gen, workers));
        },
        py::arg("manifold"), py::arg("generated"), py::arg("workers") = 1);

  m.def("clipscore",
        [](FloatArray image, FloatArray text) {
          return geodiv::clipscore(std::span<const float>(image.data(), static_cast<std::size_t>(image.size())),
                                   std::span<const float>(text.data(), static_cast<std::size_t>(text.size())));
        },
        py::arg("image_vec"), py::arg("text_vec"));
  m.def("percentile_linear",
        [](std::vector<double> values, double p) {
          std::sort(values.begin(), values.end());
          return geodiv::percentile_linear(values, p);
        },
        py::arg("values"), py::arg("percentile") = geodiv::kDefaultPercentile);
  m.def("lower_tail_mean",
        [](std::vector<double> values, double p) {
          std::sort(values.begin(), values.end());
          return geodiv::lower_tail_mean(values, p);
        },
        py::arg("values"), py::arg("percentile") = geodiv::kDefaultPercentile);

  m.def("build_prompts",
        [](const std::filesystem::path& config, const std::string& kind) {
          const auto cfg = geodiv::load_run_config(config);
          std::vector<py::tuple> rows;
          for (const auto& p : geodiv::build_prompts(geodiv::prompt_spec(cfg), geodiv::parse_prompt_kind(kind))) {
            rows.push_back(py::make_tuple(p.prompt_text, p.object, p.region, p.country, p.replicate_index));
          }
          return rows;
        },
        py::arg("config"), py::arg("kind"));

  m.def("full_report_json",
        [](const std::filesystem::path& config) {
          return geodiv::report_json(geodiv::full_report(geodiv::load_run_config(config)));
        },
        py::arg("config"));
}

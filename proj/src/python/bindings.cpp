// Thin numpy-facing wrapper over the library. Tensors cross the boundary as
// float64 arrays; everything else is plain Python values.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mgt/data/dataset.hpp"
#include "mgt/data/standardizer.hpp"
#include "mgt/data/synth.hpp"
#include "mgt/error.hpp"
#include "mgt/eval/metrics.hpp"
#include "mgt/graph/skeleton.hpp"
#include "mgt/model/checkpoint.hpp"
#include "mgt/model/mgt_net.hpp"

namespace py = pybind11;
using mgt::ad::Tensor;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor to_tensor(const Array& a) {
  mgt::ad::Shape shape(a.shape(), a.shape() + a.ndim());
  return Tensor(std::move(shape), std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  Array out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

std::vector<Tensor> to_tensors(const std::vector<Array>& xs) {
  std::vector<Tensor> out;
  for (const auto& x : xs) out.push_back(to_tensor(x));
  return out;
}

}  // namespace

PYBIND11_MODULE(_mgtnet, m) {
  m.doc() = "Multi-hop graph transformer for 2D-to-3D pose lifting";

  auto base = py::register_exception<mgt::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<mgt::DimensionError>(m, "DimensionError", base);
  py::register_exception<mgt::ContractError>(m, "ContractError", base);
  py::register_exception<mgt::ConfigError>(m, "ConfigError", base);
  py::register_exception<mgt::NumericError>(m, "NumericError", base);
  py::register_exception<mgt::ValidationError>(m, "ValidationError", base);
  py::register_exception<mgt::FormatError>(m, "FormatError", base);
  py::register_exception<mgt::DivergenceError>(m, "DivergenceError", base);

  using mgt::graph::SkeletonGraph;
  py::class_<SkeletonGraph>(m, "Skeleton")
      .def(py::init<std::vector<std::string>, std::vector<mgt::graph::Edge>, std::size_t>(),
           py::arg("joint_names"), py::arg("edges"), py::arg("root"))
      .def_static("human36m", &SkeletonGraph::human36m)
      .def_static("parse", [](const std::string& text) { return mgt::graph::parse_skeleton(text); })
      .def_property_readonly("num_joints", &SkeletonGraph::num_joints)
      .def_property_readonly("joint_names", &SkeletonGraph::joint_names)
      .def_property_readonly("edges", &SkeletonGraph::edges)
      .def_property_readonly("root", &SkeletonGraph::root)
      .def("is_connected", &SkeletonGraph::is_connected)
      .def("adjacency", [](const SkeletonGraph& g) { return to_array(g.adjacency()); })
      .def("to_document", [](const SkeletonGraph& g) { return mgt::graph::to_document(g); })
      .def("hop_distances",
           [](const SkeletonGraph& g) {
             const auto d = mgt::graph::hop_distances(g);
             py::array_t<long long> out({d.size(), d.size()});
             auto v = out.mutable_unchecked<2>();
             for (std::size_t i = 0; i < d.size(); ++i)
               for (std::size_t j = 0; j < d.size(); ++j)
                 v(i, j) = d(i, j) == mgt::graph::HopDistanceMatrix::kUnreachable
                               ? -1
                               : static_cast<long long>(d(i, j));
             return out;
           })
      .def(
          "normalized_k_adjacency",
          [](const SkeletonGraph& g, std::size_t k) {
            return to_array(mgt::graph::normalize_adjacency(
                mgt::graph::k_adjacency(mgt::graph::hop_distances(g), k)));
          },
          py::arg("k"))
      .def(
          "sparsity",
          [](const SkeletonGraph& g, std::size_t k_max) {
            std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> rows;
            for (const auto& r : mgt::graph::sparsity_report(g, k_max))
              rows.emplace_back(r.k, r.nnz_power, r.nnz_k_adjacency);
            return rows;
          },
          py::arg("k_max"), "Rows of (k, nnz((A+I)^k), nnz(A_k)).")
      .def("__eq__", [](const SkeletonGraph& a, const SkeletonGraph& b) { return a == b; });

  using mgt::model::ModelConfig;
  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_static("paper_default", &mgt::model::paper_default_config)
      .def_static("gt_ablation", &mgt::model::gt_ablation_config)
      .def_static("toy", &mgt::model::toy_config)
      .def_readwrite("joints", &ModelConfig::joints)
      .def_readwrite("frames", &ModelConfig::frames)
      .def_readwrite("features", &ModelConfig::features)
      .def_readwrite("layers", &ModelConfig::layers)
      .def_readwrite("heads", &ModelConfig::heads)
      .def_readwrite("max_hops", &ModelConfig::max_hops)
      .def_readwrite("dropout", &ModelConfig::dropout)
      .def_readwrite("dilation", &ModelConfig::dilation)
      .def_readwrite("kernel_half_width", &ModelConfig::kernel_half_width)
      .def_readwrite("dilated_conv", &ModelConfig::dilated_conv)
      .def_readwrite("layer_norm_eps", &ModelConfig::layer_norm_eps)
      .def("validate", &ModelConfig::validate);

  using mgt::model::MgtNet;
  py::class_<MgtNet>(m, "MgtNet")
      .def(py::init<ModelConfig, SkeletonGraph, std::uint64_t>(), py::arg("config"),
           py::arg("skeleton") = SkeletonGraph::human36m(), py::arg("seed") = 0)
      .def_property_readonly("config", &MgtNet::config)
      .def_property_readonly("skeleton", &MgtNet::skeleton)
      .def("param_count", &MgtNet::param_count)
      .def("parameter_names",
           [](const MgtNet& net) {
             std::vector<std::string> names;
             for (const auto& p : net.parameters()) names.push_back(p.name);
             return names;
           })
      .def(
          "forward", [](const MgtNet& net, const Array& s) { return to_array(net.forward(to_tensor(s))); },
          py::arg("sequence"), "[N x 2 x T] -> root-relative [N x 3], inference mode.");

  py::class_<mgt::data::Standardizer>(m, "Standardizer")
      .def_property_readonly("mean", &mgt::data::Standardizer::mean)
      .def_property_readonly("stddev", &mgt::data::Standardizer::stddev)
      .def("apply", [](const mgt::data::Standardizer& s, const Array& x) {
        return to_array(s.apply(to_tensor(x)));
      });

  m.def(
      "load_checkpoint",
      [](const std::string& path) {
        auto ck = mgt::model::load_checkpoint(path);
        return py::make_tuple(std::move(ck.net), std::move(ck.standardizer), ck.unit);
      },
      py::arg("path"), "Returns (net, standardizer, unit).");

  using mgt::data::PoseDataset;
  py::class_<PoseDataset>(m, "PoseDataset")
      .def_readonly("skeleton", &PoseDataset::skeleton)
      .def_readonly("unit", &PoseDataset::unit)
      .def_readonly("frames", &PoseDataset::frames)
      .def("__len__", &PoseDataset::size)
      .def("inputs",
           [](const PoseDataset& ds) {
             std::vector<Array> out;
             for (const auto& s : ds.samples) out.push_back(to_array(s.input));
             return out;
           })
      .def("targets",
           [](const PoseDataset& ds) {
             std::vector<Array> out;
             for (const auto& s : ds.samples) out.push_back(to_array(s.target));
             return out;
           })
      .def("actions", [](const PoseDataset& ds) {
        std::vector<std::string> out;
        for (const auto& s : ds.samples) out.push_back(s.action);
        return out;
      });

  m.def("load_dataset", &mgt::data::load_dataset, py::arg("path"));
  m.def("save_dataset", &mgt::data::save_dataset, py::arg("path"), py::arg("dataset"));
  m.def(
      "synthesize",
      [](std::size_t count, std::size_t frames, std::uint64_t seed, double noise) {
        return mgt::data::synthesize(SkeletonGraph::human36m(), count, frames, seed, noise);
      },
      py::arg("count"), py::arg("frames") = 1, py::arg("seed") = 0, py::arg("noise_sigma") = 0.0);

  m.def(
      "mpjpe", [](const Array& p, const Array& g) { return mgt::eval::mpjpe(to_tensor(p), to_tensor(g)); },
      py::arg("pred"), py::arg("gt"));
  m.def(
      "pa_mpjpe",
      [](const Array& p, const Array& g, bool allow_reflection) {
        mgt::eval::ProcrustesOptions opts;
        opts.allow_reflection = allow_reflection;
        return mgt::eval::pa_mpjpe(to_tensor(p), to_tensor(g), opts);
      },
      py::arg("pred"), py::arg("gt"), py::arg("allow_reflection") = false);
  m.def(
      "pck",
      [](const std::vector<Array>& p, const std::vector<Array>& g, double threshold) {
        return mgt::eval::pck(to_tensors(p), to_tensors(g), threshold);
      },
      py::arg("preds"), py::arg("gts"), py::arg("threshold"));
  m.def(
      "auc",
      [](const std::vector<Array>& p, const std::vector<Array>& g, std::vector<double> grid) {
        return mgt::eval::auc(to_tensors(p), to_tensors(g), grid);
      },
      py::arg("preds"), py::arg("gts"), py::arg("grid") = mgt::eval::default_auc_grid());
}

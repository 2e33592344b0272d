// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "metricopt/confusion.hpp"
#include "metricopt/dataset.hpp"
#include "metricopt/errors.hpp"
#include "metricopt/experiments.hpp"
#include "metricopt/heaviside.hpp"
#include "metricopt/lookup_table.hpp"
#include "metricopt/losses.hpp"
#include "metricopt/metrics.hpp"
#include "metricopt/mlp.hpp"
#include "metricopt/sigmoid_fit.hpp"
#include "metricopt/trainer.hpp"

namespace py = pybind11;
using namespace metricopt;

namespace {

using Doubles = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

// Owns copies of the arrays so the LabeledBatch view stays valid.
struct BatchData {
  std::vector<double> p;
  std::vector<std::uint8_t> y;
  BatchData(const Doubles& predictions, const Labels& labels)
      : p(predictions.data(), predictions.data() + predictions.size()),
        y(labels.data(), labels.data() + labels.size()) {}
  LabeledBatch view() const { return {p, y}; }
};

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::vector<std::uint8_t> to_labels(const Labels& labels) {
  return {labels.data(), labels.data() + labels.size()};
}

Dataset make_dataset(const Matrix& features, const Labels& labels) {
  Dataset d{features, to_labels(labels)};
  d.validate();
  return d;
}

py::array_t<std::uint8_t> labels_array(const std::vector<std::uint8_t>& labels) {
  return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(labels.size()), labels.data());
}

py::dict counts_dict(const SoftCounts& c) {
  py::dict d;
  d["tp"] = c.tp;
  d["fp"] = c.fp;
  d["fn"] = c.fn;
  d["tn"] = c.tn;
  return d;
}

SoftCounts counts_from(const py::dict& d) {
  return {d["tp"].cast<double>(), d["fp"].cast<double>(), d["fn"].cast<double>(), d["tn"].cast<double>()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Confusion-matrix metric losses with a piecewise-linear step approximation";

  static py::exception<Error> base(m, "MetricoptError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<UnknownThreshold>(m, "UnknownThreshold", PyExc_ValueError);
  py::register_exception<UndefinedMetric>(m, "UndefinedMetric", base.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
  py::register_exception<ShapeMismatch>(m, "ShapeMismatch", PyExc_ValueError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  py::class_<HeavisideParams>(m, "HeavisideParams")
      .def(py::init<double, double>(), py::arg("tau"), py::arg("delta") = kDefaultDelta)
      .def_property_readonly("tau", &HeavisideParams::tau)
      .def_property_readonly("delta", &HeavisideParams::delta)
      .def_property_readonly("tau_m", &HeavisideParams::tau_m)
      .def_property_readonly("lower_kink", &HeavisideParams::lower_kink)
      .def_property_readonly("upper_kink", &HeavisideParams::upper_kink)
      .def_property_readonly("max_slope", &HeavisideParams::max_slope)
      .def_property_readonly("slopes", [](const HeavisideParams& p) {
        return py::make_tuple(p.slopes().lower, p.slopes().middle, p.slopes().upper);
      });

  m.def("heaviside_approx", py::vectorize([](double p, double tau, double delta) {
          return heaviside_approx(p, HeavisideParams(tau, delta));
        }),
        py::arg("p"), py::arg("tau"), py::arg("delta") = kDefaultDelta);
  m.def("heaviside_approx_grad", py::vectorize([](double p, double tau, double delta) {
          return heaviside_approx_grad(p, HeavisideParams(tau, delta));
        }),
        py::arg("p"), py::arg("tau"), py::arg("delta") = kDefaultDelta);

  py::class_<SigmoidFit>(m, "SigmoidFit")
      .def_readonly("k", &SigmoidFit::k)
      .def_readonly("center", &SigmoidFit::center)
      .def_readonly("residual", &SigmoidFit::residual)
      .def_readonly("iterations", &SigmoidFit::iterations)
      .def("__call__", [](const SigmoidFit& f, const py::array_t<double>& p) {
        return py::vectorize([&f](double x) { return sigmoid_approx(x, f); })(p);
      });
  m.def("fit_sigmoid", [](double tau, double delta, std::size_t grid) { return fit_sigmoid(HeavisideParams(tau, delta), grid); },
        py::arg("tau"), py::arg("delta") = kDefaultDelta, py::arg("grid_size") = 200);

  py::class_<LookupTable>(m, "LookupTable")
      .def_static(
          "build",
          [](std::size_t res, std::vector<double> grid, double delta, bool quantized) {
            return LookupTable::build(res, std::move(grid), delta,
                                      quantized ? LookupTable::Storage::quantized_u8 : LookupTable::Storage::full_precision);
          },
          py::arg("p_resolution"), py::arg("tau_grid"), py::arg("delta") = kDefaultDelta, py::arg("quantized") = false)
      .def("lookup", &LookupTable::lookup, py::arg("p"), py::arg("tau"))
      .def("error_bound", &LookupTable::error_bound)
      .def_property_readonly("size", &LookupTable::size)
      .def_property_readonly("storage_bytes", &LookupTable::storage_bytes)
      .def_property_readonly("p_step", &LookupTable::p_step);

  m.def(
      "soft_counts",
      [](const Doubles& p, const Labels& y, double tau, double delta) {
        const BatchData b(p, y);
        return counts_dict(aggregate_soft(b.view(), HeavisideParams(tau, delta)));
      },
      py::arg("predictions"), py::arg("labels"), py::arg("tau") = 0.5, py::arg("delta") = kDefaultDelta);
  m.def(
      "hard_counts",
      [](const Doubles& p, const Labels& y, double tau) {
        const BatchData b(p, y);
        return counts_dict(aggregate_hard(b.view(), tau).as_real());
      },
      py::arg("predictions"), py::arg("labels"), py::arg("tau") = 0.5);

  m.def("precision", [](const py::dict& c, double eps) { return precision(counts_from(c), eps).value; },
        py::arg("counts"), py::arg("epsilon") = 0.0);
  m.def("recall", [](const py::dict& c, double eps) { return recall(counts_from(c), eps).value; },
        py::arg("counts"), py::arg("epsilon") = 0.0);
  m.def("accuracy", [](const py::dict& c, double eps) { return accuracy(counts_from(c), eps).value; },
        py::arg("counts"), py::arg("epsilon") = 0.0);
  m.def("f_beta", [](const py::dict& c, double beta, double eps) { return f_beta(counts_from(c), beta, eps).value; },
        py::arg("counts"), py::arg("beta") = 1.0, py::arg("epsilon") = 0.0);
  m.def("auroc", [](const Doubles& p, const Labels& y) { return auroc_hard(BatchData(p, y).view()); },
        py::arg("predictions"), py::arg("labels"));
  m.def(
      "evaluate",
      [](const Doubles& p, const Labels& y, std::vector<double> grid) {
        const BatchData b(p, y);
        return to_python(to_json(evaluate_over_grid(b.view(), grid)));
      },
      py::arg("predictions"), py::arg("labels"), py::arg("tau_grid") = default_tau_grid());

  py::class_<LossConfig>(m, "LossConfig")
      .def(py::init([](const std::string& objective, double beta, double tau, std::vector<double> grid, double delta,
                       double epsilon, const std::string& approx, bool grid_average) {
             LossConfig c;
             c.objective = parse_objective(objective);
             c.beta = beta;
             c.tau_train = tau;
             c.tau_grid = std::move(grid);
             c.delta = delta;
             c.epsilon = epsilon;
             c.approximation = parse_approximation(approx);
             c.average_over_grid = grid_average;
             c.validate();
             return c;
           }),
           py::arg("objective") = "f1", py::arg("beta") = 1.0, py::arg("tau") = 0.5,
           py::arg("tau_grid") = default_tau_grid(), py::arg("delta") = kDefaultDelta,
           py::arg("epsilon") = kDefaultEpsilon, py::arg("approximation") = "linear",
           py::arg("average_over_grid") = false)
      .def_property_readonly("objective", [](const LossConfig& c) { return to_string(c.objective); })
      .def_readonly("beta", &LossConfig::beta)
      .def_readonly("tau", &LossConfig::tau_train)
      .def_readonly("tau_grid", &LossConfig::tau_grid)
      .def_readonly("delta", &LossConfig::delta);

  py::class_<MetricLoss>(m, "MetricLoss")
      .def(py::init<LossConfig>(), py::arg("config"))
      .def(
          "__call__",
          [](const MetricLoss& loss, const Doubles& p, const Labels& y) {
            const BatchData b(p, y);
            const LossResult r = loss.evaluate(b.view());
            return py::make_tuple(r.loss, py::array_t<double>(static_cast<py::ssize_t>(r.grad.size()), r.grad.data()));
          },
          py::arg("predictions"), py::arg("labels"), "Returns (loss, d loss / d prediction).");

  m.def(
      "generate_blobs",
      [](std::size_t n, double sigma, std::size_t dims, double neg, double pos, std::uint64_t seed) {
        const Dataset d = generate_blobs({n, sigma, dims, neg, pos}, seed);
        return py::make_tuple(d.features, labels_array(d.labels));
      },
      py::arg("n_per_class") = 5000, py::arg("sigma") = 10.0, py::arg("dims") = 3, py::arg("negative_center") = 0.0,
      py::arg("positive_center") = 10.0, py::arg("seed") = 0);
  m.def(
      "subsample_positives",
      [](const Matrix& x, const Labels& y, double keep, std::uint64_t seed) {
        const Dataset d = subsample_positives(make_dataset(x, y), keep, seed);
        return py::make_tuple(d.features, labels_array(d.labels));
      },
      py::arg("features"), py::arg("labels"), py::arg("keep_fraction"), py::arg("seed") = 0);
  m.def(
      "load_csv",
      [](const std::filesystem::path& path, const std::string& label, const std::string& positive) {
        const CsvLoadResult r = load_csv(path, label, positive);
        return py::make_tuple(r.data.features, labels_array(r.data.labels), r.feature_names, r.rejected_lines);
      },
      py::arg("path"), py::arg("label_column"), py::arg("positive_value") = "1");

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("features"), py::arg("labels"))
      .def_readonly("features", &Dataset::features)
      .def_property_readonly("labels", [](const Dataset& d) { return labels_array(d.labels); })
      .def("__len__", &Dataset::size)
      .def_property_readonly("positive_fraction", &Dataset::positive_fraction);

  py::class_<SplitDataset>(m, "SplitDataset")
      .def_readonly("train", &SplitDataset::train)
      .def_readonly("validation", &SplitDataset::validation)
      .def_readonly("test", &SplitDataset::test);
  m.def(
      "standardize_and_split",
      [](const Dataset& d, std::uint64_t seed) { return standardize_and_split(d, {}, seed); }, py::arg("dataset"),
      py::arg("seed") = 0);

  py::class_<MlpModel>(m, "MlpModel")
      .def(py::init<std::size_t, std::vector<std::size_t>, double, std::uint64_t>(), py::arg("input_dim"),
           py::arg("hidden") = std::vector<std::size_t>{32, 16}, py::arg("dropout") = 0.5, py::arg("seed") = 0)
      .def("predict", &MlpModel::predict, py::arg("features"))
      .def_property_readonly("parameter_count", &MlpModel::parameter_count)
      .def("save", [](const MlpModel& model, const std::filesystem::path& path) { save_checkpoint(model, path); })
      .def_static("load", &load_checkpoint, py::arg("path"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init([](LossConfig loss, std::size_t batch, std::size_t epochs, std::size_t window, double lr,
                       double dropout, std::uint64_t seed) {
             TrainConfig c;
             c.loss = std::move(loss);
             c.batch_size = batch;
             c.max_epochs = epochs;
             c.window = window;
             c.adam.learning_rate = lr;
             c.dropout = dropout;
             c.seed = seed;
             c.validate();
             return c;
           }),
           py::arg("loss") = LossConfig{}, py::arg("batch_size") = 1024, py::arg("max_epochs") = 5000,
           py::arg("window") = 100, py::arg("learning_rate") = 0.001, py::arg("dropout") = 0.5, py::arg("seed") = 0)
      .def_readonly("batch_size", &TrainConfig::batch_size)
      .def_readonly("max_epochs", &TrainConfig::max_epochs)
      .def_readonly("window", &TrainConfig::window)
      .def_readonly("seed", &TrainConfig::seed);

  m.def("make_model", &make_model, py::arg("input_dim"), py::arg("config"));
  m.def(
      "train",
      [](MlpModel& model, const SplitDataset& split, const TrainConfig& config) {
        TrainReport report;
        {
          py::gil_scoped_release release;
          report = train(model, split, config);
        }
        return to_python(to_json(report, false));
      },
      py::arg("model"), py::arg("split"), py::arg("config"),
      "Trains in place and returns the report as a dict (timing excluded).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv = {"metricopt"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a command-line invocation in process; returns (exit code, stdout, stderr).");
}

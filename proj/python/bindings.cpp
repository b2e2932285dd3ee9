/*
 * Copyright 2026 The bgan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Python bindings. Matrices cross as NumPy arrays; experiment
// configurations cross as flat {key: string} dicts, the same keys the
// command-line tool accepts.

#include <map>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bgan/data.hpp"
#include "bgan/discrete.hpp"
#include "bgan/error.hpp"
#include "bgan/experiments.hpp"
#include "bgan/fdivergence.hpp"
#include "bgan/oracle.hpp"

namespace py = pybind11;
using namespace bgan;

namespace {

ExperimentConfig make_config(const std::string& experiment,
                             const std::map<std::string, std::string>& overrides)
{
  ConfigMap map;
  for (const auto& [k, v] : overrides)
    map.set(k, v);
  auto config = ExperimentConfig::apply(ExperimentConfig::defaults_for(experiment), map);
  config.validate();
  return config;
}

py::dict discrete_rows(const std::vector<DiscreteMetrics>& rows)
{
  std::vector<double> iteration, bound, beta, gn_g, gn_d, baseline;
  for (const auto& r : rows) {
    iteration.push_back(static_cast<double>(r.iteration));
    bound.push_back(r.bound_estimate);
    beta.push_back(r.beta_hat);
    gn_g.push_back(r.grad_norm_g);
    gn_d.push_back(r.grad_norm_d);
    baseline.push_back(r.baseline);
  }
  py::dict d;
  d["iteration"] = py::array(py::cast(iteration));
  d["bound_estimate"] = py::array(py::cast(bound));
  d["beta_hat"] = py::array(py::cast(beta));
  d["grad_norm_g"] = py::array(py::cast(gn_g));
  d["grad_norm_d"] = py::array(py::cast(gn_d));
  d["baseline"] = py::array(py::cast(baseline));
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Compiled core of the bgan package";

  // Most specific last: pybind11 tries translators newest first.
  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<NonFiniteError>(m, "NonFiniteError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<BudgetError>(m, "BudgetError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Divergence>(m, "Divergence")
      .value("GAN", Divergence::Gan)
      .value("JS", Divergence::JensenShannon)
      .value("KL", Divergence::Kl)
      .value("RKL", Divergence::ReverseKl)
      .value("SH", Divergence::SquaredHellinger);
  m.def("parse_divergence", [](const std::string& s) { return parse_divergence(s); });

  py::class_<FDivergence>(m, "FDivergence")
      .def(py::init<Divergence>())
      .def(py::init([](const std::string& s) { return FDivergence(parse_divergence(s)); }))
      .def_property_readonly("kind", &FDivergence::kind)
      .def_property_readonly("name", [](const FDivergence& d) { return std::string(d.name()); })
      .def("activation", py::overload_cast<double>(&FDivergence::activation, py::const_))
      .def("conjugate", &FDivergence::conjugate)
      .def("conjugate_derivative", &FDivergence::conjugate_derivative)
      .def("conjugate_of_activation",
           py::overload_cast<double>(&FDivergence::conjugate_of_activation, py::const_))
      .def("importance_weight", &FDivergence::importance_weight)
      .def("primal", &FDivergence::primal)
      .def("__repr__", [](const FDivergence& d) {
        return "FDivergence('" + std::string(d.name()) + "')";
      });

  m.def(
      "variational_lower_bound",
      [](const FDivergence& div, const std::vector<double>& real,
         const std::vector<double>& fake, double clamp) {
        return variational_lower_bound(div, real, fake, clamp);
      },
      py::arg("div"), py::arg("real"), py::arg("fake"), py::arg("clamp") = kDefaultStatisticClamp);

  m.def(
      "compute_weights",
      [](const Matrix& statistics) {
        auto w = compute_weights(statistics);
        py::dict d;
        d["log_w"] = w.log_w;
        d["normalized"] = w.normalized;
        d["beta_estimate"] = w.beta_estimate;
        d["log_beta_estimate"] = w.log_beta_estimate;
        d["alpha_estimates"] = w.alpha_estimates;
        return d;
      },
      py::arg("statistics"), "Importance weights for an N x M block of statistics.");

  // Oracle helpers on explicit distributions.
  m.def("reconstruct_from_statistic", [](const std::vector<double>& p,
                                         const std::vector<double>& q, const FDivergence& div) {
    auto r = reconstruct_from_statistic(p, q, div);
    py::dict d;
    d["p_tilde"] = r.p_tilde;
    d["optimal_statistic"] = r.optimal_statistic;
    d["max_error"] = r.max_error;
    return d;
  });
  m.def("exact_fdivergence", &exact_fdivergence);
  m.def(
      "tabular_dual_ascent",
      [](const std::vector<double>& p, const std::vector<double>& q, const FDivergence& div,
         std::size_t steps) {
        auto r = tabular_dual_ascent(p, q, div, steps);
        return py::make_tuple(r.value, r.statistic);
      },
      py::arg("p"), py::arg("q"), py::arg("div"), py::arg("steps") = 5000);
  m.def("kl_divergence", &kl_divergence);
  m.def("total_variation", &total_variation);

  // Data.
  m.def("synth_categorical_grid", [](const std::string& pattern, std::size_t positions,
                                     std::size_t classes, std::size_t size, std::uint64_t seed) {
    return synth_categorical_grid(categorical_pattern(pattern, positions, classes), size, seed)
        .samples;
  });
  m.def("synth_gaussian_ring", [](std::size_t modes, double radius, double sigma,
                                  std::size_t size, std::uint64_t seed) {
    auto d = synth_gaussian_ring(modes, radius, sigma, size, seed);
    return py::make_tuple(d.samples, d.labels);
  });
  m.def("read_idx", [](const std::string& path) {
    auto a = read_idx(path);
    std::vector<py::ssize_t> shape(a.dims.begin(), a.dims.end());
    py::array_t<std::uint8_t> out(shape);
    std::copy(a.data.begin(), a.data.end(), out.mutable_data());
    return out;
  });

  // Experiments.
  m.def("experiment_names", &experiment_names);
  m.def("default_config", [](const std::string& experiment) {
    return ExperimentConfig::defaults_for(experiment).to_map().entries();
  });
  m.def(
      "train_discrete",
      [](const std::map<std::string, std::string>& overrides) {
        DiscreteRunResult r;
        {
          py::gil_scoped_release release;
          r = run_train_discrete(make_config("train-discrete", overrides));
        }
        py::dict d;
        d["rows"] = discrete_rows(r.rows);
        d["final_bound"] = r.final_bound;
        d["final_tv"] = r.final_tv ? py::cast(*r.final_tv) : py::none();
        return d;
      },
      py::arg("config") = std::map<std::string, std::string>{});
  m.def(
      "train_continuous",
      [](const std::map<std::string, std::string>& overrides) {
        ContinuousRunResult r;
        {
          py::gil_scoped_release release;
          r = run_train_continuous(make_config("train-continuous", overrides));
        }
        std::vector<double> it, loss, bound, cov;
        for (const auto& row : r.rows) {
          it.push_back(static_cast<double>(row.iteration));
          loss.push_back(row.gen_loss);
          bound.push_back(row.disc_bound);
          cov.push_back(row.modes_covered);
        }
        py::dict rows;
        rows["iteration"] = py::array(py::cast(it));
        rows["gen_loss"] = py::array(py::cast(loss));
        rows["disc_bound"] = py::array(py::cast(bound));
        rows["modes_covered"] = py::array(py::cast(cov));
        py::dict d;
        d["rows"] = rows;
        d["final_coverage"] = r.final_coverage;
        return d;
      },
      py::arg("config") = std::map<std::string, std::string>{});
  m.def(
      "run_oracle",
      [](const std::map<std::string, std::string>& overrides) {
        auto report = run_oracle(make_config("oracle", overrides));
        py::list checks;
        for (const auto& c : report.checks) {
          py::dict d;
          d["name"] = c.name;
          d["measured"] = c.measured;
          d["tolerance"] = c.tolerance;
          d["passed"] = c.passed;
          checks.append(d);
        }
        return checks;
      },
      py::arg("config") = std::map<std::string, std::string>{});
}

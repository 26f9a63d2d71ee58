#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qquery/errors.hpp"
#include "qquery/experiments.hpp"
#include "qquery/phase_from_bit.hpp"
#include "qquery/runner.hpp"
#include "qquery/trigpoly.hpp"

namespace py = pybind11;
using namespace qquery;

namespace {

py::dict distribution_dict(const ErrorDistribution& d, double target, double bound) {
  py::dict out;
  out["errors"] = d.errors;
  out["probabilities"] = d.probabilities;
  out["target"] = target;
  out["q75"] = d.quantile(0.75);
  out["bound"] = bound;
  out["p_within_bound"] = d.probability_within(bound);
  return out;
}

ExperimentConfig config_from_kwargs(const std::string& experiment, const py::kwargs& kw) {
  nlohmann::json j = {{"experiment", experiment}};
  for (auto item : kw) {
    const auto key = py::cast<std::string>(item.first);
    const auto value = py::reinterpret_borrow<py::object>(item.second);
    if (key == "eps") {
      j[key] = py::cast<std::vector<double>>(value);
    } else if (key == "n" || key == "m" || key == "t" || key == "nq") {
      j[key] = py::cast<std::vector<int>>(value);
    } else if (key == "trials") {
      j[key] = py::cast<int>(value);
    } else if (key == "seed") {
      j[key] = py::cast<std::int64_t>(value);
    } else if (key == "phase_encoding") {
      j[key] = py::cast<std::string>(value);
    } else {
      throw ContractError("unknown config key '" + key + "'");
    }
  }
  return config_from_json(j);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum query simulation and bound checks";

  auto base = py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  (void)base;

  py::class_<OracleFunction>(m, "OracleFunction")
      .def(py::init<std::vector<double>, std::optional<std::vector<std::size_t>>>(), py::arg("values"),
           py::arg("tau") = std::nullopt)
      .def_property_readonly("size", &OracleFunction::size)
      .def_property_readonly("index_qubits", &OracleFunction::index_qubits)
      .def_property_readonly("values", &OracleFunction::values)
      .def_property_readonly("tau", &OracleFunction::tau)
      .def("__call__", &OracleFunction::at)
      .def("__len__", &OracleFunction::size);

  py::class_<SimulationError>(m, "SimulationError")
      .def_readonly("measured", &SimulationError::measured)
      .def_readonly("analytic_reference", &SimulationError::analytic_reference)
      .def_readonly("bound", &SimulationError::bound)
      .def_readonly("ancilla_leak", &SimulationError::ancilla_leak);

  m.def("bit_encode", &bit_encode, py::arg("x"), py::arg("m"));
  m.def("bit_decode", &bit_decode, py::arg("v"), py::arg("m"));
  m.def(
      "roundtrip_error", [](int bits, std::size_t grid) { return roundtrip_error(BitEncoding::floor_midpoint(bits), grid); },
      py::arg("m"), py::arg("grid_size"));

  m.def(
      "phase_query",
      [](const OracleFunction& f, const std::string& beta) { return build_phase_query(f, PhaseEncoding::parse(beta)).dense(); },
      py::arg("f"), py::arg("phase_encoding") = "identity", "Dense phase query matrix.");
  m.def(
      "bit_query", [](const OracleFunction& f, int bits) { return build_bit_query(f, BitEncoding::floor_midpoint(bits)).dense(); },
      py::arg("f"), py::arg("m"), "Dense bit query matrix.");

  m.def(
      "simulation_error",
      [](const OracleFunction& f, int bits, const std::string& beta) {
        return simulation_error(f, f.index_qubits(), bits, BitEncoding::floor_midpoint(bits), PhaseEncoding::parse(beta));
      },
      py::arg("f"), py::arg("m"), py::arg("phase_encoding") = "identity");
  m.def(
      "effective_query",
      [](const OracleFunction& f, int bits) {
        return assemble_simulation(f, f.index_qubits(), bits, BitEncoding::floor_midpoint(bits), PhaseEncoding::identity())
            .effective_query();
      },
      py::arg("f"), py::arg("m"), "The two-bit-query circuit restricted to (index) x (phase).");

  m.def("amplitude_estimation_queries", &amplitude_estimation_queries, py::arg("t"));
  m.def("amplitude_estimation_bound", &amplitude_estimation_bound, py::arg("a"), py::arg("t"));
  m.def(
      "evaluation_distribution",
      [](double f0, int t) {
        const AlgorithmSpec spec = evaluation_phase_algorithm(t);
        const StateVector out = run_algorithm(spec, OracleFunction({f0}));
        return distribution_dict(error_distribution(spec, out.amplitudes(), f0), f0, amplitude_estimation_bound(f0, t));
      },
      py::arg("f0"), py::arg("t"));
  m.def(
      "mean_distribution",
      [](const OracleFunction& f, int t) {
        const AlgorithmSpec spec = mean_estimation_algorithm(f.index_qubits(), t);
        const double target = mean_problem(0.0).solution(f);
        const StateVector out = run_algorithm(spec, f);
        return distribution_dict(error_distribution(spec, out.amplitudes(), target), target,
                                 amplitude_estimation_bound(target, t));
      },
      py::arg("f"), py::arg("t"));

  m.def("perturbation_closed_form", &perturbation_closed_form, py::arg("eps"));
  m.def(
      "query_difference_norm",
      [](const OracleFunction& f1, const OracleFunction& f2) {
        return query_difference_norm(f1, f2, QueryModel::phase).norm;
      },
      py::arg("f1"), py::arg("f2"), "Spectral norm of the difference of two phase queries.");
  m.def("degree_lower_bound", &degree_lower_bound, py::arg("x"), py::arg("delta"), py::arg("c") = kDegreeBoundConstant);

  m.def(
      "bernstein_margin",
      [](const std::vector<Complex>& coeffs) {
        // coeffs[k] multiplies exp(i (k - d) theta), d = (len - 1) / 2
        if (coeffs.size() % 2 == 0) throw ContractError("coefficient count must be odd");
        const int d = static_cast<int>(coeffs.size() / 2);
        TrigPoly t(1);
        for (int k = -d; k <= d; ++k) t.add_term(coeffs[static_cast<std::size_t>(k + d)], {k});
        const auto bm = bernstein_margin(t, bernstein_grid_size(std::max(1, t.degree())));
        return py::make_tuple(bm.max_derivative, bm.bound);
      },
      py::arg("coeffs"), "(max |t'|, deg * max |t|) for coefficients of frequencies -d..d.");
  m.def(
      "fit_univariate",
      [](const std::vector<double>& theta, const std::vector<Complex>& values, int degree) {
        if (theta.size() != values.size()) throw ContractError("theta and values differ in length");
        std::vector<std::pair<double, Complex>> samples;
        for (std::size_t i = 0; i < theta.size(); ++i) samples.emplace_back(theta[i], values[i]);
        const auto fit = fit_univariate(samples, degree);
        std::vector<Complex> coeffs;
        for (int k = -degree; k <= degree; ++k) {
          const auto it = fit.poly.terms().find({k});
          coeffs.push_back(it == fit.poly.terms().end() ? Complex(0.0) : it->second);
        }
        return py::make_tuple(coeffs, fit.residual);
      },
      py::arg("theta"), py::arg("values"), py::arg("degree"),
      "Least-squares coefficients for frequencies -degree..degree and the RMS residual.");

  m.def(
      "validate",
      [](const std::string& experiment, const py::kwargs& kw) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : validate(config_from_kwargs(experiment, kw))) out.emplace_back(v.field, v.message);
        return out;
      },
      py::arg("experiment"));
  m.def(
      "run_experiment",
      [](const std::string& experiment, const py::kwargs& kw) {
        const RunResult r = run_experiment(config_from_kwargs(experiment, kw));
        py::list rows;
        for (const auto& row : r.rows) {
          py::dict d;
          d["experiment"] = row.experiment;
          d["case"] = row.label;
          d["n"] = row.n;
          d["m"] = row.m;
          d["t"] = row.t;
          d["eps"] = row.eps;
          d["trial"] = row.trial;
          d["measured"] = row.measured;
          d["analytic_ref"] = row.analytic_ref;
          d["paper_bound"] = row.bound;
          d["pass"] = row.pass;
          rows.append(d);
        }
        return rows;
      },
      py::arg("experiment"), "Run an experiment; keyword arguments match the config file keys.");
}

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qcmps/baselines.hpp"
#include "qcmps/harness.hpp"
#include "qcmps/mps.hpp"

namespace py = pybind11;
using namespace qcmps;

namespace {

PauliSum parse_from_string(const std::string& text) {
  std::istringstream in(text);
  return parse_hamiltonian(in);
}

py::dict trace_to_dict(const ConvergenceTrace& trace) {
  py::list energy_re, energy_im, steps, dir_norms;
  for (const auto& r : trace.records) {
    energy_re.append(r.energy_re);
    energy_im.append(r.energy_im);
    steps.append(r.step);
    dir_norms.append(r.dir_norm);
  }
  py::dict out;
  out["energy_re"] = energy_re;
  out["energy_im"] = energy_im;
  out["step"] = steps;
  out["dir_norm"] = dir_norms;
  out["status"] = to_string(trace.status);
  out["iterations"] = trace.iterations;
  out["final_energy"] = trace.final_energy;
  out["final_params"] = trace.final_params;
  return out;
}

}  // namespace

PYBIND11_MODULE(_qcmps, m) {
  m.doc() = "Quantum-circuit MPS simulator with VarQITE optimization";
  m.attr("__version__") = kVersion;

  py::register_exception<GuardExceeded>(m, "GuardExceeded");
  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<NumericalFailure>(m, "NumericalFailure");

  py::class_<PauliSum>(m, "PauliSum")
      .def(py::init<int>(), py::arg("n_qubits"))
      .def_property_readonly("n_qubits", &PauliSum::n_qubits)
      .def_property_readonly("hermitian", &PauliSum::hermitian)
      .def("add",
           [](PauliSum& self, Complex coeff, const std::string& ops) {
             self.add(coeff, PauliString::parse(self.n_qubits(), ops));
           },
           py::arg("coeff"), py::arg("ops"))
      .def("terms",
           [](const PauliSum& self) {
             py::list out;
             for (const auto& t : self.terms())
               out.append(py::make_tuple(t.coeff, t.string.to_string()));
             return out;
           })
      .def("__len__", [](const PauliSum& self) { return self.terms().size(); });

  m.def("parse_hamiltonian", &parse_from_string, py::arg("text"));
  m.def("parse_hamiltonian_file", &parse_hamiltonian_file, py::arg("path"));
  m.def("serialize_hamiltonian", &serialize_hamiltonian, py::arg("hamiltonian"));
  m.def("dense_matrix",
        [](const PauliSum& h) { return dense_matrix(h); }, py::arg("hamiltonian"));
  m.def("build_number_operator", &build_number_operator, py::arg("n_qubits"));

  py::class_<AnsatzSpec>(m, "AnsatzSpec")
      .def(py::init<int, int, int>(), py::arg("n_virtual"), py::arg("n_blocks"),
           py::arg("n_layers"))
      .def_property_readonly("n_virtual", &AnsatzSpec::n_virtual)
      .def_property_readonly("n_blocks", &AnsatzSpec::n_blocks)
      .def_property_readonly("n_layers", &AnsatzSpec::n_layers)
      .def_property_readonly("n_params", &AnsatzSpec::n_params)
      .def_property_readonly("bond_dim", &AnsatzSpec::bond_dim);

  m.def("random_params", &random_params, py::arg("spec"), py::arg("seed"));
  m.def("block_unitary", &block_unitary, py::arg("spec"), py::arg("block"),
        py::arg("params"));
  m.def("expectation",
        [](const AnsatzSpec& spec, const Eigen::VectorXd& params, const PauliSum& h) {
          return expectation(tensors_from_params(spec, params), h);
        },
        py::arg("spec"), py::arg("params"), py::arg("hamiltonian"));
  m.def("hadamard_test_expectation",
        [](const AnsatzSpec& spec, const Eigen::VectorXd& params, const std::string& ops,
           const std::string& part) {
          return hadamard_test_expectation(
              spec, params, PauliString::parse(spec.n_blocks(), ops),
              part == "imaginary" ? Part::Imaginary : Part::Real);
        },
        py::arg("spec"), py::arg("params"), py::arg("ops"), py::arg("part") = "real");

  m.def("exact_diagonalize",
        [](const PauliSum& h) {
          const SpectrumResult s = exact_diagonalize(h);
          py::dict out;
          out["eigenvalues"] = s.eigenvalues;
          out["ground_energy"] = s.ground_energy;
          out["hermitian"] = s.hermitian_input;
          return out;
        },
        py::arg("hamiltonian"));
  m.def("synthesize_tc", &synthesize_tc, py::arg("hamiltonian"),
        py::arg("j_coefficients"));

  m.def("run_varqite",
        [](const AnsatzSpec& spec, const PauliSum& h, const Eigen::VectorXd& theta0,
           double regularization, double tol, int max_iters, double fixed_step,
           bool adaptive, bool deterministic, int threads) {
          VarqiteConfig config;
          config.regularization = regularization;
          config.tol = tol;
          config.max_iters = max_iters;
          config.step = adaptive ? StepPolicy::adaptive() : StepPolicy::fixed(fixed_step);
          const MpsEvaluator evaluator(spec, h, threads);
          return trace_to_dict(run_varqite(evaluator, theta0, config, deterministic));
        },
        py::arg("spec"), py::arg("hamiltonian"), py::arg("theta0"),
        py::arg("regularization") = 1e-5, py::arg("tol") = 1e-7,
        py::arg("max_iters") = 500, py::arg("fixed_step") = 0.05,
        py::arg("adaptive") = true, py::arg("deterministic") = false,
        py::arg("threads") = 1);
}

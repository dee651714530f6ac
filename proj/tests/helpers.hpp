#pragma once

#include <random>
#include <string>
#include <vector>

#include "qcmps/ansatz.hpp"
#include "qcmps/mps.hpp"
#include "qcmps/pauli.hpp"

namespace qcmps::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(QCMPS_FIXTURE_DIR) + "/" + name;
}

inline PauliString random_string(int n_qubits, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> axis_dist(0, 3);
  static constexpr PauliAxis kAxes[] = {PauliAxis::I, PauliAxis::X, PauliAxis::Y,
                                        PauliAxis::Z};
  PauliString p(n_qubits);
  for (int q = 0; q < n_qubits; ++q) p.set(q, kAxes[axis_dist(rng)]);
  return p;
}

inline PauliSum random_hermitian(int n_qubits, int n_terms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff_dist(-1.0, 1.0);
  PauliSum h(n_qubits);
  for (int t = 0; t < n_terms; ++t) h.add(coeff_dist(rng), random_string(n_qubits, rng));
  return h;
}

// <psi'| H (x) Id_bonds |psi'> straight from the dense state vector; the
// independent oracle for the transfer-matrix contraction.
inline Complex dense_expectation(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                                 const PauliSum& h) {
  const Eigen::VectorXcd psi = dense_state(tensors_from_params(spec, params));
  const Eigen::Index bond = Eigen::Index(1) << spec.n_virtual();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (const auto& term : h.terms()) {
    // the physical register is the most significant block of qubits
    PauliString wide(h.n_qubits() + spec.n_virtual());
    for (const auto& [q, a] : term.string.ops()) wide.set(q, a);
    out += term.coeff * apply_to_statevector(wide, psi);
  }
  (void)bond;
  return psi.dot(out);
}

// Central-difference derivative states d|psi'>/d theta_i over the dense vector.
inline std::vector<Eigen::VectorXcd> fd_derivative_states(const AnsatzSpec& spec,
                                                          const Eigen::VectorXd& params,
                                                          double h = 1e-5) {
  std::vector<Eigen::VectorXcd> dpsi(spec.n_params());
  Eigen::VectorXd probe = params;
  for (int i = 0; i < spec.n_params(); ++i) {
    probe(i) = params(i) + h;
    const Eigen::VectorXcd up = dense_state(tensors_from_params(spec, probe));
    probe(i) = params(i) - h;
    const Eigen::VectorXcd down = dense_state(tensors_from_params(spec, probe));
    probe(i) = params(i);
    dpsi[i] = (up - down) / (2.0 * h);
  }
  return dpsi;
}

}  // namespace qcmps::testing

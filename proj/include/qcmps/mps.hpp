#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qcmps/ansatz.hpp"
#include "qcmps/pauli.hpp"

namespace qcmps {

/// The D x 2 x D tensor realized by one block acting on a reset physical
/// qubit: T[sigma, a, b] = <sigma, a| U |0, b>. Stored as two D x D matrices
/// m[sigma] with rows = bond-out, cols = bond-in. Columns of the stacked
/// 2D x D matrix are orthonormal (right-orthogonal condition).
struct ComponentTensor {
  std::array<Eigen::MatrixXcd, 2> m;

  static ComponentTensor from_unitary(const Eigen::MatrixXcd& unitary, int n_virtual);

  Eigen::Index bond_dim() const { return m[0].rows(); }
  // max |sum_{sigma,a} conj(T[s,a,b]) T[s,a,b'] - delta_bb'|
  double isometry_residual() const;
};

/// The QCMPS wave function |psi'>: bond register starts in |0...0>, bond-out
/// indices left open (traced against each other in expectation values).
class QcmpsState {
 public:
  QcmpsState(std::vector<ComponentTensor> tensors, int n_virtual);

  int n_sites() const { return static_cast<int>(tensors_.size()); }
  int n_virtual() const { return n_virtual_; }
  Eigen::Index bond_dim() const { return Eigen::Index(1) << n_virtual_; }
  const ComponentTensor& tensor(int site) const { return tensors_.at(site); }

  QcmpsState with_replaced(int site, ComponentTensor t) const;

 private:
  std::vector<ComponentTensor> tensors_;
  int n_virtual_;
};

/// A QCMPS with one Pauli generator inserted after a rotation gate; the
/// (-i/2) derivative prefactor is not folded in.
struct XiState {
  QcmpsState state;
  int replaced_block;
  int param;
};

QcmpsState tensors_from_params(const AnsatzSpec& spec, const Eigen::VectorXd& params);
XiState xi_state(const AnsatzSpec& spec, const Eigen::VectorXd& params, int param);

// <psi'| H (x) Id_bonds |psi'> by left-to-right transfer-matrix contraction.
Complex expectation(const QcmpsState& state, const PauliSum& h);

// <a| (insert (x) Id_bonds) |b>, bond-out indices of bra and ket traced
// against each other.
Complex overlap(const QcmpsState& bra, const QcmpsState& ket,
                const PauliString* insert = nullptr);
inline Complex overlap(const XiState& bra, const XiState& ket,
                       const PauliString* insert = nullptr) {
  return overlap(bra.state, ket.state, insert);
}
inline Complex overlap(const XiState& bra, const QcmpsState& ket,
                       const PauliString* insert = nullptr) {
  return overlap(bra.state, ket, insert);
}

// Dense vector of |psi'> over (physical qubits, bond register); physical
// qubit of site 0 is the most significant factor, the bond register the
// least significant. Guarded by the dense qubit limit.
Eigen::VectorXcd dense_state(const QcmpsState& state, int max_qubits = guard_qubits());

}  // namespace qcmps

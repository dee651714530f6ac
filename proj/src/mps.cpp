#include "qcmps/mps.hpp"

#include <stdexcept>

namespace qcmps {

ComponentTensor ComponentTensor::from_unitary(const Eigen::MatrixXcd& unitary,
                                              int n_virtual) {
  const Eigen::Index d = Eigen::Index(1) << n_virtual;
  if (unitary.rows() != 2 * d || unitary.cols() != 2 * d)
    throw std::invalid_argument("block unitary dimension mismatch");
  // |sigma, a> has index sigma*D + a (physical qubit most significant);
  // input |0, b> is column b.
  ComponentTensor t;
  t.m[0] = unitary.block(0, 0, d, d);
  t.m[1] = unitary.block(d, 0, d, d);
  return t;
}

double ComponentTensor::isometry_residual() const {
  const Eigen::Index d = bond_dim();
  const Eigen::MatrixXcd gram =
      m[0].adjoint() * m[0] + m[1].adjoint() * m[1];
  return (gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

QcmpsState::QcmpsState(std::vector<ComponentTensor> tensors, int n_virtual)
    : tensors_(std::move(tensors)), n_virtual_(n_virtual) {
  if (tensors_.empty()) throw std::invalid_argument("state needs >= 1 tensor");
  const Eigen::Index d = Eigen::Index(1) << n_virtual;
  for (const auto& t : tensors_)
    if (t.bond_dim() != d) throw std::invalid_argument("tensor bond dimension mismatch");
}

QcmpsState QcmpsState::with_replaced(int site, ComponentTensor t) const {
  QcmpsState out = *this;
  out.tensors_.at(site) = std::move(t);
  return out;
}

QcmpsState tensors_from_params(const AnsatzSpec& spec, const Eigen::VectorXd& params) {
  std::vector<ComponentTensor> tensors;
  tensors.reserve(spec.n_blocks());
  for (int b = 0; b < spec.n_blocks(); ++b)
    tensors.push_back(ComponentTensor::from_unitary(block_unitary(spec, b, params),
                                                    spec.n_virtual()));
  return QcmpsState(std::move(tensors), spec.n_virtual());
}

XiState xi_state(const AnsatzSpec& spec, const Eigen::VectorXd& params, int param) {
  const ParamSite site = spec.resolve_param(param);
  QcmpsState base = tensors_from_params(spec, params);
  ComponentTensor inserted = ComponentTensor::from_unitary(
      block_unitary_with_insertion(spec, site.block, params, site), spec.n_virtual());
  return XiState{base.with_replaced(site.block, std::move(inserted)), site.block, param};
}

namespace {

// One transfer step: L'[a,a'] = sum_{s,s',b,b'} conj(T_s[a,b]) O[s,s'] T'_{s'}[a',b'] L[b,b']
Eigen::MatrixXcd transfer(const Eigen::MatrixXcd& left, const ComponentTensor& bra,
                          const ComponentTensor& ket, const Eigen::Matrix2cd& op) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(left.rows(), left.cols());
  for (int s = 0; s < 2; ++s) {
    const Eigen::MatrixXcd tmp = bra.m[s].conjugate() * left;
    for (int sp = 0; sp < 2; ++sp) {
      if (op(s, sp) == Complex(0.0, 0.0)) continue;
      out.noalias() += op(s, sp) * (tmp * ket.m[sp].transpose());
    }
  }
  return out;
}

Complex contract_string(const QcmpsState& bra, const QcmpsState& ket,
                        const PauliString* insert) {
  const Eigen::Index d = bra.bond_dim();
  Eigen::MatrixXcd left = Eigen::MatrixXcd::Zero(d, d);
  left(0, 0) = 1.0;  // both bond registers start in |0...0>
  const Eigen::Matrix2cd identity = Eigen::Matrix2cd::Identity();
  for (int site = 0; site < bra.n_sites(); ++site) {
    const Eigen::Matrix2cd op =
        insert ? axis_matrix(insert->axis(site)) : identity;
    left = transfer(left, bra.tensor(site), ket.tensor(site), op);
  }
  return left.trace();
}

}  // namespace

Complex expectation(const QcmpsState& state, const PauliSum& h) {
  if (h.n_qubits() != state.n_sites())
    throw std::invalid_argument("hamiltonian qubit count != number of blocks");
  Complex value(0.0, 0.0);
  for (const auto& term : h.terms())
    value += term.coeff * contract_string(state, state, &term.string);
  return value;
}

Complex overlap(const QcmpsState& bra, const QcmpsState& ket, const PauliString* insert) {
  if (bra.n_sites() != ket.n_sites() || bra.bond_dim() != ket.bond_dim())
    throw std::invalid_argument("overlap dimension mismatch");
  if (insert && insert->n_qubits() != bra.n_sites())
    throw std::invalid_argument("inserted string qubit count mismatch");
  return contract_string(bra, ket, insert);
}

Eigen::VectorXcd dense_state(const QcmpsState& state, int max_qubits) {
  const int n = state.n_sites();
  const int nv = state.n_virtual();
  if (n + nv > max_qubits)
    throw GuardExceeded("dense_state: " + std::to_string(n + nv) +
                        " qubits exceeds guard " + std::to_string(max_qubits));
  const Eigen::Index d = state.bond_dim();
  // amps over (emitted physical string, bond); grow site by site
  Eigen::MatrixXcd amps = Eigen::MatrixXcd::Zero(1, d);
  amps(0, 0) = 1.0;
  for (int site = 0; site < n; ++site) {
    const auto& t = state.tensor(site);
    Eigen::MatrixXcd next(amps.rows() * 2, d);
    for (int s = 0; s < 2; ++s)
      next.block(s * amps.rows(), 0, amps.rows(), d) = amps * t.m[s].transpose();
    // reorder so that the new physical index is least significant among
    // the emitted ones: row layout (prev..., sigma_site)
    Eigen::MatrixXcd shuffled(next.rows(), d);
    for (Eigen::Index prev = 0; prev < amps.rows(); ++prev)
      for (int s = 0; s < 2; ++s)
        shuffled.row(prev * 2 + s) = next.row(s * amps.rows() + prev);
    amps = std::move(shuffled);
  }
  Eigen::VectorXcd out(amps.rows() * d);
  for (Eigen::Index row = 0; row < amps.rows(); ++row)
    for (Eigen::Index b = 0; b < d; ++b) out(row * d + b) = amps(row, b);
  return out;
}

}  // namespace qcmps

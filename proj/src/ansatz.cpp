#include "qcmps/ansatz.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace qcmps {

namespace {

// The 15-parameter two-qubit entangler on lines (a, b):
//   Rz Ry Rz on a, Rz Ry Rz on b, CNOT(b->a), Rz(a), Ry(b), CNOT(a->b),
//   Ry(b), CNOT(b->a), Rz Ry Rz on a, Rz Ry Rz on b.
void append_entangler(std::vector<GateSpec>& program, int a, int b, int& next_param) {
  auto rot = [&](PauliAxis axis, int qubit) {
    program.push_back(RotationGate{axis, qubit, next_param++});
  };
  rot(PauliAxis::Z, a);
  rot(PauliAxis::Y, a);
  rot(PauliAxis::Z, a);
  rot(PauliAxis::Z, b);
  rot(PauliAxis::Y, b);
  rot(PauliAxis::Z, b);
  program.push_back(CnotGate{b, a});
  rot(PauliAxis::Z, a);
  rot(PauliAxis::Y, b);
  program.push_back(CnotGate{a, b});
  rot(PauliAxis::Y, b);
  program.push_back(CnotGate{b, a});
  rot(PauliAxis::Z, a);
  rot(PauliAxis::Y, a);
  rot(PauliAxis::Z, a);
  rot(PauliAxis::Z, b);
  rot(PauliAxis::Y, b);
  rot(PauliAxis::Z, b);
}

}  // namespace

AnsatzSpec::AnsatzSpec(int n_virtual, int n_blocks, int n_layers)
    : n_virtual_(n_virtual), n_blocks_(n_blocks), n_layers_(n_layers) {
  if (n_virtual < 1 || n_blocks < 1 || n_layers < 1)
    throw std::invalid_argument("ansatz dimensions must be >= 1");
  int next_param = 0;
  blocks_.resize(n_blocks);
  for (int b = 0; b < n_blocks; ++b) {
    for (int layer = 0; layer < n_layers; ++layer) {
      // staircase: physical qubit first, descending into the bond register
      for (int q = 0; q < n_virtual; ++q)
        append_entangler(blocks_[b], q, q + 1, next_param);
    }
  }
  n_params_ = next_param;
}

const std::vector<GateSpec>& AnsatzSpec::block_program(int block) const {
  if (block < 0 || block >= n_blocks_)
    throw std::out_of_range("block index out of range");
  return blocks_[block];
}

ParamSite AnsatzSpec::resolve_param(int param) const {
  if (param < 0 || param >= n_params_)
    throw std::out_of_range("parameter index out of range");
  for (int b = 0; b < n_blocks_; ++b) {
    const auto& program = blocks_[b];
    for (int pos = 0; pos < static_cast<int>(program.size()); ++pos) {
      if (const auto* rot = std::get_if<RotationGate>(&program[pos])) {
        if (rot->param == param)
          return ParamSite{b, pos, rot->axis, rot->qubit};
      }
    }
  }
  throw std::logic_error("unreachable: parameter not found");
}

int AnsatzSpec::param_at(const ParamSite& site) const {
  const auto& program = block_program(site.block);
  if (site.position < 0 || site.position >= static_cast<int>(program.size()))
    throw std::out_of_range("gate position out of range");
  const auto* rot = std::get_if<RotationGate>(&program[site.position]);
  if (!rot || rot->axis != site.generator || rot->qubit != site.qubit)
    throw std::invalid_argument("site does not name a matching rotation gate");
  return rot->param;
}

Eigen::MatrixXcd embed_single_qubit(const Eigen::Matrix2cd& gate, int qubit, int n_qubits) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  const Eigen::Index bit = Eigen::Index(1) << (n_qubits - 1 - qubit);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const int in = (j & bit) ? 1 : 0;
    for (int out = 0; out < 2; ++out) {
      const Eigen::Index k = (j & ~bit) | (out ? bit : 0);
      m(k, j) = gate(out, in);
    }
  }
  return m;
}

Eigen::MatrixXcd cnot_matrix(int control, int target, int n_qubits) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  const Eigen::Index cbit = Eigen::Index(1) << (n_qubits - 1 - control);
  const Eigen::Index tbit = Eigen::Index(1) << (n_qubits - 1 - target);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Eigen::Index k = (j & cbit) ? (j ^ tbit) : j;
    m(k, j) = 1.0;
  }
  return m;
}

Eigen::Matrix2cd rotation_matrix(PauliAxis axis, double theta) {
  const Complex i(0.0, 1.0);
  const Eigen::Matrix2cd q = axis_matrix(axis);
  return std::cos(theta / 2) * Eigen::Matrix2cd::Identity() -
         i * std::sin(theta / 2) * q;
}

namespace {

Eigen::MatrixXcd gate_matrix(const GateSpec& gate, const Eigen::VectorXd& params,
                             int n_qubits) {
  if (const auto* rot = std::get_if<RotationGate>(&gate))
    return embed_single_qubit(rotation_matrix(rot->axis, params(rot->param)),
                              rot->qubit, n_qubits);
  const auto& cnot = std::get<CnotGate>(gate);
  return cnot_matrix(cnot.control, cnot.target, n_qubits);
}

}  // namespace

Eigen::MatrixXcd block_unitary(const AnsatzSpec& spec, int block,
                               const Eigen::VectorXd& params) {
  if (params.size() != spec.n_params())
    throw std::invalid_argument("parameter vector length mismatch");
  const int nq = spec.n_block_qubits();
  const Eigen::Index dim = Eigen::Index(1) << nq;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& gate : spec.block_program(block))
    u = gate_matrix(gate, params, nq) * u;
  return u;
}

Eigen::MatrixXcd block_unitary_with_insertion(const AnsatzSpec& spec, int block,
                                              const Eigen::VectorXd& params,
                                              const ParamSite& site) {
  if (site.block != block)
    throw std::invalid_argument("site does not belong to the named block");
  if (params.size() != spec.n_params())
    throw std::invalid_argument("parameter vector length mismatch");
  const int nq = spec.n_block_qubits();
  const Eigen::Index dim = Eigen::Index(1) << nq;
  const auto& program = spec.block_program(block);
  if (site.position < 0 || site.position >= static_cast<int>(program.size()) ||
      !std::holds_alternative<RotationGate>(program[site.position]))
    throw std::invalid_argument("site does not name a rotation gate");
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (int pos = 0; pos < static_cast<int>(program.size()); ++pos) {
    u = gate_matrix(program[pos], params, nq) * u;
    if (pos == site.position)
      u = embed_single_qubit(axis_matrix(site.generator), site.qubit, nq) * u;
  }
  return u;
}

Eigen::VectorXd random_params(const AnsatzSpec& spec, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * M_PI);
  Eigen::VectorXd params(spec.n_params());
  for (int i = 0; i < spec.n_params(); ++i) params(i) = dist(rng);
  return params;
}

}  // namespace qcmps

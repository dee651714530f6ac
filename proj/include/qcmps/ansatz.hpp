#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qcmps/pauli.hpp"

namespace qcmps {

struct RotationGate {
  PauliAxis axis;  // X, Y or Z
  int qubit;
  int param;  // global parameter index
};

struct CnotGate {
  int control;
  int target;
};

using GateSpec = std::variant<RotationGate, CnotGate>;

/// Location of a parameterized rotation inside the ansatz.
struct ParamSite {
  int block;
  int position;  // index into the block's gate program
  PauliAxis generator;
  int qubit;
};

/// The QCMPS circuit layout: n_blocks blocks, each a staircase of n_layers
/// layers of 15-parameter two-qubit entanglers over n_virtual+1 qubits.
/// Qubit 0 of each block is the physical qubit; 1..n_virtual are the bond
/// register. Parameter indices are contiguous from 0 in program order.
class AnsatzSpec {
 public:
  AnsatzSpec(int n_virtual, int n_blocks, int n_layers);

  int n_virtual() const { return n_virtual_; }
  int n_blocks() const { return n_blocks_; }
  int n_layers() const { return n_layers_; }
  int n_params() const { return n_params_; }
  int n_block_qubits() const { return n_virtual_ + 1; }
  int bond_dim() const { return 1 << n_virtual_; }

  const std::vector<GateSpec>& block_program(int block) const;

  ParamSite resolve_param(int param) const;
  int param_at(const ParamSite& site) const;
  int block_of_param(int param) const { return resolve_param(param).block; }

 private:
  int n_virtual_;
  int n_blocks_;
  int n_layers_;
  int n_params_;
  std::vector<std::vector<GateSpec>> blocks_;
};

inline AnsatzSpec build_ansatz(int n_virtual, int n_blocks, int n_layers) {
  return AnsatzSpec(n_virtual, n_blocks, n_layers);
}

// Ordered product of the block's gates as a 2^(n_virtual+1) square matrix.
Eigen::MatrixXcd block_unitary(const AnsatzSpec& spec, int block,
                               const Eigen::VectorXd& params);

// Same product with the site's generator Pauli inserted right after its
// rotation gate (the xi construction behind the parameter-shift rule).
Eigen::MatrixXcd block_unitary_with_insertion(const AnsatzSpec& spec, int block,
                                              const Eigen::VectorXd& params,
                                              const ParamSite& site);

// Uniform [0, 2pi) initial parameters from a seeded generator.
Eigen::VectorXd random_params(const AnsatzSpec& spec, uint64_t seed);

// R_q(theta) = exp(-i theta Q / 2).
Eigen::Matrix2cd rotation_matrix(PauliAxis axis, double theta);

// Embeds a single-qubit gate on the given line of an n-qubit register,
// qubit 0 most significant.
Eigen::MatrixXcd embed_single_qubit(const Eigen::Matrix2cd& gate, int qubit, int n_qubits);
Eigen::MatrixXcd cnot_matrix(int control, int target, int n_qubits);

}  // namespace qcmps

#pragma once

#include <optional>

#include "qcmps/ansatz.hpp"
#include "qcmps/pauli.hpp"

namespace qcmps {

enum class Part { Real, Imaginary };

struct ShotPlan {
  long shots;
  uint64_t seed;
};

// Maximum live-qubit count for the dense density-matrix path.
inline constexpr int kDensityMatrixGuard = 12;

// Reset-to-zero Kraus channel on one qubit of an n-qubit density matrix:
// rho -> M0 rho M0^ + M1 rho M1^ with M0 = |0><0|, M1 = |0><1|.
Eigen::MatrixXcd apply_reset(const Eigen::MatrixXcd& rho, int qubit, int n_qubits);

// Hadamard test over the literal reset-channel circuit: ancilla H (plus an
// extra phase gate for the imaginary part), controlled-P_i^k between each
// block and its reset, final H. Returns P(anc=0) - P(anc=1), exact or
// frequency-estimated when shots are given.
double hadamard_test_expectation(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                                 const PauliString& p, Part part,
                                 const std::optional<ShotPlan>& shots = std::nullopt);

/// Joint ancilla/redundant-register probabilities of the equivalent
/// pure-state circuit, where every reset is replaced by a SWAP onto a fresh
/// redundant qubit.
struct JointProbTable {
  int n_redundant;
  Eigen::VectorXd anc0;  // P(anc=0, red=f), indexed by bitstring f
  Eigen::VectorXd anc1;
};

JointProbTable simulate_equivalent_pure(const AnsatzSpec& spec,
                                        const Eigen::VectorXd& params,
                                        const PauliString& p, Part part = Part::Real);

// Overlap Hadamard tests of the VarQITE linear system: C-Q_i controlled on
// |1>_anc and C-Q_j (or a controlled Pauli string) on |0>_anc. Returns the
// requested part of <xi_i|xi_j> resp. <xi_j| P_k |C>.
double varqite_test_overlap(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                            int i, int j, Part part,
                            const std::optional<ShotPlan>& shots = std::nullopt);
double varqite_test_overlap(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                            int j, const PauliString& p, Part part,
                            const std::optional<ShotPlan>& shots = std::nullopt);

}  // namespace qcmps

#include "qcmps/channel.hpp"

#include <random>
#include <stdexcept>

namespace qcmps {

namespace {

Eigen::Index bit_of(int qubit, int n_qubits) {
  return Eigen::Index(1) << (n_qubits - 1 - qubit);
}

// Phase gate applied after the first ancilla Hadamard when the imaginary
// part is requested: multiplies the |1> branch by -i, so that
// P(0) - P(1) = Im <branch0|branch1>.
Eigen::Matrix2cd imag_part_gate() {
  Eigen::Matrix2cd k;
  k << 1.0, 0.0, 0.0, Complex(0.0, -1.0);
  return k;
}

Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd h;
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

void evolve(Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& u) {
  rho = u * rho * u.adjoint();
}

// |v><v|_control (x) gate_target + |1-v><1-v|_control (x) Id
Eigen::MatrixXcd controlled_gate(const Eigen::Matrix2cd& gate, int target, int control,
                                 bool control_on_one, int n_qubits) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  const Eigen::Index cbit = bit_of(control, n_qubits);
  const Eigen::Index tbit = bit_of(target, n_qubits);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const bool active = ((j & cbit) != 0) == control_on_one;
    if (!active) {
      m(j, j) = 1.0;
      continue;
    }
    const int in = (j & tbit) ? 1 : 0;
    for (int out = 0; out < 2; ++out) {
      const Eigen::Index k = (j & ~tbit) | (out ? tbit : 0);
      m(k, j) += gate(out, in);
    }
  }
  return m;
}

struct Insertion {
  ParamSite site;
  bool control_on_one;
};

// Runs one Hadamard-test circuit on the reset-channel density matrix and
// returns P(anc=0) - P(anc=1). Register: [anc, physical, bond...].
double run_test(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                const PauliString* per_block_pauli, const std::vector<Insertion>& insertions,
                Part part, const std::optional<ShotPlan>& shots) {
  const int nq = spec.n_block_qubits() + 1;
  if (nq > kDensityMatrixGuard)
    throw GuardExceeded("density-matrix register exceeds " +
                        std::to_string(kDensityMatrixGuard) + " qubits");
  if (per_block_pauli && per_block_pauli->n_qubits() != spec.n_blocks())
    throw std::invalid_argument("pauli string qubit count != number of blocks");
  const Eigen::Index dim = Eigen::Index(1) << nq;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(0, 0) = 1.0;

  evolve(rho, embed_single_qubit(hadamard(), 0, nq));
  if (part == Part::Imaginary)
    evolve(rho, embed_single_qubit(imag_part_gate(), 0, nq));

  for (int block = 0; block < spec.n_blocks(); ++block) {
    const auto& program = spec.block_program(block);
    for (int pos = 0; pos < static_cast<int>(program.size()); ++pos) {
      const auto& gate = program[pos];
      if (const auto* rot = std::get_if<RotationGate>(&gate)) {
        evolve(rho, embed_single_qubit(rotation_matrix(rot->axis, params(rot->param)),
                                       rot->qubit + 1, nq));
      } else {
        const auto& cnot = std::get<CnotGate>(gate);
        evolve(rho, cnot_matrix(cnot.control + 1, cnot.target + 1, nq));
      }
      for (const auto& ins : insertions) {
        if (ins.site.block == block && ins.site.position == pos)
          evolve(rho, controlled_gate(axis_matrix(ins.site.generator), ins.site.qubit + 1,
                                      0, ins.control_on_one, nq));
      }
    }
    if (per_block_pauli) {
      const PauliAxis axis = per_block_pauli->axis(block);
      if (axis != PauliAxis::I)
        evolve(rho, controlled_gate(axis_matrix(axis), 1, 0, true, nq));
    }
    rho = apply_reset(rho, 1, nq);
  }

  evolve(rho, embed_single_qubit(hadamard(), 0, nq));

  double p0 = 0.0;
  const Eigen::Index anc_bit = bit_of(0, nq);
  for (Eigen::Index j = 0; j < dim; ++j)
    if ((j & anc_bit) == 0) p0 += rho(j, j).real();
  p0 = std::clamp(p0, 0.0, 1.0);

  if (shots) {
    if (shots->shots < 1) throw std::invalid_argument("shot count must be >= 1");
    std::mt19937_64 rng(shots->seed);
    std::binomial_distribution<long> dist(shots->shots, p0);
    p0 = static_cast<double>(dist(rng)) / static_cast<double>(shots->shots);
  }
  return 2.0 * p0 - 1.0;
}

}  // namespace

Eigen::MatrixXcd apply_reset(const Eigen::MatrixXcd& rho, int qubit, int n_qubits) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("density matrix dimension mismatch");
  if (qubit < 0 || qubit >= n_qubits) throw std::out_of_range("qubit index out of range");
  const Eigen::Index bit = bit_of(qubit, n_qubits);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  // M0 rho M0^ + M1 rho M1^: both Kraus branches land in the qubit-0 sector
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (r & bit) continue;
    for (Eigen::Index c = 0; c < dim; ++c) {
      if (c & bit) continue;
      out(r, c) = rho(r, c) + rho(r | bit, c | bit);
    }
  }
  return out;
}

double hadamard_test_expectation(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                                 const PauliString& p, Part part,
                                 const std::optional<ShotPlan>& shots) {
  return run_test(spec, params, &p, {}, part, shots);
}

double varqite_test_overlap(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                            int i, int j, Part part,
                            const std::optional<ShotPlan>& shots) {
  std::vector<Insertion> insertions;
  insertions.push_back({spec.resolve_param(i), true});
  insertions.push_back({spec.resolve_param(j), false});
  const double value = run_test(spec, params, nullptr, insertions, part, shots);
  // the circuit measures <xi_j|xi_i>; flip the sign of the imaginary part
  return part == Part::Imaginary ? -value : value;
}

double varqite_test_overlap(const AnsatzSpec& spec, const Eigen::VectorXd& params,
                            int j, const PauliString& p, Part part,
                            const std::optional<ShotPlan>& shots) {
  std::vector<Insertion> insertions;
  insertions.push_back({spec.resolve_param(j), false});
  return run_test(spec, params, &p, insertions, part, shots);
}

JointProbTable simulate_equivalent_pure(const AnsatzSpec& spec,
                                        const Eigen::VectorXd& params,
                                        const PauliString& p, Part part) {
  const int n_red = spec.n_blocks() - 1;
  const int nq = 1 + spec.n_block_qubits() + n_red;
  if (nq > guard_qubits())
    throw GuardExceeded("pure-state register of " + std::to_string(nq) +
                        " qubits exceeds guard " + std::to_string(guard_qubits()));
  if (p.n_qubits() != spec.n_blocks())
    throw std::invalid_argument("pauli string qubit count != number of blocks");

  const Eigen::Index dim = Eigen::Index(1) << nq;
  const int n_block_qubits = spec.n_block_qubits();
  const Eigen::Index block_dim = Eigen::Index(1) << n_block_qubits;
  const Eigen::Index red_dim = Eigen::Index(1) << n_red;

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = 1.0;

  auto apply_1q = [&](const Eigen::Matrix2cd& g, int qubit) {
    const Eigen::Index bit = bit_of(qubit, nq);
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j & bit) continue;
      const Complex a = psi(j), b = psi(j | bit);
      psi(j) = g(0, 0) * a + g(0, 1) * b;
      psi(j | bit) = g(1, 0) * a + g(1, 1) * b;
    }
  };
  auto apply_controlled_1q = [&](const Eigen::Matrix2cd& g, int target, int control,
                                 bool on_one) {
    const Eigen::Index tbit = bit_of(target, nq);
    const Eigen::Index cbit = bit_of(control, nq);
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j & tbit) continue;
      if (((j & cbit) != 0) != on_one) continue;
      const Complex a = psi(j), b = psi(j | tbit);
      psi(j) = g(0, 0) * a + g(0, 1) * b;
      psi(j | tbit) = g(1, 0) * a + g(1, 1) * b;
    }
  };
  auto apply_swap = [&](int qa, int qb) {
    const Eigen::Index abit = bit_of(qa, nq), bbit = bit_of(qb, nq);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const bool sa = (j & abit) != 0, sb = (j & bbit) != 0;
      if (sa && !sb) std::swap(psi(j), psi((j ^ abit) | bbit));
    }
  };
  // the block register occupies a contiguous bit field below the ancilla
  auto apply_block = [&](const Eigen::MatrixXcd& u) {
    Eigen::VectorXcd scratch(block_dim);
    for (Eigen::Index a = 0; a < 2; ++a) {
      for (Eigen::Index r = 0; r < red_dim; ++r) {
        const Eigen::Index base = a * (dim / 2) + r;
        for (Eigen::Index ublk = 0; ublk < block_dim; ++ublk)
          scratch(ublk) = psi(base + ublk * red_dim);
        scratch = u * scratch;
        for (Eigen::Index ublk = 0; ublk < block_dim; ++ublk)
          psi(base + ublk * red_dim) = scratch(ublk);
      }
    }
  };

  apply_1q(hadamard(), 0);
  if (part == Part::Imaginary) apply_1q(imag_part_gate(), 0);

  for (int block = 0; block < spec.n_blocks(); ++block) {
    apply_block(block_unitary(spec, block, params));
    const PauliAxis axis = p.axis(block);
    if (axis != PauliAxis::I) apply_controlled_1q(axis_matrix(axis), 1, 0, true);
    if (block < n_red) apply_swap(1, 1 + n_block_qubits + block);
  }

  apply_1q(hadamard(), 0);

  JointProbTable table;
  table.n_redundant = n_red;
  table.anc0 = Eigen::VectorXd::Zero(red_dim);
  table.anc1 = Eigen::VectorXd::Zero(red_dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double prob = std::norm(psi(j));
    const Eigen::Index f = j & (red_dim - 1);
    if (j & bit_of(0, nq))
      table.anc1(f) += prob;
    else
      table.anc0(f) += prob;
  }
  return table;
}

}  // namespace qcmps

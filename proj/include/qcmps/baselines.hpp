#pragma once

#include <functional>
#include <vector>

#include "qcmps/pauli.hpp"
#include "qcmps/varqite.hpp"

namespace qcmps {

/// Dense eigendecomposition of a qubit Hamiltonian. Eigenvalues sorted by
/// real part ascending; ground energy is the eigenvalue of minimal real
/// part (ties broken by minimal |Im|).
struct SpectrumResult {
  std::vector<Complex> eigenvalues;
  Complex ground_energy;
  bool hermitian_input;
};

SpectrumResult exact_diagonalize(const PauliSum& h, int max_qubits = guard_qubits());

// Similarity transform e^{-J} H e^{J} with diagonal J = sum_i g_i Z_i:
// dense conjugation followed by projection onto the Pauli basis. Exactly
// isospectral; produces complex coefficients whenever some g_i != 0 acts on
// an X/Y factor.
PauliSum synthesize_tc(const PauliSum& h, const std::vector<double>& j_coefficients);

struct PenaltySpec {
  PauliSum s2_operator;
  PauliSum number_operator;
  double n_electrons;
};

// F = Re<H> + |<S^2>|^2 + |<N> - N_ele|^2. Hermitian-only path.
double penalty_cost(const Evaluator& evaluator, const Eigen::VectorXd& params,
                    const PenaltySpec& penalty);

struct BfgsConfig {
  double fd_step = 1e-6;        // central-difference step
  double sufficient_decrease = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 40;
  double grad_tol = 1e-6;
  int max_iters = 500;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double cost;
  std::vector<double> trace;  // accepted cost per iteration, non-increasing
  int iterations;
  bool line_search_failed;
  bool converged;
};

using CostFunction = std::function<double(const Eigen::VectorXd&)>;

BfgsResult bfgs_minimize(const CostFunction& cost, const Eigen::VectorXd& x0,
                         const BfgsConfig& config);

struct SeedOutcome {
  uint64_t seed;
  Complex final_energy;
  int iterations;
  std::string status;
  bool success;  // |Re E - reference| below the threshold
};

struct SeedStudy {
  std::vector<uint64_t> seeds;
  std::vector<SeedOutcome> outcomes;
  int success_count = 0;
  double threshold;
  double reference_energy;
  std::vector<double> bin_edges;     // iteration histogram
  std::vector<int> histogram;        // counts per bin, converged seeds only
};

// Runs one optimizer invocation per seed; per-seed failures are recorded,
// never propagated.
SeedStudy run_seed_study(
    const std::function<SeedOutcome(uint64_t seed)>& runner,
    const std::vector<uint64_t>& seeds, double reference_energy, double threshold,
    std::vector<double> bin_edges);

}  // namespace qcmps

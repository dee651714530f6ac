#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcmps/ansatz.hpp"
#include "qcmps/channel.hpp"
#include "qcmps/mps.hpp"
#include "qcmps/pauli.hpp"

namespace qcmps {

/// The McLachlan linear system of one iteration:
///   A_ij = 1/4 Re<xi_i|xi_j>,  C_i = -Re<d_i psi|H|psi>.
struct QfiSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd c;
  Complex energy;
};

/// Expectation/overlap backend shared by the optimizer and the penalty cost.
/// Implementations are the exact tensor contraction (mps) and the literal
/// circuit simulator (channel), interchangeable behind this interface.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Complex energy(const Eigen::VectorXd& params) const = 0;
  virtual Complex expectation_of(const Eigen::VectorXd& params, const PauliSum& op) const = 0;
  virtual QfiSystem assemble(const Eigen::VectorXd& params) const = 0;
  virtual const AnsatzSpec& spec() const = 0;
  virtual const PauliSum& hamiltonian() const = 0;
};

class MpsEvaluator : public Evaluator {
 public:
  MpsEvaluator(AnsatzSpec spec, PauliSum h, int threads = 1);
  Complex energy(const Eigen::VectorXd& params) const override;
  Complex expectation_of(const Eigen::VectorXd& params, const PauliSum& op) const override;
  QfiSystem assemble(const Eigen::VectorXd& params) const override;
  const AnsatzSpec& spec() const override { return spec_; }
  const PauliSum& hamiltonian() const override { return h_; }

 private:
  AnsatzSpec spec_;
  PauliSum h_;
  int threads_;
};

class ChannelEvaluator : public Evaluator {
 public:
  ChannelEvaluator(AnsatzSpec spec, PauliSum h,
                   std::optional<ShotPlan> shots = std::nullopt);
  Complex energy(const Eigen::VectorXd& params) const override;
  Complex expectation_of(const Eigen::VectorXd& params, const PauliSum& op) const override;
  QfiSystem assemble(const Eigen::VectorXd& params) const override;
  const AnsatzSpec& spec() const override { return spec_; }
  const PauliSum& hamiltonian() const override { return h_; }

 private:
  std::optional<ShotPlan> shot_plan(uint64_t stream) const;
  AnsatzSpec spec_;
  PauliSum h_;
  std::optional<ShotPlan> shots_;
};

QfiSystem assemble_system(const Evaluator& evaluator, const Eigen::VectorXd& params);

struct StepPolicy {
  enum class Mode { Fixed, Adaptive };
  Mode mode = Mode::Adaptive;
  double fixed_step = 0.05;
  std::vector<double> candidates = default_candidates();

  static std::vector<double> default_candidates() {
    return {0.02, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70};
  }
  static StepPolicy fixed(double dtau) {
    return StepPolicy{Mode::Fixed, dtau, {}};
  }
  static StepPolicy adaptive(std::vector<double> set = default_candidates()) {
    return StepPolicy{Mode::Adaptive, 0.05, std::move(set)};
  }
};

struct VarqiteConfig {
  double regularization = 1e-5;
  double tol = 1e-7;
  int max_iters = 500;
  StepPolicy step;
};

struct IterationRecord {
  int iteration;
  double energy_re;
  double energy_im;
  double step;         // 0 for the initial record
  double dir_norm;     // 2-norm of the solved direction
  double elapsed_ms;   // 0 in deterministic mode
  std::vector<double> candidate_energies;  // Re E per adaptive candidate
};

enum class RunStatus { ToleranceMet, IterationCap, NumericalFailure };
std::string to_string(RunStatus status);

struct ConvergenceTrace {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::IterationCap;
  Eigen::VectorXd final_params;
  Complex final_energy;
  int iterations = 0;
  std::string failure_message;
};

// Solves (A + delta I) x = C by Cholesky; retries once with delta*100.
Eigen::VectorXd solve_direction(const QfiSystem& sys, double regularization);

struct StepChoice {
  double step;
  Eigen::VectorXd params;
  Complex energy;
  std::vector<double> candidate_energies;
};

StepChoice select_step(const Evaluator& evaluator, const Eigen::VectorXd& params,
                       const Eigen::VectorXd& direction, const StepPolicy& policy);

// Euler VarQITE loop: assemble -> solve -> step until |Re dE| < tol or cap.
ConvergenceTrace run_varqite(const Evaluator& evaluator, const Eigen::VectorXd& theta0,
                             const VarqiteConfig& config, bool deterministic = false);

// Trace rows: iter, energy_re, energy_im, step, dir_norm, elapsed_ms (CSV).
std::string serialize_trace(const ConvergenceTrace& trace);
ConvergenceTrace parse_trace(const std::string& text);

}  // namespace qcmps

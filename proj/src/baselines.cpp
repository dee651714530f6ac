#include "qcmps/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

namespace qcmps {

SpectrumResult exact_diagonalize(const PauliSum& h, int max_qubits) {
  const int n = h.n_qubits();
  if (n > max_qubits)
    throw GuardExceeded("exact_diagonalize: " + std::to_string(n) +
                        " qubits exceeds guard " + std::to_string(max_qubits));
  const Eigen::MatrixXcd m = dense_matrix(h, max_qubits);
  SpectrumResult out;
  out.hermitian_input = h.hermitian();
  if (out.hermitian_input) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success)
      throw NumericalFailure("symmetric eigensolver did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      out.eigenvalues.emplace_back(es.eigenvalues()(i), 0.0);
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
      throw NumericalFailure("general eigensolver did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      out.eigenvalues.push_back(es.eigenvalues()(i));
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const Complex& a, const Complex& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return std::abs(a.imag()) < std::abs(b.imag());
            });
  out.ground_energy = out.eigenvalues.front();
  return out;
}

namespace {

// Conjugation by a diagonal e^J only mixes X and Y on qubits with g != 0;
// the candidate output strings are the closure of the inputs under that
// substitution.
std::set<PauliString> candidate_strings(const PauliSum& h,
                                        const std::vector<double>& g) {
  std::set<PauliString> candidates;
  for (const auto& term : h.terms()) {
    std::vector<int> active;
    for (const auto& [q, a] : term.string.ops())
      if ((a == PauliAxis::X || a == PauliAxis::Y) && g[q] != 0.0)
        active.push_back(q);
    const size_t combos = size_t(1) << active.size();
    for (size_t mask = 0; mask < combos; ++mask) {
      PauliString s = term.string;
      for (size_t k = 0; k < active.size(); ++k)
        s.set(active[k], (mask >> k) & 1 ? PauliAxis::Y : PauliAxis::X);
      candidates.insert(s);
    }
  }
  return candidates;
}

// Tr[P M] using the signed-permutation structure of a Pauli string.
Complex pauli_trace(const PauliString& p, const Eigen::MatrixXcd& m) {
  const int n = p.n_qubits();
  const Eigen::Index dim = Eigen::Index(1) << n;
  const Complex i(0.0, 1.0);
  Complex trace(0.0, 0.0);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Eigen::Index row = col;
    Complex phase(1.0, 0.0);
    for (const auto& [q, a] : p.ops()) {
      const Eigen::Index bit = Eigen::Index(1) << (n - 1 - q);
      const bool set = (col & bit) != 0;
      switch (a) {
        case PauliAxis::X: row ^= bit; break;
        case PauliAxis::Y:
          row ^= bit;
          phase *= set ? -i : i;
          break;
        case PauliAxis::Z:
          if (set) phase = -phase;
          break;
        case PauliAxis::I: break;
      }
    }
    // phase is <row|P|col>; the trace needs <col|P|row> = conj(phase)
    trace += std::conj(phase) * m(row, col);
  }
  return trace;
}

}  // namespace

PauliSum synthesize_tc(const PauliSum& h, const std::vector<double>& j_coefficients) {
  const int n = h.n_qubits();
  if (n > 12)
    throw GuardExceeded("synthesize_tc: " + std::to_string(n) + " qubits exceeds guard 12");
  if (static_cast<int>(j_coefficients.size()) != n)
    throw std::invalid_argument("need one Jastrow coefficient per qubit");

  const Eigen::Index dim = Eigen::Index(1) << n;
  // diagonal of J = sum_i g_i Z_i in the computational basis
  Eigen::VectorXd j_diag = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index b = 0; b < dim; ++b)
    for (int q = 0; q < n; ++q)
      j_diag(b) += ((b >> (n - 1 - q)) & 1) ? -j_coefficients[q] : j_coefficients[q];

  Eigen::MatrixXcd m = dense_matrix(h, 12);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      m(r, c) *= std::exp(j_diag(c) - j_diag(r));

  PauliSum out(n);
  const double norm = 1.0 / static_cast<double>(dim);
  for (const auto& s : candidate_strings(h, j_coefficients)) {
    const Complex coeff = pauli_trace(s, m) * norm;
    if (std::abs(coeff) > kCoeffPruneTol) out.add(coeff, s);
  }
  return out;
}

double penalty_cost(const Evaluator& evaluator, const Eigen::VectorXd& params,
                    const PenaltySpec& penalty) {
  if (!evaluator.hamiltonian().hermitian())
    throw std::invalid_argument("penalty cost is defined for Hermitian Hamiltonians only");
  if (!penalty.s2_operator.hermitian() || !penalty.number_operator.hermitian())
    throw std::invalid_argument("penalty operators must be Hermitian");
  const double e = evaluator.energy(params).real();
  const Complex s2 = evaluator.expectation_of(params, penalty.s2_operator);
  const Complex num = evaluator.expectation_of(params, penalty.number_operator);
  const Complex num_dev = num - Complex(penalty.n_electrons, 0.0);
  return e + std::norm(s2) + std::norm(num_dev);
}

namespace {

Eigen::VectorXd central_difference_gradient(const CostFunction& cost,
                                            const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = cost(probe);
    probe(i) = x(i) - h;
    const double down = cost(probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace

BfgsResult bfgs_minimize(const CostFunction& cost, const Eigen::VectorXd& x0,
                         const BfgsConfig& config) {
  const Eigen::Index n = x0.size();
  BfgsResult result;
  result.x = x0;
  result.cost = cost(x0);
  result.iterations = 0;
  result.line_search_failed = false;
  result.converged = false;
  if (!std::isfinite(result.cost))
    throw std::invalid_argument("cost is non-finite at the starting point");
  result.trace.push_back(result.cost);

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd grad = central_difference_gradient(cost, result.x, config.fd_step);

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    if (grad.cwiseAbs().maxCoeff() < config.grad_tol) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd direction = -(h_inv * grad);
    double slope = grad.dot(direction);
    if (slope >= 0.0) {
      // inverse-Hessian estimate lost descent; restart from steepest descent
      h_inv.setIdentity();
      direction = -grad;
      slope = grad.dot(direction);
    }

    double alpha = 1.0;
    double trial_cost = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < config.max_backtracks; ++bt) {
      trial_cost = cost(result.x + alpha * direction);
      if (std::isfinite(trial_cost) &&
          trial_cost <= result.cost + config.sufficient_decrease * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= config.backtrack_factor;
    }
    if (!accepted) {
      result.line_search_failed = true;
      break;
    }

    const Eigen::VectorXd step = alpha * direction;
    const Eigen::VectorXd x_new = result.x + step;
    const Eigen::VectorXd grad_new =
        central_difference_gradient(cost, x_new, config.fd_step);
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = step.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
      const Eigen::MatrixXd left = identity - rho * step * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * step * step.transpose();
    }
    result.x = x_new;
    result.cost = trial_cost;
    result.trace.push_back(trial_cost);
    result.iterations = iter;
    grad = grad_new;
  }
  return result;
}

SeedStudy run_seed_study(const std::function<SeedOutcome(uint64_t seed)>& runner,
                         const std::vector<uint64_t>& seeds, double reference_energy,
                         double threshold, std::vector<double> bin_edges) {
  if (seeds.empty()) throw std::invalid_argument("seed study needs >= 1 seed");
  SeedStudy study;
  study.seeds = seeds;
  study.threshold = threshold;
  study.reference_energy = reference_energy;
  study.bin_edges = std::move(bin_edges);
  study.histogram.assign(
      study.bin_edges.size() > 1 ? study.bin_edges.size() - 1 : 0, 0);
  for (uint64_t seed : seeds) {
    SeedOutcome outcome;
    try {
      outcome = runner(seed);
    } catch (const std::exception& e) {
      outcome = SeedOutcome{seed, Complex(0.0, 0.0), 0,
                            std::string("error: ") + e.what(), false};
    }
    outcome.success =
        outcome.status.rfind("error", 0) != 0 &&
        std::abs(outcome.final_energy.real() - reference_energy) < threshold;
    if (outcome.status == "tolerance-met" && study.histogram.size() > 0) {
      for (size_t b = 0; b + 1 < study.bin_edges.size(); ++b) {
        if (outcome.iterations >= study.bin_edges[b] &&
            outcome.iterations < study.bin_edges[b + 1]) {
          ++study.histogram[b];
          break;
        }
      }
    }
    if (outcome.success) ++study.success_count;
    study.outcomes.push_back(std::move(outcome));
  }
  return study;
}

}  // namespace qcmps

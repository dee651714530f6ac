#include "qcmps/varqite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <Eigen/Cholesky>

#include "qcmps/errors.hpp"

namespace qcmps {

namespace {

void check_dimensions(const AnsatzSpec& spec, const PauliSum& h) {
  if (h.n_qubits() != spec.n_blocks())
    throw std::invalid_argument("hamiltonian qubit count != ansatz block count");
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

MpsEvaluator::MpsEvaluator(AnsatzSpec spec, PauliSum h, int threads)
    : spec_(std::move(spec)), h_(std::move(h)), threads_(std::max(1, threads)) {
  check_dimensions(spec_, h_);
}

Complex MpsEvaluator::energy(const Eigen::VectorXd& params) const {
  return expectation(tensors_from_params(spec_, params), h_);
}

Complex MpsEvaluator::expectation_of(const Eigen::VectorXd& params,
                                     const PauliSum& op) const {
  return expectation(tensors_from_params(spec_, params), op);
}

QfiSystem MpsEvaluator::assemble(const Eigen::VectorXd& params) const {
  const int p = spec_.n_params();
  const QcmpsState base = tensors_from_params(spec_, params);

  std::vector<QcmpsState> xi;
  xi.reserve(p);
  for (int i = 0; i < p; ++i) {
    const ParamSite site = spec_.resolve_param(i);
    xi.push_back(base.with_replaced(
        site.block, ComponentTensor::from_unitary(
                        block_unitary_with_insertion(spec_, site.block, params, site),
                        spec_.n_virtual())));
  }

  QfiSystem sys;
  sys.a = Eigen::MatrixXd::Zero(p, p);
  sys.c = Eigen::VectorXd::Zero(p);
  parallel_for(p, threads_, [&](int i) {
    for (int j = i; j < p; ++j) {
      const double aij = 0.25 * overlap(xi[i], xi[j]).real();
      sys.a(i, j) = aij;
      sys.a(j, i) = aij;
    }
    // C_i = -Re<d_i psi|H psi> = 1/2 Im sum_k c_k <xi_i|P_k|C>
    Complex xi_h(0.0, 0.0);
    for (const auto& term : h_.terms())
      xi_h += term.coeff * overlap(xi[i], base, &term.string);
    sys.c(i) = 0.5 * xi_h.imag();
  });
  sys.energy = expectation(base, h_);
  if (!sys.a.allFinite() || !sys.c.allFinite())
    throw NumericalFailure("non-finite entries in the assembled linear system");
  return sys;
}

ChannelEvaluator::ChannelEvaluator(AnsatzSpec spec, PauliSum h,
                                   std::optional<ShotPlan> shots)
    : spec_(std::move(spec)), h_(std::move(h)), shots_(shots) {
  check_dimensions(spec_, h_);
}

std::optional<ShotPlan> ChannelEvaluator::shot_plan(uint64_t stream) const {
  if (!shots_) return std::nullopt;
  // per-call derived seed so repeated tests draw independent samples
  return ShotPlan{shots_->shots, shots_->seed * 0x9e3779b97f4a7c15ull + stream};
}

Complex ChannelEvaluator::expectation_of(const Eigen::VectorXd& params,
                                         const PauliSum& op) const {
  if (op.n_qubits() != spec_.n_blocks())
    throw std::invalid_argument("operator qubit count != ansatz block count");
  Complex value(0.0, 0.0);
  uint64_t stream = 0;
  for (const auto& term : op.terms()) {
    const double re =
        hadamard_test_expectation(spec_, params, term.string, Part::Real,
                                  shot_plan(stream++));
    const double im =
        hadamard_test_expectation(spec_, params, term.string, Part::Imaginary,
                                  shot_plan(stream++));
    value += term.coeff * Complex(re, im);
  }
  return value;
}

Complex ChannelEvaluator::energy(const Eigen::VectorXd& params) const {
  return expectation_of(params, h_);
}

QfiSystem ChannelEvaluator::assemble(const Eigen::VectorXd& params) const {
  const int p = spec_.n_params();
  QfiSystem sys;
  sys.a = Eigen::MatrixXd::Zero(p, p);
  sys.c = Eigen::VectorXd::Zero(p);
  uint64_t stream = 1'000'000;
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      const double aij =
          0.25 * varqite_test_overlap(spec_, params, i, j, Part::Real, shot_plan(stream++));
      sys.a(i, j) = aij;
      sys.a(j, i) = aij;
    }
    Complex xi_h(0.0, 0.0);
    for (const auto& term : h_.terms()) {
      const double re = varqite_test_overlap(spec_, params, i, term.string, Part::Real,
                                             shot_plan(stream++));
      const double im = varqite_test_overlap(spec_, params, i, term.string,
                                             Part::Imaginary, shot_plan(stream++));
      xi_h += term.coeff * Complex(re, im);
    }
    sys.c(i) = 0.5 * xi_h.imag();
  }
  sys.energy = energy(params);
  if (!sys.a.allFinite() || !sys.c.allFinite())
    throw NumericalFailure("non-finite entries in the assembled linear system");
  return sys;
}

QfiSystem assemble_system(const Evaluator& evaluator, const Eigen::VectorXd& params) {
  return evaluator.assemble(params);
}

Eigen::VectorXd solve_direction(const QfiSystem& sys, double regularization) {
  if (regularization < 0.0)
    throw std::invalid_argument("regularization must be >= 0");
  const int p = static_cast<int>(sys.c.size());
  auto attempt = [&](double delta) -> std::optional<Eigen::VectorXd> {
    const Eigen::MatrixXd reg =
        sys.a + delta * Eigen::MatrixXd::Identity(p, p);
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd x = llt.solve(sys.c);
    const double residual = (reg * x - sys.c).cwiseAbs().maxCoeff();
    const double bound = 1e-10 * std::max(1.0, sys.c.cwiseAbs().maxCoeff());
    if (!x.allFinite() || residual > bound) return std::nullopt;
    return x;
  };
  if (auto x = attempt(regularization)) return *x;
  if (auto x = attempt(regularization * 100.0)) return *x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.a);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  throw NumericalFailure(
      "regularized solve failed; A spectrum [" + std::to_string(lo) + ", " +
      std::to_string(hi) + "], delta " + std::to_string(regularization));
}

StepChoice select_step(const Evaluator& evaluator, const Eigen::VectorXd& params,
                       const Eigen::VectorXd& direction, const StepPolicy& policy) {
  if (!direction.allFinite())
    throw NumericalFailure("non-finite update direction");
  if (policy.mode == StepPolicy::Mode::Fixed) {
    StepChoice choice;
    choice.step = policy.fixed_step;
    choice.params = params + policy.fixed_step * direction;
    choice.energy = evaluator.energy(choice.params);
    return choice;
  }
  if (policy.candidates.empty())
    throw std::invalid_argument("adaptive step policy needs candidates");
  std::vector<double> candidates = policy.candidates;
  std::sort(candidates.begin(), candidates.end());
  StepChoice choice;
  double best = std::numeric_limits<double>::infinity();
  bool any_finite = false;
  for (double tau : candidates) {
    Eigen::VectorXd trial = params + tau * direction;
    const Complex e = evaluator.energy(trial);
    choice.candidate_energies.push_back(e.real());
    // strict comparison: ties resolve to the smallest candidate
    if (std::isfinite(e.real()) && e.real() < best) {
      best = e.real();
      choice.step = tau;
      choice.params = std::move(trial);
      choice.energy = e;
      any_finite = true;
    }
  }
  if (!any_finite)
    throw NumericalFailure("all candidate step energies are non-finite");
  return choice;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ToleranceMet: return "tolerance-met";
    case RunStatus::IterationCap: return "iteration-cap";
    case RunStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

ConvergenceTrace run_varqite(const Evaluator& evaluator, const Eigen::VectorXd& theta0,
                             const VarqiteConfig& config, bool deterministic) {
  if (theta0.size() != evaluator.spec().n_params())
    throw std::invalid_argument("initial parameter vector length mismatch");
  if (config.tol <= 0.0 || config.max_iters < 1)
    throw std::invalid_argument("invalid VarQITE config");

  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed_ms = [&]() -> double {
    if (deterministic) return 0.0;
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };

  ConvergenceTrace trace;
  Eigen::VectorXd theta = theta0;
  Complex e_prev = evaluator.energy(theta);
  trace.records.push_back(
      {0, e_prev.real(), e_prev.imag(), 0.0, 0.0, elapsed_ms(), {}});
  trace.final_params = theta;
  trace.final_energy = e_prev;
  trace.status = RunStatus::IterationCap;

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    try {
      const QfiSystem sys = evaluator.assemble(theta);
      const Eigen::VectorXd direction = solve_direction(sys, config.regularization);
      StepChoice choice = select_step(evaluator, theta, direction, config.step);
      theta = choice.params;
      trace.records.push_back({iter, choice.energy.real(), choice.energy.imag(),
                               choice.step, direction.norm(), elapsed_ms(),
                               std::move(choice.candidate_energies)});
      trace.final_params = theta;
      trace.final_energy = choice.energy;
      trace.iterations = iter;
      if (std::abs(choice.energy.real() - e_prev.real()) < config.tol) {
        trace.status = RunStatus::ToleranceMet;
        return trace;
      }
      e_prev = choice.energy;
    } catch (const NumericalFailure& e) {
      trace.status = RunStatus::NumericalFailure;
      trace.failure_message = e.what();
      return trace;
    }
  }
  return trace;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string serialize_trace(const ConvergenceTrace& trace) {
  std::string out = "iter,energy_re,energy_im,step,dir_norm,elapsed_ms\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.iteration) + ',' + fmt(r.energy_re) + ',' +
           fmt(r.energy_im) + ',' + fmt(r.step) + ',' + fmt(r.dir_norm) + ',' +
           fmt(r.elapsed_ms) + '\n';
  }
  return out;
}

ConvergenceTrace parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "iter,energy_re,energy_im,step,dir_norm,elapsed_ms")
    throw ParseError("trace file: bad header");
  ConvergenceTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    IterationRecord r;
    std::istringstream row(line);
    std::string field;
    auto next = [&]() {
      if (!std::getline(row, field, ',')) throw ParseError("trace file: short row");
      return field;
    };
    r.iteration = std::stoi(next());
    r.energy_re = std::stod(next());
    r.energy_im = std::stod(next());
    r.step = std::stod(next());
    r.dir_norm = std::stod(next());
    r.elapsed_ms = std::stod(next());
    trace.records.push_back(std::move(r));
  }
  if (!trace.records.empty()) {
    trace.final_energy =
        Complex(trace.records.back().energy_re, trace.records.back().energy_im);
    trace.iterations = trace.records.back().iteration;
  }
  return trace;
}

}  // namespace qcmps

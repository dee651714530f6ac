#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "qcmps/varqite.hpp"

using namespace qcmps;
using qcmps::testing::dense_expectation;
using qcmps::testing::fd_derivative_states;
using qcmps::testing::random_hermitian;

namespace {

PauliSum toy_z() {
  PauliSum h(1);
  h.add(1.0, PauliString::parse(1, "Z0"));
  return h;
}

}  // namespace

TEST_CASE("assembled system: diagonal, symmetry, Gram positivity") {
  std::mt19937_64 rng(61);
  const AnsatzSpec spec(1, 2, 1);
  const PauliSum h = random_hermitian(2, 4, rng);
  const MpsEvaluator evaluator(spec, h);
  for (uint64_t seed = 0; seed < 3; ++seed) {
    const QfiSystem sys = evaluator.assemble(random_params(spec, seed));
    CHECK((sys.a.diagonal().array() - 0.25).abs().maxCoeff() < 1e-12);
    CHECK((sys.a - sys.a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(4.0 * sys.a);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("C equals -1/2 of the finite-difference gradient (Hermitian)") {
  std::mt19937_64 rng(67);
  const AnsatzSpec spec(1, 2, 1);
  const PauliSum h = random_hermitian(2, 4, rng);
  const MpsEvaluator evaluator(spec, h);
  const Eigen::VectorXd params = random_params(spec, 11);
  const QfiSystem sys = evaluator.assemble(params);
  const double fd_h = 1e-5;
  Eigen::VectorXd probe = params;
  for (int i = 0; i < spec.n_params(); ++i) {
    probe(i) = params(i) + fd_h;
    const double up = evaluator.energy(probe).real();
    probe(i) = params(i) - fd_h;
    const double down = evaluator.energy(probe).real();
    probe(i) = params(i);
    CHECK(std::abs(sys.c(i) + 0.5 * (up - down) / (2.0 * fd_h)) < 1e-6);
  }
}

TEST_CASE("A matches finite-difference derivative-state overlaps") {
  std::mt19937_64 rng(71);
  const AnsatzSpec spec(1, 2, 1);
  const PauliSum h = random_hermitian(2, 3, rng);
  const Eigen::VectorXd params = random_params(spec, 29);
  const QfiSystem sys = MpsEvaluator(spec, h).assemble(params);
  const auto dpsi = fd_derivative_states(spec, params);
  for (int i = 0; i < spec.n_params(); i += 3)
    for (int j = i; j < spec.n_params(); j += 3)
      CHECK(std::abs(sys.a(i, j) - dpsi[i].dot(dpsi[j]).real()) < 1e-6);
}

TEST_CASE("solve_direction") {
  SUBCASE("diagonal system solves in closed form") {
    QfiSystem sys;
    sys.a = 0.25 * Eigen::MatrixXd::Identity(6, 6);
    sys.c = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
    const double delta = 1e-5;
    const Eigen::VectorXd x = solve_direction(sys, delta);
    CHECK((x - sys.c / (0.25 + delta)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("zero C gives zero direction") {
    QfiSystem sys;
    sys.a = 0.25 * Eigen::MatrixXd::Identity(4, 4);
    sys.c = Eigen::VectorXd::Zero(4);
    CHECK(solve_direction(sys, 1e-5).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("rank-deficient A stays solvable under regularization") {
    // Gram matrix of six identical xi vectors: all entries 0.25, rank 1.
    QfiSystem sys;
    sys.a = 0.25 * Eigen::MatrixXd::Ones(6, 6);
    sys.c = Eigen::VectorXd::Ones(6);
    const double delta = 1e-5;
    const Eigen::VectorXd x = solve_direction(sys, delta);
    CHECK(x.allFinite());
    const double residual =
        ((sys.a + delta * Eigen::MatrixXd::Identity(6, 6)) * x - sys.c)
            .cwiseAbs()
            .maxCoeff();
    CHECK(residual < 1e-10 * std::max(1.0, sys.c.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("select_step") {
  const AnsatzSpec spec(1, 1, 1);
  const MpsEvaluator evaluator(spec, toy_z());
  const Eigen::VectorXd params = random_params(spec, 2);
  const QfiSystem sys = evaluator.assemble(params);
  const Eigen::VectorXd direction = solve_direction(sys, 1e-5);

  SUBCASE("fixed mode returns the configured step") {
    const StepChoice choice =
        select_step(evaluator, params, direction, StepPolicy::fixed(0.05));
    CHECK(choice.step == 0.05);
    CHECK((choice.params - (params + 0.05 * direction)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("adaptive mode returns the argmin over candidates") {
    const StepPolicy policy = StepPolicy::adaptive();
    const StepChoice choice = select_step(evaluator, params, direction, policy);
    REQUIRE(choice.candidate_energies.size() == policy.candidates.size());
    double best = choice.candidate_energies[0];
    for (const double e : choice.candidate_energies) best = std::min(best, e);
    CHECK(choice.energy.real() == best);
    // a strict minimizer is selected
    for (size_t k = 0; k < policy.candidates.size(); ++k)
      if (policy.candidates[k] == choice.step)
        CHECK(choice.candidate_energies[k] == best);
  }
  SUBCASE("zero direction ties break to the smallest candidate") {
    const StepChoice choice = select_step(
        evaluator, params, Eigen::VectorXd::Zero(spec.n_params()),
        StepPolicy::adaptive());
    CHECK(choice.step == 0.02);
    CHECK(std::abs(choice.energy - evaluator.energy(params)) < 1e-14);
  }
}

TEST_CASE("toy Z instance converges to -1") {
  const AnsatzSpec spec(1, 1, 1);
  const MpsEvaluator evaluator(spec, toy_z());
  VarqiteConfig config;
  const ConvergenceTrace trace =
      run_varqite(evaluator, random_params(spec, 0), config, true);
  CHECK(trace.status == RunStatus::ToleranceMet);
  CHECK(trace.final_energy.real() == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(trace.final_energy.imag()) < 1e-9);
}

TEST_CASE("argmin property holds at every recorded iteration") {
  const AnsatzSpec spec(1, 2, 1);
  std::mt19937_64 rng(83);
  const PauliSum h = random_hermitian(2, 4, rng);
  const MpsEvaluator evaluator(spec, h);
  VarqiteConfig config;
  config.max_iters = 40;
  const ConvergenceTrace trace =
      run_varqite(evaluator, random_params(spec, 1), config, true);
  REQUIRE(trace.records.size() > 1);
  for (size_t r = 1; r < trace.records.size(); ++r) {
    const auto& rec = trace.records[r];
    REQUIRE_FALSE(rec.candidate_energies.empty());
    for (const double e : rec.candidate_energies) CHECK(rec.energy_re <= e + 1e-15);
  }
}

TEST_CASE("stationary point: C vanishes after convergence") {
  const AnsatzSpec spec(1, 1, 1);
  const MpsEvaluator evaluator(spec, toy_z());
  VarqiteConfig config;
  config.tol = 1e-12;
  const ConvergenceTrace trace =
      run_varqite(evaluator, random_params(spec, 3), config, true);
  const QfiSystem sys = evaluator.assemble(trace.final_params);
  CHECK(sys.c.cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("trace serialization round-trips losslessly") {
  const AnsatzSpec spec(1, 1, 1);
  const MpsEvaluator evaluator(spec, toy_z());
  VarqiteConfig config;
  config.max_iters = 20;
  const ConvergenceTrace trace =
      run_varqite(evaluator, random_params(spec, 4), config, true);
  const ConvergenceTrace parsed = parse_trace(serialize_trace(trace));
  REQUIRE(parsed.records.size() == trace.records.size());
  for (size_t r = 0; r < trace.records.size(); ++r) {
    CHECK(parsed.records[r].iteration == trace.records[r].iteration);
    CHECK(parsed.records[r].energy_re == trace.records[r].energy_re);
    CHECK(parsed.records[r].energy_im == trace.records[r].energy_im);
    CHECK(parsed.records[r].step == trace.records[r].step);
    CHECK(parsed.records[r].dir_norm == trace.records[r].dir_norm);
  }
}

TEST_CASE("deterministic runs produce identical traces") {
  std::mt19937_64 rng(91);
  const AnsatzSpec spec(1, 2, 1);
  const PauliSum h = random_hermitian(2, 4, rng);
  const MpsEvaluator evaluator(spec, h);
  VarqiteConfig config;
  config.max_iters = 25;
  const Eigen::VectorXd theta0 = random_params(spec, 5);
  const std::string a = serialize_trace(run_varqite(evaluator, theta0, config, true));
  const std::string b = serialize_trace(run_varqite(evaluator, theta0, config, true));
  CHECK(a == b);
}

TEST_CASE("threaded assembly matches single-threaded assembly") {
  std::mt19937_64 rng(97);
  const AnsatzSpec spec(1, 3, 1);
  const PauliSum h = random_hermitian(3, 5, rng);
  const Eigen::VectorXd params = random_params(spec, 6);
  const QfiSystem serial = MpsEvaluator(spec, h, 1).assemble(params);
  const QfiSystem parallel = MpsEvaluator(spec, h, 4).assemble(params);
  CHECK((serial.a - parallel.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.c - parallel.c).cwiseAbs().maxCoeff() == 0.0);
}

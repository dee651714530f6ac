#include "qcmps/harness.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qcmps {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& doc, const std::string& key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError("config field '" + key + "': " + e.what());
  }
}

StepPolicy parse_step_policy(const json& doc) {
  if (!doc.is_object()) throw ParseError("config field 'optimizer.step' must be an object");
  const std::string mode = field_or<std::string>(doc, "mode", "adaptive");
  if (mode == "fixed")
    return StepPolicy::fixed(field_or<double>(doc, "dtau", 0.05));
  if (mode == "adaptive") {
    auto candidates = field_or<std::vector<double>>(doc, "candidates",
                                                    StepPolicy::default_candidates());
    for (double c : candidates)
      if (c <= 0.0) throw ParseError("config: step candidates must be > 0");
    return StepPolicy::adaptive(std::move(candidates));
  }
  throw ParseError("config field 'optimizer.step.mode' must be 'fixed' or 'adaptive'");
}

RunConfig parse_run_config(const json& doc) {
  RunConfig config;
  if (!doc.contains("hamiltonian"))
    throw ParseError("config: missing field 'hamiltonian'");
  config.hamiltonian_path = doc.at("hamiltonian").get<std::string>();

  if (doc.contains("ansatz")) {
    const auto& a = doc.at("ansatz");
    config.ansatz.n_virtual = field_or<int>(a, "n_virtual", 1);
    config.ansatz.n_layers = field_or<int>(a, "n_layers", 1);
    config.ansatz.init_seed = field_or<uint64_t>(a, "init_seed", 0);
    if (config.ansatz.n_virtual < 1 || config.ansatz.n_layers < 1)
      throw ParseError("config fields 'ansatz.n_virtual'/'ansatz.n_layers' must be >= 1");
    if (a.contains("n_blocks"))
      throw ParseError(
          "config field 'ansatz.n_blocks' is not accepted; the block count "
          "is inferred from the hamiltonian's n_qubits");
  }

  if (doc.contains("optimizer")) {
    const auto& o = doc.at("optimizer");
    config.optimizer.method = field_or<std::string>(o, "method", "varqite");
    if (config.optimizer.method != "varqite" && config.optimizer.method != "bfgs")
      throw ParseError("config field 'optimizer.method' must be 'varqite' or 'bfgs'");
    config.optimizer.varqite.regularization = field_or<double>(o, "regularization", 1e-5);
    config.optimizer.varqite.tol = field_or<double>(o, "tol", 1e-7);
    config.optimizer.varqite.max_iters = field_or<int>(o, "max_iters", 500);
    if (o.contains("step")) config.optimizer.varqite.step = parse_step_policy(o.at("step"));
    config.optimizer.bfgs.fd_step = field_or<double>(o, "fd_step", 1e-6);
    config.optimizer.bfgs.grad_tol = field_or<double>(o, "grad_tol", 1e-6);
    config.optimizer.bfgs.max_iters = field_or<int>(o, "max_iters", 500);
    if (config.optimizer.varqite.regularization < 0 || config.optimizer.varqite.tol <= 0 ||
        config.optimizer.varqite.max_iters < 1)
      throw ParseError("config: invalid optimizer section");
  }

  if (doc.contains("penalty")) {
    PenaltyConfig p;
    p.s2_path = doc.at("penalty").at("s2").get<std::string>();
    p.n_electrons = doc.at("penalty").at("n_electrons").get<double>();
    config.penalty = p;
  }

  config.evaluator = field_or<std::string>(doc, "evaluator", "mps");
  if (config.evaluator != "mps" && config.evaluator != "channel")
    throw ParseError("config field 'evaluator' must be 'mps' or 'channel'");
  if (doc.contains("shots")) {
    const auto& s = doc.at("shots");
    ShotPlan plan{field_or<long>(s, "shots", 1000000),
                  field_or<uint64_t>(s, "seed", 0)};
    if (plan.shots < 1) throw ParseError("config field 'shots.shots' must be >= 1");
    config.shots = plan;
  }
  config.output_dir = field_or<std::string>(doc, "output_dir", "out");
  config.deterministic = field_or<bool>(doc, "deterministic", false);
  config.threads = field_or<int>(doc, "threads", 1);
  config.config_echo = doc.dump();
  return config;
}

std::unique_ptr<Evaluator> make_evaluator(const RunConfig& config, const AnsatzSpec& spec,
                                          const PauliSum& h) {
  if (config.evaluator == "channel")
    return std::make_unique<ChannelEvaluator>(spec, h, config.shots);
  const int threads = config.deterministic ? 1 : config.threads;
  return std::make_unique<MpsEvaluator>(spec, h, threads);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json base_summary(const RunConfig& config) {
  json summary;
  summary["tool_version"] = kVersion;
  summary["config"] = json::parse(config.config_echo);
  return summary;
}

struct OptimizationOutcome {
  Complex final_energy;
  int iterations;
  std::string status;
  std::string trace_csv;
  bool numerical_failure;
};

OptimizationOutcome optimize_once(const RunConfig& config, const AnsatzSpec& spec,
                                  const PauliSum& h, const Evaluator& evaluator,
                                  uint64_t seed) {
  const Eigen::VectorXd theta0 = random_params(spec, seed);
  OptimizationOutcome out;
  out.numerical_failure = false;
  if (config.optimizer.method == "varqite") {
    const ConvergenceTrace trace =
        run_varqite(evaluator, theta0, config.optimizer.varqite, config.deterministic);
    out.final_energy = trace.final_energy;
    out.iterations = trace.iterations;
    out.status = to_string(trace.status);
    out.trace_csv = serialize_trace(trace);
    out.numerical_failure = trace.status == RunStatus::NumericalFailure;
    return out;
  }
  // bfgs path: Hermitian-only cost, optionally with the penalty terms
  if (!h.hermitian())
    throw std::invalid_argument(
        "the bfgs optimizer handles Hermitian Hamiltonians only; use varqite");
  CostFunction cost;
  if (config.penalty) {
    PenaltySpec penalty{parse_hamiltonian_file(config.penalty->s2_path),
                        build_number_operator(h.n_qubits()), config.penalty->n_electrons};
    if (penalty.s2_operator.n_qubits() != h.n_qubits())
      throw ParseError("penalty operator qubit count mismatch");
    cost = [&evaluator, penalty](const Eigen::VectorXd& x) {
      return penalty_cost(evaluator, x, penalty);
    };
  } else {
    cost = [&evaluator](const Eigen::VectorXd& x) {
      return evaluator.energy(x).real();
    };
  }
  const BfgsResult result = bfgs_minimize(cost, theta0, config.optimizer.bfgs);
  out.final_energy = evaluator.energy(result.x);
  out.iterations = result.iterations;
  out.status = result.converged        ? "tolerance-met"
               : result.line_search_failed ? "line-search-failure"
                                           : "iteration-cap";
  ConvergenceTrace trace;
  for (size_t i = 0; i < result.trace.size(); ++i)
    trace.records.push_back({static_cast<int>(i), result.trace[i], 0.0, 0.0, 0.0, 0.0, {}});
  out.trace_csv = serialize_trace(trace);
  return out;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(parse_json_file(path));
}

void apply_overrides(RunConfig& config, const CliOverrides& overrides) {
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  if (overrides.seed) config.ansatz.init_seed = *overrides.seed;
  if (overrides.deterministic) config.deterministic = *overrides.deterministic;
  if (overrides.threads) config.threads = *overrides.threads;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const GuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuardExceeded;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_run(const RunConfig& config) {
  try {
    const PauliSum h = parse_hamiltonian_file(config.hamiltonian_path);
    const AnsatzSpec spec(config.ansatz.n_virtual, h.n_qubits(), config.ansatz.n_layers);
    const auto evaluator = make_evaluator(config, spec, h);
    const OptimizationOutcome outcome =
        optimize_once(config, spec, h, *evaluator, config.ansatz.init_seed);

    json summary = base_summary(config);
    summary["seed"] = config.ansatz.init_seed;
    summary["status"] = outcome.status;
    summary["iterations"] = outcome.iterations;
    summary["final_energy"] = complex_json(outcome.final_energy);
    if (h.n_qubits() <= guard_qubits()) {
      const SpectrumResult spectrum = exact_diagonalize(h);
      summary["ed_ground_energy"] = complex_json(spectrum.ground_energy);
      summary["abs_error"] =
          std::abs(outcome.final_energy.real() - spectrum.ground_energy.real());
    }
    write_file(fs::path(config.output_dir) / "trace.csv", outcome.trace_csv);
    write_file(fs::path(config.output_dir) / "summary.json", summary.dump(2) + "\n");
    std::cout << "final energy: " << outcome.final_energy.real();
    if (std::abs(outcome.final_energy.imag()) > 1e-15)
      std::cout << " + " << outcome.final_energy.imag() << "i";
    std::cout << "  status: " << outcome.status << "  iterations: " << outcome.iterations
              << "\n";
    return outcome.numerical_failure ? kExitNumericalFailure : kExitOk;
  } catch (...) {
    return exit_code_for_current_exception();
  }
}

int cmd_ed(const std::string& hamiltonian_path, int top_k, bool machine_readable) {
  try {
    const PauliSum h = parse_hamiltonian_file(hamiltonian_path);
    const SpectrumResult spectrum = exact_diagonalize(h);
    const int k = std::min<int>(top_k, static_cast<int>(spectrum.eigenvalues.size()));
    if (machine_readable) {
      json doc;
      doc["n_qubits"] = h.n_qubits();
      doc["hermitian"] = spectrum.hermitian_input;
      doc["ground_energy"] = complex_json(spectrum.ground_energy);
      doc["eigenvalues"] = json::array();
      for (int i = 0; i < k; ++i)
        doc["eigenvalues"].push_back(complex_json(spectrum.eigenvalues[i]));
      std::cout << doc.dump(2) << "\n";
    } else {
      std::cout.precision(12);
      std::cout << "ground energy: " << spectrum.ground_energy.real() << " + "
                << spectrum.ground_energy.imag() << "i\n";
      for (int i = 0; i < k; ++i)
        std::cout << "  E[" << i << "] = " << spectrum.eigenvalues[i].real() << " + "
                  << spectrum.eigenvalues[i].imag() << "i\n";
    }
    return kExitOk;
  } catch (...) {
    return exit_code_for_current_exception();
  }
}

int cmd_validate(const RunConfig& config, int n_draws, bool inject_corruption) {
  try {
    const PauliSum h = parse_hamiltonian_file(config.hamiltonian_path);
    const AnsatzSpec spec(config.ansatz.n_virtual, h.n_qubits(), config.ansatz.n_layers);
    double max_dev = 0.0;
    auto track = [&](const char* what, double dev) {
      if (dev > max_dev) max_dev = dev;
      std::cout << "  " << what << ": max deviation " << dev << "\n";
    };
    for (int draw = 0; draw < n_draws; ++draw) {
      const Eigen::VectorXd params =
          random_params(spec, config.ansatz.init_seed + draw);
      QcmpsState state = tensors_from_params(spec, params);
      if (inject_corruption && draw == 0) {
        ComponentTensor bad = state.tensor(0);
        bad.m[0](0, 0) += 0.01;
        state = state.with_replaced(0, std::move(bad));
      }
      double dev_expect = 0.0;
      for (const auto& term : h.terms()) {
        PauliSum single(h.n_qubits());
        single.add(Complex(1.0, 0.0), term.string);
        const Complex mps_value = expectation(state, single);
        const double re = hadamard_test_expectation(spec, params, term.string, Part::Real);
        const double im =
            hadamard_test_expectation(spec, params, term.string, Part::Imaginary);
        dev_expect = std::max(dev_expect, std::abs(mps_value - Complex(re, im)));
      }
      track("pauli expectations", dev_expect);

      const MpsEvaluator mps_eval(spec, h);
      const ChannelEvaluator channel_eval(spec, h);
      const QfiSystem sys_mps = mps_eval.assemble(params);
      const QfiSystem sys_channel = channel_eval.assemble(params);
      track("A entries", (sys_mps.a - sys_channel.a).cwiseAbs().maxCoeff());
      track("C entries", (sys_mps.c - sys_channel.c).cwiseAbs().maxCoeff());
    }
    std::cout << "max deviation overall: " << max_dev << "\n";
    if (max_dev > 1e-8) {
      std::cerr << "validation FAILED (threshold 1e-8)\n";
      return kExitValidationFailure;
    }
    std::cout << "validation passed\n";
    return kExitOk;
  } catch (...) {
    return exit_code_for_current_exception();
  }
}

int cmd_gradcheck(const RunConfig& config, int n_draws) {
  try {
    const PauliSum h = parse_hamiltonian_file(config.hamiltonian_path);
    if (!h.hermitian())
      throw std::invalid_argument(
          "gradcheck needs a Hermitian Hamiltonian (the gradient identity "
          "C = -1/2 grad Re E does not hold otherwise)");
    const AnsatzSpec spec(config.ansatz.n_virtual, h.n_qubits(), config.ansatz.n_layers);
    const MpsEvaluator evaluator(spec, h);
    const double fd_h = 1e-5;
    double max_c_err = 0.0, max_diag_err = 0.0, max_a_err = 0.0;
    for (int draw = 0; draw < n_draws; ++draw) {
      const Eigen::VectorXd params =
          random_params(spec, config.ansatz.init_seed + draw);
      const QfiSystem sys = evaluator.assemble(params);
      max_diag_err = std::max(
          max_diag_err, (sys.a.diagonal().array() - 0.25).abs().maxCoeff());

      Eigen::VectorXd probe = params;
      for (int i = 0; i < spec.n_params(); ++i) {
        probe(i) = params(i) + fd_h;
        const double up = evaluator.energy(probe).real();
        probe(i) = params(i) - fd_h;
        const double down = evaluator.energy(probe).real();
        probe(i) = params(i);
        const double grad_fd = (up - down) / (2.0 * fd_h);
        max_c_err = std::max(max_c_err, std::abs(sys.c(i) + 0.5 * grad_fd));
      }

      // metric against central differences of the dense state
      std::vector<Eigen::VectorXcd> dpsi(spec.n_params());
      for (int i = 0; i < spec.n_params(); ++i) {
        probe(i) = params(i) + fd_h;
        const Eigen::VectorXcd up = dense_state(tensors_from_params(spec, probe));
        probe(i) = params(i) - fd_h;
        const Eigen::VectorXcd down = dense_state(tensors_from_params(spec, probe));
        probe(i) = params(i);
        dpsi[i] = (up - down) / (2.0 * fd_h);
      }
      for (int i = 0; i < spec.n_params(); ++i)
        for (int j = i; j < spec.n_params(); ++j)
          max_a_err = std::max(
              max_a_err, std::abs(sys.a(i, j) - dpsi[i].dot(dpsi[j]).real()));
    }
    std::cout << "max |C + 1/2 grad_fd Re E|: " << max_c_err << "\n"
              << "max |diag(A) - 0.25|:       " << max_diag_err << "\n"
              << "max |A - A_fd|:             " << max_a_err << "\n";
    if (max_c_err > 1e-6 || max_a_err > 1e-6 || max_diag_err > 1e-12) {
      std::cerr << "gradcheck FAILED\n";
      return kExitValidationFailure;
    }
    std::cout << "gradcheck passed\n";
    return kExitOk;
  } catch (...) {
    return exit_code_for_current_exception();
  }
}

int cmd_sweep(const std::string& study_config_path, const CliOverrides& overrides) {
  try {
    const json doc = parse_json_file(study_config_path);
    RunConfig base = parse_run_config(doc);
    apply_overrides(base, overrides);
    const auto seeds = field_or<std::vector<uint64_t>>(doc, "seeds", {0, 1, 2, 3, 4});
    if (seeds.empty()) throw ParseError("config field 'seeds' must be non-empty");
    const double threshold = field_or<double>(doc, "threshold", 1.6e-3);
    auto bin_edges = field_or<std::vector<double>>(
        doc, "bin_edges", {0, 50, 100, 150, 200, 300, 400, 500, 1000000});
    auto methods = field_or<std::vector<std::string>>(doc, "methods",
                                                      {base.optimizer.method});

    const PauliSum h = parse_hamiltonian_file(base.hamiltonian_path);
    const AnsatzSpec spec(base.ansatz.n_virtual, h.n_qubits(), base.ansatz.n_layers);
    const auto evaluator = make_evaluator(base, spec, h);
    const SpectrumResult spectrum = exact_diagonalize(h);

    json study_doc = base_summary(base);
    study_doc["reference_energy"] = complex_json(spectrum.ground_energy);
    study_doc["threshold"] = threshold;
    study_doc["arms"] = json::object();

    for (const auto& method : methods) {
      RunConfig arm = base;
      arm.optimizer.method = method;
      auto runner = [&](uint64_t seed) {
        const OptimizationOutcome outcome = optimize_once(arm, spec, h, *evaluator, seed);
        write_file(fs::path(base.output_dir) /
                       (method + "_seed" + std::to_string(seed) + ".csv"),
                   outcome.trace_csv);
        return SeedOutcome{seed, outcome.final_energy, outcome.iterations,
                           outcome.status, false};
      };
      const SeedStudy study = run_seed_study(runner, seeds,
                                             spectrum.ground_energy.real(), threshold,
                                             bin_edges);
      json arm_doc;
      arm_doc["success_count"] = study.success_count;
      arm_doc["n_seeds"] = study.seeds.size();
      arm_doc["bin_edges"] = study.bin_edges;
      arm_doc["histogram"] = study.histogram;
      arm_doc["outcomes"] = json::array();
      for (const auto& o : study.outcomes) {
        json od;
        od["seed"] = o.seed;
        od["final_energy"] = complex_json(o.final_energy);
        od["iterations"] = o.iterations;
        od["status"] = o.status;
        od["success"] = o.success;
        arm_doc["outcomes"].push_back(od);
      }
      study_doc["arms"][method] = arm_doc;
      std::cout << method << ": " << study.success_count << "/" << seeds.size()
                << " seeds within threshold\n";
    }
    write_file(fs::path(base.output_dir) / "study.json", study_doc.dump(2) + "\n");
    return kExitOk;
  } catch (...) {
    return exit_code_for_current_exception();
  }
}

}  // namespace qcmps

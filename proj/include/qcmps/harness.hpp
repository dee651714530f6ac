#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcmps/baselines.hpp"
#include "qcmps/varqite.hpp"

namespace qcmps {

inline constexpr const char* kVersion = "0.1.0";

// Stable CLI exit codes.
enum ExitCode {
  kExitOk = 0,
  kExitError = 1,            // I/O and other failures
  kExitConfigError = 2,      // config or input file does not parse/validate
  kExitNumericalFailure = 3,
  kExitValidationFailure = 4,
  kExitGuardExceeded = 5,
};

struct AnsatzConfig {
  int n_virtual = 1;
  int n_layers = 1;
  uint64_t init_seed = 0;
};

struct OptimizerConfig {
  std::string method = "varqite";  // varqite | bfgs
  VarqiteConfig varqite;
  BfgsConfig bfgs;
};

struct PenaltyConfig {
  std::string s2_path;
  double n_electrons = 0.0;
};

/// Parsed run configuration. n_blocks is always inferred from the
/// Hamiltonian file's n_qubits.
struct RunConfig {
  std::string hamiltonian_path;
  AnsatzConfig ansatz;
  OptimizerConfig optimizer;
  std::optional<PenaltyConfig> penalty;
  std::string evaluator = "mps";  // mps | channel
  std::optional<ShotPlan> shots;
  std::string output_dir = "out";
  bool deterministic = false;
  int threads = 1;
  std::string config_echo;  // original document, embedded in artifacts
};

RunConfig load_run_config(const std::string& path);

struct CliOverrides {
  std::optional<std::string> output_dir;
  std::optional<uint64_t> seed;
  std::optional<bool> deterministic;
  std::optional<int> threads;
};

void apply_overrides(RunConfig& config, const CliOverrides& overrides);

int cmd_run(const RunConfig& config);
int cmd_ed(const std::string& hamiltonian_path, int top_k, bool machine_readable);
int cmd_validate(const RunConfig& config, int n_draws = 5, bool inject_corruption = false);
int cmd_gradcheck(const RunConfig& config, int n_draws = 3);
int cmd_sweep(const std::string& study_config_path, const CliOverrides& overrides);

// Maps the exception types of the core modules onto exit codes.
int exit_code_for_current_exception();

}  // namespace qcmps

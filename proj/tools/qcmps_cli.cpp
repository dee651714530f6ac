#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qcmps/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"QCMPS ground-state toolkit: VarQITE/BFGS optimization of the "
               "quantum-circuit MPS ansatz for Hermitian and transcorrelated "
               "qubit Hamiltonians"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  bool deterministic = false;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", config_path, "run config file (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_option("--seed", [&seed](const std::vector<std::string>& v) {
      seed = std::stoull(v.at(0));
      return true;
    }, "initial-parameter seed override");
    cmd->add_flag("--deterministic", deterministic,
                  "single-threaded, fixed evaluation order, zeroed timings");
    cmd->add_option("--threads", threads, "worker threads for A/C assembly");
  };

  auto overrides = [&]() {
    qcmps::CliOverrides o;
    if (!out_dir.empty()) o.output_dir = out_dir;
    if (seed) o.seed = *seed;
    if (deterministic) o.deterministic = true;
    if (threads > 0) o.threads = threads;
    return o;
  };

  auto* run = app.add_subcommand("run", "optimize a Hamiltonian and write trace + summary");
  add_common(run, true);

  std::string ed_path;
  int ed_top_k = 8;
  bool ed_json = false;
  auto* ed = app.add_subcommand("ed", "exact diagonalization of a Hamiltonian file");
  ed->add_option("hamiltonian", ed_path, "hamiltonian file")->required();
  ed->add_option("--top", ed_top_k, "number of eigenvalues to print");
  ed->add_flag("--json", ed_json, "machine-readable output");

  int validate_draws = 5;
  bool corrupt = false;
  auto* validate =
      app.add_subcommand("validate", "cross-check mps-engine against channel-sim");
  add_common(validate, true);
  validate->add_option("--draws", validate_draws, "random parameter draws");
  validate->add_flag("--corrupt", corrupt,
                     "inject a corrupted tensor (negative control, must fail)");

  int gradcheck_draws = 3;
  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference check of the A matrix and C vector");
  add_common(gradcheck, true);
  gradcheck->add_option("--draws", gradcheck_draws, "random parameter draws");

  auto* sweep = app.add_subcommand("sweep", "multi-seed study with aggregate statistics");
  add_common(sweep, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      qcmps::RunConfig config = qcmps::load_run_config(config_path);
      qcmps::apply_overrides(config, overrides());
      return qcmps::cmd_run(config);
    }
    if (ed->parsed()) return qcmps::cmd_ed(ed_path, ed_top_k, ed_json);
    if (validate->parsed()) {
      qcmps::RunConfig config = qcmps::load_run_config(config_path);
      qcmps::apply_overrides(config, overrides());
      return qcmps::cmd_validate(config, validate_draws, corrupt);
    }
    if (gradcheck->parsed()) {
      qcmps::RunConfig config = qcmps::load_run_config(config_path);
      qcmps::apply_overrides(config, overrides());
      return qcmps::cmd_gradcheck(config, gradcheck_draws);
    }
    if (sweep->parsed()) return qcmps::cmd_sweep(config_path, overrides());
  } catch (...) {
    return qcmps::exit_code_for_current_exception();
  }
  return qcmps::kExitError;
}

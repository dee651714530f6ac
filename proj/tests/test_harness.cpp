#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "qcmps/harness.hpp"

using namespace qcmps;
using qcmps::testing::fixture_path;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qcmps_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string write_config(const TempDir& dir, const std::string& name,
                         const nlohmann::json& doc) {
  const fs::path p = dir.path / name;
  std::ofstream out(p);
  out << doc.dump(2);
  return p.string();
}

nlohmann::json toy_config(const TempDir& dir) {
  nlohmann::json doc;
  doc["hamiltonian"] = fixture_path("toy_z.json");
  doc["ansatz"] = {{"n_virtual", 1}, {"n_layers", 1}, {"init_seed", 7}};
  doc["optimizer"] = {{"method", "varqite"},
                      {"tol", 1e-7},
                      {"max_iters", 500},
                      {"step", {{"mode", "adaptive"}}}};
  doc["output_dir"] = (dir.path / "out").string();
  doc["deterministic"] = true;
  return doc;
}

}  // namespace

TEST_CASE("load_run_config") {
  TempDir dir;
  SUBCASE("valid config parses") {
    const RunConfig config =
        load_run_config(write_config(dir, "c.json", toy_config(dir)));
    CHECK(config.ansatz.n_virtual == 1);
    CHECK(config.ansatz.init_seed == 7);
    CHECK(config.optimizer.method == "varqite");
    CHECK(config.deterministic);
  }
  SUBCASE("n_blocks is rejected (inferred from the Hamiltonian)") {
    auto doc = toy_config(dir);
    doc["ansatz"]["n_blocks"] = 3;
    CHECK_THROWS_AS(load_run_config(write_config(dir, "c.json", doc)), ParseError);
  }
  SUBCASE("unknown optimizer method is rejected") {
    auto doc = toy_config(dir);
    doc["optimizer"]["method"] = "adam";
    CHECK_THROWS_AS(load_run_config(write_config(dir, "c.json", doc)), ParseError);
  }
  SUBCASE("missing file reports a parse error") {
    CHECK_THROWS_AS(load_run_config((dir.path / "nope.json").string()), ParseError);
  }
}

TEST_CASE("cmd_run on the toy Z instance") {
  TempDir dir;
  const RunConfig config =
      load_run_config(write_config(dir, "c.json", toy_config(dir)));
  REQUIRE(cmd_run(config) == kExitOk);

  const auto summary = nlohmann::json::parse(read_file(dir.path / "out" / "summary.json"));
  CHECK(summary.at("tool_version").get<std::string>() == kVersion);
  CHECK(summary.at("abs_error").get<double>() < 1e-6);
  CHECK(summary.at("ed_ground_energy")[0].get<double>() ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(summary.contains("config"));  // provenance echo

  SUBCASE("deterministic reruns are byte-identical") {
    const std::string first = read_file(dir.path / "out" / "trace.csv");
    REQUIRE(cmd_run(config) == kExitOk);
    CHECK(read_file(dir.path / "out" / "trace.csv") == first);
  }
}

TEST_CASE("cmd_run exit codes") {
  TempDir dir;
  SUBCASE("missing hamiltonian file is a config error") {
    auto doc = toy_config(dir);
    doc["hamiltonian"] = (dir.path / "missing.json").string();
    const RunConfig config =
        load_run_config(write_config(dir, "c.json", doc));
    CHECK(cmd_run(config) == kExitConfigError);
  }
  SUBCASE("bfgs on a non-Hermitian Hamiltonian is a config error") {
    nlohmann::json bad;
    bad["n_qubits"] = 1;
    bad["terms"] = nlohmann::json::array(
        {{{"coeff", {0.0, 1.0}}, {"ops", "X0"}}});
    auto doc = toy_config(dir);
    doc["hamiltonian"] = write_config(dir, "bad_h.json", bad);
    doc["optimizer"]["method"] = "bfgs";
    const RunConfig config = load_run_config(write_config(dir, "c.json", doc));
    CHECK(cmd_run(config) == kExitConfigError);
  }
}

TEST_CASE("cmd_ed prints the spectrum") {
  CHECK(cmd_ed(fixture_path("toy_z.json"), 2, true) == kExitOk);
  CHECK(cmd_ed(fixture_path("tfim3.json"), 4, false) == kExitOk);
  CHECK(cmd_ed("no_such_file.json", 2, false) == kExitConfigError);
}

TEST_CASE("cmd_validate cross-checks the evaluators") {
  TempDir dir;
  auto doc = toy_config(dir);
  doc["hamiltonian"] = fixture_path("tfim3.json");
  const RunConfig config = load_run_config(write_config(dir, "c.json", doc));
  CHECK(cmd_validate(config, 2) == kExitOk);
  SUBCASE("corrupted tensors fail validation") {
    CHECK(cmd_validate(config, 1, true) == kExitValidationFailure);
  }
}

TEST_CASE("cmd_gradcheck verifies the McLachlan identities") {
  TempDir dir;
  const RunConfig config =
      load_run_config(write_config(dir, "c.json", toy_config(dir)));
  CHECK(cmd_gradcheck(config, 2) == kExitOk);
}

TEST_CASE("cmd_gradcheck rejects non-Hermitian input") {
  TempDir dir;
  nlohmann::json bad;
  bad["n_qubits"] = 1;
  bad["terms"] =
      nlohmann::json::array({{{"coeff", {0.0, 1.0}}, {"ops", "X0"}}});
  auto doc = toy_config(dir);
  doc["hamiltonian"] = write_config(dir, "bad_h.json", bad);
  const RunConfig config = load_run_config(write_config(dir, "c.json", doc));
  CHECK(cmd_gradcheck(config, 1) == kExitConfigError);
}

TEST_CASE("cmd_sweep emits per-seed traces and an aggregate study") {
  TempDir dir;
  auto doc = toy_config(dir);
  doc["seeds"] = {0, 1, 2, 3, 4};
  doc["threshold"] = 1.6e-3;
  doc["bin_edges"] = {0, 25, 50, 500, 1000000};
  doc["methods"] = {"varqite", "bfgs"};
  doc["optimizer"]["max_iters"] = 200;
  const std::string path = write_config(dir, "study.json", doc);
  REQUIRE(cmd_sweep(path, CliOverrides{}) == kExitOk);

  for (const std::string method : {"varqite", "bfgs"})
    for (int seed = 0; seed < 5; ++seed)
      CHECK(fs::exists(dir.path / "out" /
                       (method + "_seed" + std::to_string(seed) + ".csv")));
  const auto study = nlohmann::json::parse(read_file(dir.path / "out" / "study.json"));
  REQUIRE(study.at("arms").contains("varqite"));
  REQUIRE(study.at("arms").contains("bfgs"));
  for (const auto& [name, arm] : study.at("arms").items()) {
    CHECK(arm.at("outcomes").size() == 5);
    int total = 0;
    for (const int c : arm.at("histogram").get<std::vector<int>>()) total += c;
    CHECK(total <= 5);
  }
  // the toy instance should be easy for varqite
  CHECK(study.at("arms").at("varqite").at("success_count").get<int>() >= 4);
}

TEST_CASE("exit_code_for_current_exception maps the error taxonomy") {
  auto code_for = [](auto&& make) -> int {
    try {
      make();
    } catch (...) {
      return exit_code_for_current_exception();
    }
    return kExitOk;
  };
  CHECK(code_for([] { throw GuardExceeded("g"); }) == kExitGuardExceeded);
  CHECK(code_for([] { throw ParseError("p"); }) == kExitConfigError);
  CHECK(code_for([] { throw NumericalFailure("n"); }) == kExitNumericalFailure);
  CHECK(code_for([] { throw std::invalid_argument("i"); }) == kExitConfigError);
  CHECK(code_for([] { throw std::runtime_error("r"); }) == kExitError);
}

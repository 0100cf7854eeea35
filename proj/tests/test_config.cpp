#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "taillab/cli.hpp"
#include "taillab/config.hpp"

using namespace taillab;

namespace {

const char* kSample = R"(# demo experiment
[potential]
family = pure
m = 3
v_plus = 1.0
v_minus = 1.0

[initial_data]
kind = random
which = psi1
seed = 7

[pipeline]
stages = simulate, decay

[numeric]
sim_L = 60
sim_h = 0.1
sim_T = 30
recorders = 0
fit_window_lo = 8
fit_window_hi = 28

[output]
dir = /tmp/taillab_test_run
)";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing round trip") {
  const ExperimentConfig cfg = ExperimentConfig::from_map(ConfigMap::parse_string(kSample),
                                                          kSample);
  CHECK(cfg.potential.m == 3);
  CHECK(cfg.potential.family == PotentialFamily::PureInversePower);
  CHECK(cfg.initial.kind == "random");
  CHECK(cfg.initial.seed == 7);
  CHECK(cfg.pipeline.size() == 2);
  CHECK(cfg.numeric.sim_T == 30.0);
  CHECK(cfg.numeric.recorders.size() == 1);
  CHECK(cfg.output_dir.string() == "/tmp/taillab_test_run");
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(ConfigMap::parse_string("[potential]\nbogus_key = 1\n"), ValidationError);
  CHECK_THROWS_AS(ConfigMap::parse_string("[weird_section]\nm = 3\n"), ValidationError);
  CHECK_THROWS_AS(ConfigMap::parse_string("m = 3\n"), ValidationError);  // key before section
  CHECK_THROWS_AS(ConfigMap::parse_string("[potential\nm = 3\n"), ValidationError);

  // empty pipeline is a validation error
  const std::string no_stage = "[potential]\nm = 3\n[pipeline]\nstages =\n";
  CHECK_THROWS_AS(ExperimentConfig::from_map(ConfigMap::parse_string(no_stage), no_stage),
                  ValidationError);
  const std::string bad_stage = "[pipeline]\nstages = fly\n";
  CHECK_THROWS_AS(ExperimentConfig::from_map(ConfigMap::parse_string(bad_stage), bad_stage),
                  ValidationError);
}

TEST_CASE("initial data factory") {
  InitialDataSpec s;
  s.kind = "gaussian";
  s.which = "psi0";
  const InitialData d = s.build();
  CHECK(d.psi0(0.0) > 0.9);
  CHECK(d.psi1(0.0) == 0.0);
  CHECK(d.support_radius > 0.0);

  // deterministic per seed
  InitialDataSpec r;
  r.kind = "random";
  r.seed = 42;
  const InitialData a = r.build(), b = r.build();
  for (double x : {-2.0, 0.3, 1.7}) CHECK(a.psi1(x) == b.psi1(x));
  r.seed = 43;
  const InitialData c = r.build();
  bool differs = false;
  for (double x : {-2.0, 0.3, 1.7}) differs = differs || (a.psi1(x) != c.psi1(x));
  CHECK(differs);

  s.which = "neither";
  CHECK_THROWS_AS(s.build(), ValidationError);
}

TEST_CASE("experiment run is deterministic and writes the documented artifacts") {
  const ExperimentConfig base = ExperimentConfig::from_map(ConfigMap::parse_string(kSample),
                                                           kSample);
  namespace fs = std::filesystem;
  ExperimentConfig one = base, two = base;
  one.output_dir = "/tmp/taillab_test_run/a";
  two.output_dir = "/tmp/taillab_test_run/b";
  fs::remove_all("/tmp/taillab_test_run");
  std::ostringstream log;
  cli::run_experiment(one, log);
  cli::run_experiment(two, log);

  for (const char* name : {"wave_x0.csv", "decay_report.csv"}) {
    const std::string a = slurp(one.output_dir / name);
    const std::string b = slurp(two.output_dir / name);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a.substr(0, 10) == "# schema=1");
  }
  CHECK(fs::exists(one.output_dir / "manifest.txt"));
  CHECK(fs::exists(one.output_dir / "summary.txt"));
  CHECK(slurp(one.output_dir / "manifest.txt").find("taillab.version") != std::string::npos);
}

TEST_CASE("spectral gate aborts decay pipelines with exit code 3 semantics") {
  ExperimentConfig cfg = ExperimentConfig::from_map(ConfigMap::parse_string(kSample), kSample);
  cfg.output_dir = "/tmp/taillab_test_run/gate";
  cfg.potential.bump_amplitude = -10.0;
  cfg.numeric.sim_T = 10.0;
  cfg.numeric.sim_L = 30.0;
  std::ostringstream log;
  int code = 0;
  try {
    cli::run_experiment(cfg, log);
  } catch (...) {
    code = cli::exit_code_for_current_exception();
  }
  CHECK(code == cli::kExitSpectral);

  try {
    throw ValidationError("x");
  } catch (...) {
    CHECK(cli::exit_code_for_current_exception() == cli::kExitValidation);
  }
  try {
    throw NumericError("x");
  } catch (...) {
    CHECK(cli::exit_code_for_current_exception() == cli::kExitNumeric);
  }
}

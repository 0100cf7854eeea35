#include <iostream>

#include <CLI11.hpp>

#include "taillab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"taillab: frequency- and time-domain analysis of wave-equation tails for "
               "inverse-power potentials"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute the pipeline stages from a config file");
  run->add_option("config", config_path, "experiment config file")->required();

  auto* spectral = app.add_subcommand("spectral", "spectral admissibility check only");
  spectral->add_option("config", config_path, "experiment config file")->required();

  auto* decay = app.add_subcommand("decay", "simulation and decay fit only");
  decay->add_option("config", config_path, "experiment config file")->required();

  app.add_subcommand("selfcheck", "run the fast closed-form anchor checks");

  CLI11_PARSE(app, argc, argv);

  using namespace taillab;
  try {
    if (app.got_subcommand("selfcheck"))
      return cli::selfcheck(std::cout) == 0 ? cli::kExitOk : cli::kExitNumeric;
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (app.got_subcommand("run"))
      cli::run_experiment(cfg, std::cout);
    else if (app.got_subcommand("spectral"))
      cli::run_spectral(cfg, std::cout);
    else if (app.got_subcommand("decay"))
      cli::run_decay(cfg, std::cout);
    return cli::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code_for_current_exception();
  }
}

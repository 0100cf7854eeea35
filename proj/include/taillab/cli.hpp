#pragma once

#include <iosfwd>

#include "taillab/config.hpp"

namespace taillab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSpectral = 3;
inline constexpr int kExitNumeric = 4;

// Executes the requested pipeline stages in dependency order and writes the
// run manifest, CSV artifacts, and a human-readable summary into
// config.output_dir. Throws SpectralError when a decay-type stage is
// requested for an inadmissible potential.
void run_experiment(const ExperimentConfig& config, std::ostream& log);

// Spectral classification only (exit status communicated by the caller).
void run_spectral(const ExperimentConfig& config, std::ostream& log);

// Simulation + decay fit only.
void run_decay(const ExperimentConfig& config, std::ostream& log);

// Fast self-test of the closed-form anchor cases; returns the number of
// failed checks and prints one line per check.
int selfcheck(std::ostream& log);

// Maps an exception to the documented process exit code.
int exit_code_for_current_exception();

}  // namespace taillab::cli

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "taillab/initial_data.hpp"
#include "taillab/potential.hpp"

namespace taillab {

// INI-style flat key-value text:
//   # comment lines and blank lines are ignored
//   [section]
//   key = value          (values: numbers, words, or comma-separated lists)
// Unknown keys are rejected to catch typos early.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::filesystem::path& path);
  static ConfigMap parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback) const;
  std::vector<std::string> words(const std::string& section, const std::string& key) const;

  // every (section, key) actually present, for validation and the manifest
  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return data_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

struct InitialDataSpec {
  std::string kind = "gaussian";  // gaussian | bump | random
  std::string which = "psi1";     // psi1 (sine evolution) | psi0 (cosine evolution)
  double center = 0.0;
  double width = 1.5;
  double amplitude = 1.0;
  std::uint64_t seed = 1;
  int components = 3;
  double radius = 8.0;  // random-bump placement radius

  InitialData build() const;
};

struct NumericParams {
  double sim_L = 600.0;
  double sim_h = 0.05;
  double sim_courant = 0.9;
  double sim_T = 400.0;
  std::vector<double> recorders{0.0, 5.0, 20.0};
  double fit_window_lo = 0.0;  // 0: T/8
  double fit_window_hi = 0.0;  // 0: T/2
  double series_x = 100.0;
  double series_eps_lo = 1e-4;
  double series_eps_hi = 3e-3;
  int series_eps_count = 16;
  std::vector<double> ilt_times{5.0, 10.0, 20.0};
  double ilt_grid_h = 0.01;
  double spectral_eps_max = 0.0;  // 0: auto from well depth
  double resonance_threshold = 1e-6;
};

struct ExperimentConfig {
  PotentialSpec potential;
  InitialDataSpec initial;
  std::vector<std::string> pipeline;  // subset of {spectral, series, ilt, simulate, decay}
  NumericParams numeric;
  std::filesystem::path output_dir = "taillab_out";
  std::string source_text;  // resolved config echoed into the run manifest

  static ExperimentConfig load(const std::filesystem::path& path);
  static ExperimentConfig from_map(const ConfigMap& map, const std::string& source_text);
};

}  // namespace taillab

#include "taillab/config.hpp"

#include <fstream>
#include <sstream>

namespace taillab {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"potential",
     {"family", "m", "v_plus", "v_minus", "x_plus", "x_minus", "sum_terms",
      "correction_exponent", "correction_coeff", "bump_amplitude", "bump_center",
      "bump_halfwidth"}},
    {"initial_data",
     {"kind", "which", "center", "width", "amplitude", "seed", "components", "radius"}},
    {"pipeline", {"stages"}},
    {"numeric",
     {"sim_L", "sim_h", "sim_courant", "sim_T", "recorders", "fit_window_lo", "fit_window_hi",
      "series_x", "series_eps_lo", "series_eps_hi", "series_eps_count", "ilt_times",
      "ilt_grid_h", "spectral_eps_max", "resonance_threshold"}},
    {"output", {"dir"}},
};

}  // namespace

ConfigMap ConfigMap::parse_string(const std::string& text) {
  ConfigMap map;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("config line " + std::to_string(lineno) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      map.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": expected 'key = value' inside a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end())
      throw ValidationError("config: unknown section [" + section + "]");
    if (!known->second.count(key))
      throw ValidationError("config: unknown key '" + key + "' in section [" + section + "]");
    map.data_[section][key] = value;
  }
  return map;
}

ConfigMap ConfigMap::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool ConfigMap::has(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string ConfigMap::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  const auto s = data_.find(section);
  if (s == data_.end()) return fallback;
  const auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

double ConfigMap::number(const std::string& section, const std::string& key,
                         double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size())
    throw ValidationError("config: key '" + key + "' is not a number: " + v);
  return x;
}

std::vector<double> ConfigMap::numbers(const std::string& section, const std::string& key,
                                       const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  for (const std::string& w : split(get(section, key, ""), ','))
    out.push_back(std::stod(w));
  return out;
}

std::vector<std::string> ConfigMap::words(const std::string& section,
                                          const std::string& key) const {
  return split(get(section, key, ""), ',');
}

InitialData InitialDataSpec::build() const {
  InitialData data;
  std::function<double(double)> profile;
  double support = 0.0;
  if (kind == "gaussian" || kind == "bump") {
    profile = gaussian(center, width, amplitude);
    support = gaussian_support_radius(center, width);
  } else if (kind == "random") {
    profile = random_bump(seed, radius, components);
    support = 0.5 * radius + kCutSigmas * 1.6;
  } else {
    throw ValidationError("initial_data: unknown kind '" + kind + "'");
  }
  if (which == "psi1") {
    data.psi1 = profile;
  } else if (which == "psi0") {
    data.psi0 = profile;
  } else {
    throw ValidationError("initial_data: 'which' must be psi0 or psi1");
  }
  data.support_radius = support;
  return data;
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& map, const std::string& source) {
  ExperimentConfig cfg;
  cfg.source_text = source;

  const std::string family = map.get("potential", "family", "pure");
  if (family == "pure") {
    cfg.potential.family = PotentialFamily::PureInversePower;
  } else if (family == "sum") {
    cfg.potential.family = PotentialFamily::InversePowerSum;
  } else if (family == "correction") {
    cfg.potential.family = PotentialFamily::PowerPlusCorrection;
  } else {
    throw ValidationError("potential: unknown family '" + family + "'");
  }
  cfg.potential.m = static_cast<int>(map.number("potential", "m", 3));
  cfg.potential.v_plus = map.number("potential", "v_plus", 1.0);
  cfg.potential.v_minus = map.number("potential", "v_minus", 1.0);
  cfg.potential.x_plus = map.number("potential", "x_plus", 1.0);
  cfg.potential.x_minus = map.number("potential", "x_minus", -1.0);
  cfg.potential.correction_delta = map.number("potential", "correction_exponent", 4.0);
  cfg.potential.correction_coeff = map.number("potential", "correction_coeff", 0.0);
  cfg.potential.bump_amplitude = map.number("potential", "bump_amplitude", 0.0);
  cfg.potential.bump_center = map.number("potential", "bump_center", 0.0);
  cfg.potential.bump_halfwidth = map.number("potential", "bump_halfwidth", 1.0);
  if (map.has("potential", "sum_terms")) {
    for (const std::string& w : map.words("potential", "sum_terms")) {
      const auto colon = w.find(':');
      if (colon == std::string::npos)
        throw ValidationError("potential: sum_terms entries take the form alpha:coefficient");
      cfg.potential.sum_terms.push_back(
          {std::stod(w.substr(0, colon)), std::stod(w.substr(colon + 1))});
    }
  }
  cfg.potential.validate();

  cfg.initial.kind = map.get("initial_data", "kind", "gaussian");
  cfg.initial.which = map.get("initial_data", "which", "psi1");
  cfg.initial.center = map.number("initial_data", "center", 0.0);
  cfg.initial.width = map.number("initial_data", "width", 1.5);
  cfg.initial.amplitude = map.number("initial_data", "amplitude", 1.0);
  cfg.initial.seed = static_cast<std::uint64_t>(map.number("initial_data", "seed", 1));
  cfg.initial.components = static_cast<int>(map.number("initial_data", "components", 3));
  cfg.initial.radius = map.number("initial_data", "radius", 8.0);
  cfg.initial.build();  // validates kind/which

  cfg.pipeline = map.words("pipeline", "stages");
  if (cfg.pipeline.empty())
    throw ValidationError("pipeline: 'stages' must list at least one stage");
  const std::set<std::string> known{"spectral", "series", "ilt", "simulate", "decay"};
  for (const auto& s : cfg.pipeline)
    if (!known.count(s)) throw ValidationError("pipeline: unknown stage '" + s + "'");

  NumericParams& n = cfg.numeric;
  n.sim_L = map.number("numeric", "sim_L", n.sim_L);
  n.sim_h = map.number("numeric", "sim_h", n.sim_h);
  n.sim_courant = map.number("numeric", "sim_courant", n.sim_courant);
  n.sim_T = map.number("numeric", "sim_T", n.sim_T);
  n.recorders = map.numbers("numeric", "recorders", n.recorders);
  n.fit_window_lo = map.number("numeric", "fit_window_lo", 0.0);
  n.fit_window_hi = map.number("numeric", "fit_window_hi", 0.0);
  n.series_x = map.number("numeric", "series_x", n.series_x);
  n.series_eps_lo = map.number("numeric", "series_eps_lo", n.series_eps_lo);
  n.series_eps_hi = map.number("numeric", "series_eps_hi", n.series_eps_hi);
  n.series_eps_count = static_cast<int>(map.number("numeric", "series_eps_count", 16));
  n.ilt_times = map.numbers("numeric", "ilt_times", n.ilt_times);
  n.ilt_grid_h = map.number("numeric", "ilt_grid_h", n.ilt_grid_h);
  n.spectral_eps_max = map.number("numeric", "spectral_eps_max", 0.0);
  n.resonance_threshold = map.number("numeric", "resonance_threshold", 1e-6);

  cfg.output_dir = map.get("output", "dir", "taillab_out");
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  return from_map(ConfigMap::parse_string(text), text);
}

}  // namespace taillab

#include "taillab/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include "taillab/csv.hpp"
#include "taillab/grid.hpp"
#include "taillab/ilt.hpp"
#include "taillab/jost.hpp"
#include "taillab/quadrature.hpp"
#include "taillab/resolvent.hpp"
#include "taillab/series.hpp"
#include "taillab/timedomain.hpp"

namespace taillab::cli {
namespace {

namespace fs = std::filesystem;

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return out;
}

struct Manifest {
  std::ofstream out;
  explicit Manifest(const fs::path& p) : out(p) {
    if (!out) throw ValidationError("cannot open manifest " + p.string());
  }
  void kv(const std::string& k, const std::string& v) { out << k << "=" << v << "\n"; }
  void kv(const std::string& k, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out << k << "=" << buf << "\n";
  }
};

bool stage_requested(const ExperimentConfig& cfg, const std::string& stage) {
  for (const auto& s : cfg.pipeline)
    if (s == stage) return true;
  return false;
}

void write_jost_profile(const fs::path& dir, const PotentialSpec& spec) {
  const LinePair pair = jost_pair_on_grid(spec, Frequency(1.0), spec.x_minus - 4.0,
                                          spec.x_plus + 4.0, 0.01);
  ArrayXcd q(pair.plus.grid.size());
  for (Eigen::Index i = 0; i < pair.plus.grid.size(); ++i)
    q[i] = evaluate(spec, pair.plus.grid[i]) + pair.plus.eps * pair.plus.eps;
  CsvWriter csv(dir / "jost_profile.csv", {"x", "re_y", "im_y", "re_s", "im_s", "residual"});
  const ArrayXcd zero = ArrayXcd::Zero(pair.plus.grid.size());
  for (Eigen::Index i = 0; i < pair.plus.grid.size(); ++i) {
    double res = 0.0;
    if (stencil_usable(pair.plus.grid, i, 1)) {
      const Complex d2 = stencil_second_derivative<Complex>(pair.plus.grid, pair.plus.y, i, 1);
      res = std::abs(d2 - q[i] * pair.plus.y[i]);
    }
    csv.row({pair.plus.grid[i], pair.plus.y[i].real(), pair.plus.y[i].imag(),
             pair.plus.s[i].real(), pair.plus.s[i].imag(), res});
  }
}

SpectralCheck spectral_stage(const ExperimentConfig& cfg, Manifest& man, std::ostream& log) {
  SpectralOptions opt;
  opt.eps_max = cfg.numeric.spectral_eps_max;
  opt.resonance_threshold = cfg.numeric.resonance_threshold;
  const SpectralCheck check = check_spectral_assumptions(cfg.potential, opt);
  log << "[spectral] " << check.describe() << "\n";
  man.kv("spectral.result", check.ok() ? "ok"
                                       : (check.result == SpectralCheck::Result::BoundState
                                              ? "bound_state"
                                              : "resonance"));
  man.kv("spectral.w_at_zero", check.w_at_zero);
  man.kv("spectral.eps_max", check.eps_max);
  for (std::size_t i = 0; i < check.bound_state_eps.size(); ++i)
    man.kv("spectral.bound_state_eps_" + std::to_string(i), check.bound_state_eps[i]);
  return check;
}

GridFunction sampled(const ArrayXd& grid, const std::function<double(double)>& f) {
  return GridFunction::sample(grid, f);
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.potential.validate();
  fs::create_directories(cfg.output_dir);
  Manifest man(cfg.output_dir / "manifest.txt");
  man.kv("taillab.version", kVersion);
  man.kv("config.source", "\n--- begin config ---\n" + cfg.source_text + "--- end config ---");

  std::ofstream summary(cfg.output_dir / "summary.txt");
  summary << "taillab " << kVersion << " run summary\n";

  const bool needs_admissible = stage_requested(cfg, "ilt") || stage_requested(cfg, "decay") ||
                                stage_requested(cfg, "simulate");

  // spectral gate first, in dependency order
  SpectralCheck check{};
  if (stage_requested(cfg, "spectral") || needs_admissible) {
    check = spectral_stage(cfg, man, log);
    summary << "spectral: " << check.describe() << "\n";
    write_jost_profile(cfg.output_dir, cfg.potential);
    if (!check.ok() && needs_admissible)
      throw SpectralError(
          "the potential fails the admissibility requirement (no bound states and no "
          "zero-energy resonance): " +
          check.describe());
  }

  const InitialData data = cfg.initial.build();
  const int m = cfg.potential.m;
  const bool sine_evolution = cfg.initial.which == "psi1";
  const int expected_exponent = sine_evolution ? m : m + 1;

  if (stage_requested(cfg, "series")) {
    const auto eps_grid =
        log_spaced(cfg.numeric.series_eps_lo, cfg.numeric.series_eps_hi,
                   cfg.numeric.series_eps_count);
    const auto h = series::extract_h_coefficients(cfg.potential, cfg.numeric.series_x, eps_grid);
    log << "[series] h1(" << cfg.numeric.series_x << ") = " << h.h1 << ", h2 = " << h.h2
        << ", fit residual " << h.fit_residual << "\n";
    man.kv("series.h1", h.h1);
    man.kv("series.h2", h.h2);
    man.kv("series.h3", h.h3);
    man.kv("series.fit_residual", h.fit_residual);
    summary << "series: h1(" << cfg.numeric.series_x << ") = " << h.h1 << "\n";
    CsvWriter fit_csv(cfg.output_dir / "series_fit.csv",
                      {"x", "h1", "h2", "h3", "fit_residual", "condition"});
    fit_csv.row({cfg.numeric.series_x, h.h1, h.h2, h.h3, h.fit_residual, h.condition});

    CsvWriter fj_csv(cfg.output_dir / "fj_samples.csv", {"j", "tau", "re_f", "im_f"});
    const auto ray = series::build_ray(m, cfg.potential.v_plus, 0.0, 50.0, 5, 5e-3, 1.01);
    for (std::size_t k = 0; k < ray.fj.size(); ++k)
      for (Eigen::Index i = 0; i < ray.rho.size(); i += 64)
        fj_csv.row({double(ray.j_of(static_cast<int>(k))), ray.rho[i], ray.fj[k][i].real(),
                    ray.fj[k][i].imag()});
  }

  // shared grid for frequency-domain stages
  const double x0 = cfg.numeric.recorders.empty() ? 0.0 : cfg.numeric.recorders.front();
  if (stage_requested(cfg, "ilt")) {
    const double span = std::max({data.support_radius + 2.0, cfg.potential.x_plus + 2.0,
                                  std::abs(x0) + 2.0});
    const ArrayXd grid = line_grid(cfg.potential, -span, span, cfg.numeric.ilt_grid_h);
    const GridFunction psi0 = sampled(grid, data.psi0);
    const GridFunction psi1 = sampled(grid, data.psi1);

    // tail prediction from the fitted singular coefficient
    double r3 = 0.0;
    if (sine_evolution) {
      const auto fit = fit_singular_coefficient(cfg.potential, psi1, x0,
                                                log_spaced(1e-2, 1e-1, 10), m + 2);
      r3 = fit.coefficient;
      man.kv("ilt.r3", r3);
      log << "[ilt] fitted singular coefficient r3(" << x0 << ") = " << r3 << "\n";
    }
    ArrayXd times(static_cast<Eigen::Index>(cfg.numeric.ilt_times.size()));
    for (Eigen::Index i = 0; i < times.size(); ++i) times[i] = cfg.numeric.ilt_times[i];
    ilt::ReconstructionOptions ropt;
    const auto rec = ilt::reconstruct_time_solution(cfg.potential, psi0, psi1, x0, times, ropt);
    CsvWriter csv(cfg.output_dir / "ilt_series.csv", {"t", "psi", "predicted_tail", "ratio"});
    for (Eigen::Index i = 0; i < times.size(); ++i) {
      const double predicted =
          std::tgamma(double(m)) * std::abs(r3) * std::pow(times[i], -double(m));
      csv.row({times[i], rec.psi[i], predicted,
               predicted != 0.0 ? std::abs(rec.psi[i]) / predicted : 0.0});
    }
    man.kv("ilt.imag_max", rec.imag_max);
    summary << "ilt: reconstructed " << times.size() << " time samples at x0 = " << x0 << "\n";
  }

  timedomain::TimeSeries series_out;
  if (stage_requested(cfg, "simulate") || stage_requested(cfg, "decay")) {
    timedomain::SimulationConfig sim;
    sim.half_width = cfg.numeric.sim_L;
    sim.h = cfg.numeric.sim_h;
    sim.courant = cfg.numeric.sim_courant;
    sim.final_time = cfg.numeric.sim_T;
    sim.recorders = cfg.numeric.recorders;
    sim.support_radius = data.support_radius;
    series_out = timedomain::leapfrog_solve(cfg.potential, data.psi0, data.psi1, sim);
    man.kv("simulate.energy_drift", series_out.energy_drift);
    log << "[simulate] " << series_out.t.size() << " steps, energy drift "
        << series_out.energy_drift << "\n";
    for (std::size_t r = 0; r < series_out.recorders.size(); ++r) {
      char name[64];
      std::snprintf(name, sizeof name, "wave_x%g.csv", series_out.recorders[r]);
      CsvWriter csv(cfg.output_dir / name, {"t", "psi"});
      // thin the series to keep artifacts modest
      const Eigen::Index stride = std::max<Eigen::Index>(1, series_out.t.size() / 20000);
      for (Eigen::Index i = 0; i < series_out.t.size(); i += stride)
        csv.row({series_out.t[i], series_out.psi[r][i]});
    }
  }

  if (stage_requested(cfg, "decay")) {
    const double lo =
        cfg.numeric.fit_window_lo > 0 ? cfg.numeric.fit_window_lo : cfg.numeric.sim_T / 8.0;
    const double hi =
        cfg.numeric.fit_window_hi > 0 ? cfg.numeric.fit_window_hi : cfg.numeric.sim_T / 2.0;
    CsvWriter csv(cfg.output_dir / "decay_report.csv",
                  {"x0", "exponent", "stderr", "window_lo", "window_hi", "amplitude",
                   "fit_residual"});
    std::ofstream block(cfg.output_dir / "decay_report.txt");
    for (std::size_t r = 0; r < series_out.recorders.size(); ++r) {
      const auto rep = timedomain::decay_fit(series_out.t, series_out.psi[r], lo, hi,
                                             series_out.recorders[r]);
      csv.row({rep.x0, rep.exponent, rep.exponent_stderr, rep.window_lo, rep.window_hi,
               rep.amplitude, rep.fit_residual});
      block << "x0=" << rep.x0 << "\n"
            << "exponent=" << rep.exponent << "\n"
            << "exponent_stderr=" << rep.exponent_stderr << "\n"
            << "window=[" << rep.window_lo << "," << rep.window_hi << "]\n"
            << "amplitude=" << rep.amplitude << "\n"
            << "fit_residual=" << rep.fit_residual << "\n\n";
      if (r == 0) {
        man.kv("decay.exponent", rep.exponent);
        man.kv("decay.amplitude", rep.amplitude);
        const bool consistent = std::abs(rep.exponent - expected_exponent) < 0.5;
        summary << "decay: exponent ~ " << expected_exponent << " expected, fitted "
                << rep.exponent << " +/- " << rep.exponent_stderr << " at x0 = " << rep.x0
                << (consistent ? " (consistent)" : " (NOT consistent)") << "\n";
        log << "[decay] exponent ~ " << rep.exponent << " (expected " << expected_exponent
            << ")\n";
      }
    }
  }
  log << "artifacts written to " << cfg.output_dir.string() << "\n";
}

void run_spectral(const ExperimentConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.output_dir);
  Manifest man(cfg.output_dir / "manifest.txt");
  man.kv("taillab.version", kVersion);
  const SpectralCheck check = spectral_stage(cfg, man, log);
  if (!check.ok())
    throw SpectralError("the potential fails the admissibility requirement: " + check.describe());
}

void run_decay(const ExperimentConfig& cfg, std::ostream& log) {
  ExperimentConfig reduced = cfg;
  reduced.pipeline = {"spectral", "simulate", "decay"};
  run_experiment(reduced, log);
}

int selfcheck(std::ostream& log) {
  int failures = 0;
  auto check = [&](const char* name, bool ok, double got, double want) {
    log << (ok ? "[ok]   " : "[FAIL] ") << name << " (got " << got << ", reference " << want
        << ")\n";
    if (!ok) ++failures;
  };

  // exact inverse-power tail
  const PotentialSpec p3 = PotentialSpec::pure(3, 1.0, 1.0);
  check("potential tail value", std::abs(evaluate(p3, 10.0) - 1e-3) < 1e-15,
        evaluate(p3, 10.0), 1e-3);

  // free space: s vanishes after one Picard sweep and W = 2 eps
  PotentialSpec free_spec = PotentialSpec::pure(3, 0.0, 0.0);
  const LinePair pair = jost_pair_on_grid(free_spec, Frequency(0.7), -5.0, 5.0, 0.01);
  check("free-space s", pair.plus.s.abs().maxCoeff() < 1e-14, pair.plus.s.abs().maxCoeff(), 0.0);
  check("free-space Wronskian", std::abs(pair.w - Complex(1.4, 0.0)) < 1e-10, pair.w.real(),
        1.4);

  // elementary transform pairs
  const Complex ilt1 = ilt::bromwich([](Complex e) { return 1.0 / (e + 1.0); }, 2.0,
                                     ilt::VerticalLine{0.1, 32.0, 256});
  check("ilt exp pair", std::abs(ilt1.real() - std::exp(-2.0)) < 1e-6, ilt1.real(),
        std::exp(-2.0));
  const Complex ilt2 = ilt::bromwich([](Complex e) { return 1.0 / (e * e); }, 3.0,
                                     ilt::VerticalLine{1.0 / 3.0, 32.0, 256});
  check("ilt ramp pair", std::abs(ilt2.real() - 3.0) < 1e-6, ilt2.real(), 3.0);

  // dual-space seed F_{m-1} = v1 tau^{m-1}/(m-1)!
  const auto ray = series::build_ray(3, 1.0, 0.0, 5.0, 0, 1e-2);
  double seed_err = 0.0;
  for (Eigen::Index i = 0; i < ray.rho.size(); ++i)
    seed_err = std::max(seed_err,
                        std::abs(ray.fj[0][i] - Complex(0.5 * ray.rho[i] * ray.rho[i], 0.0)));
  check("series seed", seed_err < 1e-14, seed_err, 0.0);

  // elementary Laplace tail integral, n = 0, l = 0
  const double nm = series::nm0_integral(0, 0, 0.5);
  check("nm0 elementary", std::abs(nm - std::exp(-1.5) / 0.5) < 1e-9, nm,
        std::exp(-1.5) / 0.5);

  // free evolution reaches d'Alembert values
  timedomain::SimulationConfig sim;
  sim.half_width = 15.0;
  sim.h = 0.01;
  sim.final_time = 2.0;
  sim.support_radius = 12.0;
  sim.recorders = {0.0};
  const auto ts = timedomain::leapfrog_solve(free_spec, gaussian(0.0, 1.0, 1.0),
                                             [](double) { return 0.0; }, sim);
  const double t_final = ts.t[ts.t.size() - 1];
  const double expected = std::exp(-t_final * t_final);
  const double got = ts.psi[0][ts.t.size() - 1];
  check("free leapfrog d'Alembert", std::abs(got - expected) < 1e-4, got, expected);

  log << (failures == 0 ? "selfcheck passed\n" : "selfcheck FAILED\n");
  return failures;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ValidationError&) {
    return kExitValidation;
  } catch (const SpectralError&) {
    return kExitSpectral;
  } catch (const NumericError&) {
    return kExitNumeric;
  } catch (const std::exception&) {
    return kExitNumeric;
  }
}

}  // namespace taillab::cli

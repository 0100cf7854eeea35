#pragma once

#include <functional>
#include <vector>

#include "taillab/potential.hpp"

namespace taillab::timedomain {

// Light-cone-safe setup: the domain is wide enough that boundary effects
// cannot reach any recorder within the simulated time, so plain Dirichlet
// ends are exactly inert.
struct SimulationConfig {
  double half_width = 600.0;  // domain [-L, L]
  double h = 0.05;
  double courant = 0.9;       // k = courant * h, must stay < 1
  double final_time = 400.0;
  std::vector<double> recorders{0.0};
  double support_radius = 10.0;  // of the initial data
  int energy_stride = 200;       // steps between energy samples

  void validate() const;
};

struct TimeSeries {
  ArrayXd t;
  std::vector<ArrayXd> psi;      // one series per recorder
  std::vector<double> recorders; // snapped to grid nodes
  ArrayXd energy_t;
  ArrayXd energy;
  double energy_drift = 0.0;     // max relative deviation from the initial energy
};

// Second-order centered scheme for psi_tt = psi_xx - V psi.
TimeSeries leapfrog_solve(const PotentialSpec& spec, const std::function<double(double)>& psi0,
                          const std::function<double(double)>& psi1,
                          const SimulationConfig& config);

// Low-level stepper (also used by the time-reversal property): advances
// (prev, cur) by n steps in place and returns nothing.
void leapfrog_steps(const ArrayXd& V, ArrayXd& prev, ArrayXd& cur, int n, double h, double k);

struct DuhamelOptions {
  double hx = 0.05;
  double tolerance = 1e-10;
  int max_iterations = 200;
  double nu = 0.0;      // 0: 2.2 * sqrt(2 ||V||_inf), comfortably contractive
  double margin = 2.0;  // extra domain beyond support + T
  double support_radius = 10.0;
};

struct DuhamelResult {
  ArrayXd x;  // grid
  ArrayXd t;  // times (same spacing as x)
  Eigen::MatrixXd u;              // u(i, n) = psi(x_i, t_n)
  std::vector<double> increments; // nu-weighted L1 increments per iteration
  double contraction_bound;       // 2 ||V||_inf / nu^2
  double nu;

  double at(double x0, double t0) const;
};

// Fixed-point iteration of the Duhamel form of the wave equation; the
// characteristic-cone kernel is evaluated on a grid with dt = dx so the cone
// boundaries land on nodes. Converges when nu exceeds sqrt(2 ||V||_inf).
DuhamelResult duhamel_solve(const PotentialSpec& spec, const std::function<double(double)>& psi0,
                            const std::function<double(double)>& psi1, double final_time,
                            const DuhamelOptions& opt = {});

struct DecayReport {
  double x0;
  double exponent;       // fitted decay power of |psi| ~ t^{-exponent}
  double exponent_stderr;
  double window_lo, window_hi;
  double amplitude;      // mean of t^{round(exponent)} psi over the window
  double fit_residual;
  ArrayXd p_t;           // local log-derivative curve -d ln|psi| / d ln t
  ArrayXd p_t_times;
};

// Log-log least squares on a (t, psi) series restricted to the window.
// Sign changes inside the window are reported as an error (shrink it).
DecayReport decay_fit(const ArrayXd& t, const ArrayXd& psi, double window_lo, double window_hi,
                      double x0 = 0.0);

}  // namespace taillab::timedomain

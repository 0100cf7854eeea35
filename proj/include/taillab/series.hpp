#pragma once

#include <vector>

#include "taillab/jost.hpp"

namespace taillab::series {

// Finite sum  sum_i coeff_i * w^{power_i} * ln(w)^{log_power_i},  w > 0.
struct LogPolyTerm {
  double power;
  int log_power;
  double coefficient;
};

struct LogPolySeries {
  std::vector<LogPolyTerm> terms;
  double eval(double w) const;
  double coefficient(double power, int log_power) const;  // 0 when absent
};

inline int j_m(int j, int m) { return (m - 2) * (j - m + 1) + m - 1; }

// |tau|^{j_m} / ((j_m - m + 1)!)^{m/(m-2)}
double factorial_bound(int j, int m, double abs_tau);

// One step of the dual-space recurrence, F_{j+1} = P^m [F_j / (tau (tau+2))],
// on the ray tau = rho e^{i theta}. Rays passing within 1/2 of tau = -2 are
// rejected.
ArrayXcd recurrence_step(const ArrayXd& rho, double theta, const ArrayXcd& fj, int m);

// F_{m-1} .. F_{m-1+count} sampled along a ray, seeded with
// F_{m-1} = v1 tau^{m-1}/(m-1)!.
struct RaySamples {
  int m;
  double v1;
  double theta;
  ArrayXd rho;
  std::vector<ArrayXcd> fj;  // fj[k] holds F_{m-1+k}

  int j_of(int k) const { return m - 1 + k; }
};
RaySamples build_ray(int m, double v1, double theta, double rho_max, int count,
                     double h = 1e-3, double geometric_ratio = 1.004);

// s(x; eps) reconstructed from the segmented Laplace integral of
// H(q) e^{-qx} / (q (q + 2 eps)) with H assembled from the F_j series.
// Valid for real eps with 0 < eps <= 1/x and x >= x_plus.
struct ReconstructOptions {
  double tol = 1e-11;
  int max_terms = 48;
  double ray_h = 1e-3;
  double ray_ratio = 1.004;
  double q_span = 45.0;  // q integrated up to 1 + q_span/x
};
Complex reconstruct_s(const PotentialSpec& spec, double eps, double x,
                      const ReconstructOptions& opt = {});

// Least-squares extraction of the leading small-eps coefficients of
// s(x; eps) = h1 eps^{m-2} ln eps + h2 eps^{m-1} ln eps + h3 eps^{2m-4} ln^2 eps + Q.
// Samples come from the tail solver; eps_grid must be real, inside (0, 1/x),
// log-spaced, with at least 8 points.
struct HCoefficients {
  double x;
  double h1, h2, h3;
  // coefficient of eps^{m-1} ln(eps x) implied by the same fit; for m = 3 the
  // ln^2 column leaks 2 ln(x) into the eps^{m-1} ln(eps) one, and only this
  // combination scales cleanly with x at accessible windows
  double h2_log_eps_x;
  double fit_residual;  // relative l2 misfit
  double condition;
};
HCoefficients extract_h_coefficients(const PotentialSpec& spec, double x,
                                     const std::vector<double>& eps_grid,
                                     const JostOptions& jopt = {});

// int_3^inf e^{-(eps x) tau} tau^n (ln tau)^l dtau, for n >= -2, l in 0..2,
// eps x in (0, 1].
double nm0_integral(int n, int l, double eps_x);

// Singular part of the same integral as a series in w = eps x (everything
// except an analytic remainder that stays bounded with all derivatives):
//   n >= 0:  w^{-n-1} sum_{q<=l}   c_q ln^q w
//   n = -1:  sum_{q<=l+1}          c_q ln^q w
//   n = -2:  w       sum_{q<=l+1}  c_q ln^q w
LogPolySeries nm0_expansion(int n, int l);

}  // namespace taillab::series

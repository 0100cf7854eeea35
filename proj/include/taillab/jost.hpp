#pragma once

#include <optional>
#include <vector>

#include "taillab/common.hpp"
#include "taillab/ode.hpp"
#include "taillab/potential.hpp"

namespace taillab {

// Laplace dual variable; the closed right half-plane minus the origin.
// All complex logarithms downstream use the principal branch (cut along the
// negative real axis), which std::log provides.
struct Frequency {
  Complex value;

  explicit Frequency(Complex v) : value(v) {
    if (!(v.real() >= 0.0) || v == Complex(0.0, 0.0))
      throw ValidationError("Frequency: need Re(eps) >= 0 and eps != 0");
  }
  explicit Frequency(double v) : Frequency(Complex(v, 0.0)) {}
};

enum class Side { Plus, Minus };

// Exponentially decaying solution y = e^{-eps x}(1+s) (Plus side; the Minus
// side carries e^{+eps x}). grid is increasing and, for solutions produced by
// solve_s, reaches the truncation point of the integral equation.
struct JostSolution {
  Side side;
  Complex eps;
  ArrayXd grid;
  ArrayXcd y, y_prime, s, s_prime;
  int picard_iterations = 0;
  double tail_s_magnitude = 0.0;          // |s| at the outermost tail node
  double anchor_deviation = -1.0;         // small-eps zero-energy cross-check; <0: not run
};

struct JostOptions {
  double tol_tail = 1e-10;        // |T1(Xinf)| target fixing the truncation point
  double tol_fixed_point = 1e-13; // sup-norm stop for the Picard iteration
  int max_iterations = 400;
  double tail_span = 40.0;        // uniform span appended beyond the requested grid
  double tail_h = 1e-2;
  double geometric_ratio = 1.01;  // spacing growth in the far tail
  double eps_switch = 0.0;        // 0: use 1e-3 / x_cutoff
  double anchor_tolerance = 0.10;
  RKOptions rk{};
};

// Solves s'' - 2 eps s' - V s = V on the tail side by Picard iteration of the
// integral form, truncated where the first iterate drops below tol_tail.
// The requested grid must lie in the exact-tail region (>= x_plus for Plus,
// <= x_minus for Minus); the returned solution also covers the appended
// extension up to the truncation point.
JostSolution solve_s(const PotentialSpec& spec, Frequency eps, Side side, const ArrayXd& grid,
                     const JostOptions& opt = {});

// Continues a tail solution across the rest of the line by direct integration
// of y'' = (V + eps^2) y from the innermost tail node. Nodes of full_grid on
// the tail side must coincide with nodes of j.grid.
JostSolution extend_to_line(const JostSolution& j, const PotentialSpec& spec,
                            const ArrayXd& full_grid, const JostOptions& opt = {});

// W = y_+ y_-' - y_+' y_- evaluated on the common nodes of the two solutions;
// returns the grid-median. wronskian_profile exposes the per-node values for
// the x-independence check.
Complex wronskian(const JostSolution& plus, const JostSolution& minus);
ArrayXcd wronskian_profile(const JostSolution& plus, const JostSolution& minus);

// max |y'' - (V + eps^2) y| over stencil-usable nodes, and max |y|, for the
// residual invariant.
struct ResidualReport {
  double residual_max;
  double y_max;
};
ResidualReport jost_residual(const JostSolution& j, const PotentialSpec& spec,
                             Eigen::Index stride = 1);

// Piecewise-uniform grid over [x_lo, x_hi] with x_minus and x_plus landing on
// nodes exactly.
ArrayXd line_grid(const PotentialSpec& spec, double x_lo, double x_hi, double h);

struct LinePair {
  JostSolution plus, minus;
  ArrayXd core;       // common nodes
  Complex w;          // Wronskian (median over the core)
  ArrayXcd w_profile;
};

// Driver: both Jost solutions on a common core grid spanning [x_lo, x_hi].
LinePair jost_pair_on_grid(const PotentialSpec& spec, Frequency eps, double x_lo, double x_hi,
                           double h, const JostOptions& opt = {});

struct SpectralCheck {
  enum class Result { Ok, BoundState, Resonance };
  Result result;
  std::vector<double> bound_state_eps;  // zeros of W on (0, eps_max]
  double w_at_zero = 0.0;               // extrapolated W(0)
  double w_at_max = 0.0;
  double eps_max = 0.0;

  bool ok() const { return result == Result::Ok; }
  std::string describe() const;
};

struct SpectralOptions {
  double eps_max = 0.0;  // 0: derived from the well depth
  int scan_points = 72;
  double eps_min = 1e-3;
  double resonance_threshold = 1e-6;
  double pair_h = 0.01;
  JostOptions jost{};
};

// Scans W along the positive real axis for zeros (bound states) and
// extrapolates W(0) to detect a zero-energy resonance.
SpectralCheck check_spectral_assumptions(const PotentialSpec& spec,
                                         const SpectralOptions& opt = {});

}  // namespace taillab

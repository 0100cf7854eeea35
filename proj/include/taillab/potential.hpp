#pragma once

#include <optional>
#include <vector>

#include "taillab/common.hpp"

namespace taillab {

enum class PotentialFamily { PureInversePower, InversePowerSum, PowerPlusCorrection };

struct SumTerm {
  double alpha;        // tail exponent, > 2
  double coefficient;  // tail amplitude
};

// Admissible potential: exact inverse-power tails outside [x_minus, x_plus],
// glued through the middle by a polynomial smoothstep of order 2m+6 so that V
// stays C^{m+2} everywhere, plus an optional compactly supported middle bump.
//
// Tail forms per family, for x >= x_plus (mirrored with v_minus on the left):
//   PureInversePower:    v_plus * x^{-m}
//   InversePowerSum:     sum_k coefficient_k * x^{-alpha_k}
//   PowerPlusCorrection: v_plus * x^{-m} + correction_coeff * x^{-m-correction_delta}
struct PotentialSpec {
  PotentialFamily family = PotentialFamily::PureInversePower;
  int m = 3;
  double v_plus = 1.0;
  double v_minus = 1.0;
  double x_plus = 1.0;
  double x_minus = -1.0;
  std::vector<SumTerm> sum_terms;
  double correction_delta = 4.0;
  double correction_coeff = 0.0;
  double bump_amplitude = 0.0;
  double bump_center = 0.0;
  double bump_halfwidth = 1.0;

  void validate() const;

  static PotentialSpec pure(int m, double v_plus, double v_minus, double x_plus = 1.0,
                            double x_minus = -1.0);
};

// V(x). Exact tail formula outside [x_minus, x_plus].
double evaluate(const PotentialSpec& spec, double x);

// k-th derivative of V, analytic everywhere; 0 <= k <= m+2.
double derivative(const PotentialSpec& spec, double x, int k);

// Decay-power relevant for the side (exponent of the dominant tail term) and
// its amplitude; used to size truncation points.
struct TailInfo {
  double exponent;
  double amplitude;
};
TailInfo dominant_tail(const PotentialSpec& spec, bool plus_side);

// sup |V| estimated on a dense grid over [x_minus - 2, x_plus + 2] plus tails.
double sup_norm(const PotentialSpec& spec);

}  // namespace taillab

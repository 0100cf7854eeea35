#pragma once

#include <optional>

#include "taillab/jost.hpp"

namespace taillab {

// Complex samples on an increasing grid, with the weighted-L1 moment norms
// ||<x>^k f||_1 recorded at construction.
struct GridFunction {
  ArrayXd grid;
  ArrayXcd values;
  ArrayXd moment_norms;  // index k = 0 .. max_moment

  GridFunction() = default;
  GridFunction(ArrayXd grid_, ArrayXcd values_, int max_moment = 12);
  static GridFunction zero(const ArrayXd& grid);
  static GridFunction sample(const ArrayXd& grid, const std::function<double(double)>& f);
};

struct ResolventParts {
  GridFunction free_part;  // G_0(psi_1)
  GridFunction remainder;
};

struct ResolventResult {
  Complex eps;
  GridFunction psi_hat;
  std::optional<ResolventParts> parts;
};

struct ResolventOptions {
  JostOptions jost{};
  double wronskian_floor = 1e-8;  // refuse when |W| drops below this * (1+2|eps|)
};

// G(f)(x) = (1/W)( y_-(x) int_inf^x y_+ f - y_+(x) int_{-inf}^x y_- f ),
// quadrature on the grid of f. The grid must contain x_plus and x_minus as
// nodes and extend a little beyond them on both sides.
GridFunction green_apply(const PotentialSpec& spec, Frequency eps, const GridFunction& f,
                         const ResolventOptions& opt = {});

// Explicit free kernels of the decomposition: G_0 has a minus sign between
// the two half-line integrals, G_1 a plus sign; both carry 1/(2(1+eps)).
GridFunction free_g0(Frequency eps, const GridFunction& f);
GridFunction free_g1(Frequency eps, const GridFunction& f);

// psi_hat = G(psi_1 + eps psi_0); optionally splits off G_0(psi_1).
ResolventResult psi_hat(const PotentialSpec& spec, Frequency eps, const GridFunction& psi0,
                        const GridFunction& psi1, bool with_parts = false,
                        const ResolventOptions& opt = {});

// Least-squares extraction of the coefficient of the singular model term
// eps^{m-1} ln(eps) / (1 + eps <x0>)^{M} from (psi_hat - G_0(psi_1))(x0; eps)
// sampled on a real eps grid, with smooth spectator columns {1, eps, ...}.
struct SingularFit {
  double coefficient;    // the numeric r_3(x0)
  double fit_residual;   // relative l2 misfit
  double condition;      // of the scaled design matrix
};
SingularFit fit_singular_coefficient(const PotentialSpec& spec, const GridFunction& psi1,
                                     double x0, const std::vector<double>& eps_grid,
                                     int denominator_exponent,
                                     const ResolventOptions& opt = {});

}  // namespace taillab

#pragma once

#include <functional>
#include <variant>

#include "taillab/resolvent.hpp"

namespace taillab::ilt {

// Vertical Bromwich line Re(eps) = shift, truncated at |Im| = t_im.
struct VerticalLine {
  double shift = 0.1;
  double t_im = 32.0;
  int nodes = 512;
};

// Contour wrapped around the branch cut on the negative real axis: vertical
// lines at Re(eps) = -cut_depth plus the two sides of the cut, approached at
// offset delta_cut (the cut contribution itself is evaluated in the
// delta_cut -> 0 limit, where the log jump is exact).
struct DeformedHairpin {
  double cut_depth = 0.5;
  double delta_cut = 1e-8;
  int nodes_cut = 512;
  int nodes_vertical = 256;
  double t_im = 32.0;
};

using ContourSpec = std::variant<VerticalLine, DeformedHairpin>;

struct BromwichOptions {
  double tol = 1e-8;       // relative settling target
  double tol_abs = 0.0;    // absolute settling target (0: purely relative)
  int max_refinements = 24;
  bool conjugate_symmetric = true;  // sampler(conj eps) == conj(sampler(eps))
  bool tail_correction = true;      // first integration-by-parts boundary term
  bool parallel = true;
};

// (1/2 pi i) int e^{eps t} F(eps) d eps along the vertical line. The smooth
// factor is interpolated per cell and the oscillatory kernel integrated
// exactly, so node spacing only needs to resolve F. Truncation and spacing
// are refined until the value settles to tol; a sampler that does not decay
// along the line is reported as an error.
Complex bromwich(const std::function<Complex(Complex)>& sampler, double t,
                 const VerticalLine& line, const BromwichOptions& opt = {});

// r eps^p ln(eps) / (1 + eps scale)^M, the singular model term of the
// resolvent decomposition (ln factor optional).
struct ModelTerm {
  double coefficient = 1.0;
  int power = 2;
  bool with_log = true;
  double scale = 1.0;
  int denominator_exponent = 4;

  Complex operator()(Complex eps) const;
};

// Inverse transform of a model term over the hairpin contour: the exact log
// jump across the cut plus the numerically integrated vertical legs.
// Requires power >= 1 and scale * cut_depth < 1 (no pole on the cut path).
Complex deformed_cut_integral(const ModelTerm& model, double t,
                              const DeformedHairpin& contour = {},
                              const BromwichOptions& opt = {});

// Leading large-t behavior of the same transform: (-1)^{p+1} p! r t^{-p-1}.
double watson_leading(const ModelTerm& model, double t);

struct ReconstructionOptions {
  BromwichOptions bromwich{.tol = 1e-7, .tol_abs = 1e-9};
  ResolventOptions resolvent{};
  double shift_cap = 0.1;  // contour shift c = min(cap, 1/t)
  double t_im = 16.0;
  int nodes = 128;
};

struct TimeReconstruction {
  ArrayXd t;
  ArrayXd psi;
  double imag_max = 0.0;  // realness diagnostic
};

// psi(x0, t) = L^{-1} psi_hat(x0, .) evaluated pointwise on t_grid.
TimeReconstruction reconstruct_time_solution(const PotentialSpec& spec, const GridFunction& psi0,
                                             const GridFunction& psi1, double x0,
                                             const ArrayXd& t_grid,
                                             const ReconstructionOptions& opt = {});

}  // namespace taillab::ilt

#include "taillab/resolvent.hpp"

#include <cmath>

#include "taillab/grid.hpp"
#include "taillab/quadrature.hpp"

namespace taillab {

GridFunction::GridFunction(ArrayXd grid_, ArrayXcd values_, int max_moment)
    : grid(std::move(grid_)), values(std::move(values_)) {
  if (grid.size() != values.size() || !strictly_increasing(grid))
    throw ValidationError("GridFunction: need matching values on an increasing grid");
  if (!values.allFinite()) throw ValidationError("GridFunction: values must be finite");
  moment_norms.resize(max_moment + 1);
  ArrayXd weight = values.abs();
  for (int k = 0; k <= max_moment; ++k) {
    moment_norms[k] = integrate<double>(grid, weight);
    for (Eigen::Index i = 0; i < grid.size(); ++i) weight[i] *= japanese_bracket(grid[i]);
  }
}

GridFunction GridFunction::zero(const ArrayXd& grid) {
  return {grid, ArrayXcd::Zero(grid.size()), 0};
}

GridFunction GridFunction::sample(const ArrayXd& grid, const std::function<double(double)>& f) {
  ArrayXcd v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  return {grid, std::move(v)};
}

namespace {

// y_pm restricted to the nodes of `grid` (which the solution grids contain).
ArrayXcd restrict_to(const ArrayXd& grid, const JostSolution& sol, bool primes) {
  ArrayXcd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Eigen::Index k = find_node(sol.grid, grid[i]);
    if (k < 0) throw ValidationError("resolvent: function grid is not a subgrid of the solution");
    out[i] = primes ? sol.y_prime[k] : sol.y[k];
  }
  return out;
}

}  // namespace

GridFunction green_apply(const PotentialSpec& spec, Frequency eps, const GridFunction& f,
                         const ResolventOptions& opt) {
  const double x_lo = f.grid[0], x_hi = f.grid[f.grid.size() - 1];
  if (x_lo >= spec.x_minus || x_hi <= spec.x_plus)
    throw ValidationError("green_apply: grid must extend past both cutoffs");
  if (find_node(f.grid, spec.x_plus) < 0 || find_node(f.grid, spec.x_minus) < 0)
    throw ValidationError("green_apply: cutoffs must land on grid nodes");

  const Eigen::Index ip = find_node(f.grid, spec.x_plus);
  const Eigen::Index im = find_node(f.grid, spec.x_minus);

  JostSolution ptail = solve_s(spec, eps, Side::Plus, f.grid.tail(f.grid.size() - ip), opt.jost);
  JostSolution mtail = solve_s(spec, eps, Side::Minus, f.grid.head(im + 1), opt.jost);
  JostSolution plus = extend_to_line(ptail, spec, f.grid, opt.jost);
  JostSolution minus = extend_to_line(mtail, spec, f.grid, opt.jost);

  const Complex w = wronskian(plus, minus);
  if (std::abs(w) < opt.wronskian_floor * (1.0 + 2.0 * std::abs(eps.value)))
    throw SpectralError(
        "green_apply: |W(eps)| is too small; the potential is at or near a bound state or "
        "zero-energy resonance");

  const ArrayXcd yp = restrict_to(f.grid, plus, false);
  const ArrayXcd ym = restrict_to(f.grid, minus, false);

  // A(x) = int_x^sup y_+ f,  B(x) = int_inf^x ... = int_{x_lo}^x y_- f
  const ArrayXcd A = cumulative_from_right<Complex>(f.grid, (yp * f.values).eval());
  const ArrayXcd B = cumulative_from_left<Complex>(f.grid, (ym * f.values).eval());

  ArrayXcd out = -(ym * A + yp * B) / w;
  return {f.grid, std::move(out)};
}

namespace {

GridFunction free_kernel(Frequency eps, const GridFunction& f, double sign_between) {
  const Complex e = eps.value;
  if (std::abs(e + 1.0) < 1e-12)
    throw ValidationError("free kernel: eps = -1 is outside the admissible half-plane");
  const ArrayXcd jp = exp_tail_integral<Complex>(f.grid, f.values, e);   // int_x e^{-e(u-x)} f
  const ArrayXcd jm = exp_head_integral<Complex>(f.grid, f.values, e);   // int^x e^{-e(x-u)} f
  ArrayXcd out = (-jp + sign_between * jm) / (2.0 * (1.0 + e));
  return {f.grid, std::move(out)};
}

}  // namespace

GridFunction free_g0(Frequency eps, const GridFunction& f) { return free_kernel(eps, f, -1.0); }
GridFunction free_g1(Frequency eps, const GridFunction& f) { return free_kernel(eps, f, +1.0); }

ResolventResult psi_hat(const PotentialSpec& spec, Frequency eps, const GridFunction& psi0,
                        const GridFunction& psi1, bool with_parts, const ResolventOptions& opt) {
  if (psi0.grid.size() != psi1.grid.size() || (psi0.grid != psi1.grid).any())
    throw ValidationError("psi_hat: psi0 and psi1 must share a grid");
  GridFunction rhs{psi1.grid, (psi1.values + eps.value * psi0.values).eval()};
  GridFunction g = green_apply(spec, eps, rhs, opt);
  ResolventResult out{eps.value, std::move(g), std::nullopt};
  if (with_parts) {
    GridFunction free_part = free_g0(eps, psi1);
    GridFunction remainder{out.psi_hat.grid, (out.psi_hat.values - free_part.values).eval()};
    out.parts = ResolventParts{std::move(free_part), std::move(remainder)};
  }
  return out;
}

SingularFit fit_singular_coefficient(const PotentialSpec& spec, const GridFunction& psi1,
                                     double x0, const std::vector<double>& eps_grid,
                                     int denominator_exponent, const ResolventOptions& opt) {
  if (eps_grid.size() < 6)
    throw ValidationError("fit_singular_coefficient: need at least 6 eps samples");
  const Eigen::Index ix = find_node(psi1.grid, x0);
  if (ix < 0) throw ValidationError("fit_singular_coefficient: x0 must be a grid node");

  const int n = static_cast<int>(eps_grid.size());
  const GridFunction psi0 = GridFunction::zero(psi1.grid);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const ResolventResult r = psi_hat(spec, Frequency(eps_grid[i]), psi0, psi1, true, opt);
    rhs[i] = r.parts->remainder.values[ix].real();
  }

  const double bx = japanese_bracket(x0);
  Eigen::MatrixXd design(n, 5);
  for (int i = 0; i < n; ++i) {
    const double e = eps_grid[i];
    design(i, 0) = std::pow(e, spec.m - 1) * std::log(e) /
                   std::pow(1.0 + e * bx, denominator_exponent);
    design(i, 1) = 1.0;
    design(i, 2) = e;
    design(i, 3) = e * e;
    design(i, 4) = e * e * e;
  }
  Eigen::VectorXd scale(design.cols());
  for (int c = 0; c < design.cols(); ++c) scale[c] = design.col(c).norm();
  Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  const auto svd = scaled.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd coef = svd.solve(rhs).cwiseQuotient(scale);

  SingularFit out;
  out.coefficient = coef[0];
  out.fit_residual = (design * coef - rhs).norm() / rhs.norm();
  out.condition = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  return out;
}

}  // namespace taillab

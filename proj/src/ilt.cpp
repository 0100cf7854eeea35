#include "taillab/ilt.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "taillab/grid.hpp"
#include "taillab/parallel.hpp"
#include "taillab/quadrature.hpp"

namespace taillab::ilt {
namespace {

// int_{w_lo}^{w_hi} e^{i w t} G(w) dw with per-cell cubic interpolation of G
// and exact oscillatory moments. Nodes: extra-fine cells near w = 0 where
// samplers typically vary on the scale of the contour shift, then uniform,
// then geometric.
struct HalfLineGrid {
  ArrayXd w;

  static HalfLineGrid build(double w_lo, double w_hi, double spacing, double ratio,
                            double fine_scale = 0.0) {
    ArrayXd head(1);
    head[0] = w_lo;
    if (fine_scale > 0.0 && spacing > fine_scale / 2) {
      const double w_fine = std::min(8.0 * fine_scale, w_hi);
      head = uniform_grid(w_lo, w_fine, fine_scale / 2);
    }
    const double start = head[head.size() - 1];
    const double w_mid = std::min(w_hi, std::max(8.0, 16.0 * spacing));
    if (w_mid > start) {
      ArrayXd uni = uniform_grid(start, w_mid, spacing);
      head = concat(head, uni.tail(uni.size() - 1));
    }
    const double top = head[head.size() - 1];
    if (w_hi > top)
      return {concat(head, geometric_extension(top, w_hi, spacing, ratio))};
    return {head};
  }
};

Complex filon_half_line(const ArrayXd& w, const ArrayXcd& g, double t) {
  // reference phase per cell keeps the moments well-scaled
  const Complex a(0.0, -t);  // e^{iwt} = e^{-a u} e^{i w_k t} with u = w - w_k
  Complex acc = 0.0;
  const Eigen::Index n = w.size();
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double h = w[k + 1] - w[k];
    int lo, npts;
    detail::stencil_range(n, k, lo, npts);
    const auto c = detail::interp_coeffs<Complex>(w.data() + lo, g.data() + lo, npts, w[k]);
    const auto mu = exp_moments(a, h);
    Complex local = 0.0;
    for (int j = 0; j < npts; ++j) local += c[j] * mu[j];
    acc += local * std::exp(Complex(0.0, w[k] * t));
  }
  return acc;
}

class CachedSampler {
 public:
  CachedSampler(const std::function<Complex(Complex)>& fn, bool parallel)
      : fn_(fn), parallel_(parallel) {}

  // values of fn at shift + i w for all w in the grid, memoized
  ArrayXcd evaluate(double shift, const ArrayXd& w) {
    std::vector<Eigen::Index> missing;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (!cache_.count(key(w[i]))) missing.push_back(i);
    if (!missing.empty()) {
      std::vector<Complex> vals(missing.size());
      auto eval_one = [&](std::size_t j) {
        vals[j] = fn_(Complex(shift, w[missing[j]]));
      };
      if (parallel_ && missing.size() > 8)
        parallel_for(missing.size(), eval_one);
      else
        for (std::size_t j = 0; j < missing.size(); ++j) eval_one(j);
      for (std::size_t j = 0; j < missing.size(); ++j) cache_[key(w[missing[j]])] = vals[j];
    }
    ArrayXcd out(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) out[i] = cache_.at(key(w[i]));
    return out;
  }

 private:
  static long long key(double w) { return std::llround(w * 1e12); }
  const std::function<Complex(Complex)>& fn_;
  bool parallel_;
  std::map<long long, Complex> cache_;
};

}  // namespace

Complex bromwich(const std::function<Complex(Complex)>& sampler, double t,
                 const VerticalLine& line, const BromwichOptions& opt) {
  if (!(t > 0.0)) throw ValidationError("bromwich: t must be positive");
  if (line.nodes < 64) throw ValidationError("bromwich: need at least 64 nodes");
  if (!(line.shift >= 0.0)) throw ValidationError("bromwich: contour shift must be >= 0");

  CachedSampler cache(sampler, opt.parallel);
  double T = line.t_im;
  double spacing = line.t_im / line.nodes;
  double ratio = 1.05;

  auto evaluate = [&](double T_cur, double sp, double ra) -> Complex {
    const HalfLineGrid grid = HalfLineGrid::build(0.0, T_cur, sp, ra, line.shift);
    const ArrayXcd g = cache.evaluate(line.shift, grid.w);
    Complex upper = filon_half_line(grid.w, g, t);
    if (opt.tail_correction)
      upper += Complex(0.0, 1.0) * g[g.size() - 1] * std::exp(Complex(0.0, T_cur * t)) / t;
    if (opt.conjugate_symmetric)
      return Complex((std::exp(line.shift * t) / M_PI * upper).real(), 0.0);
    const ArrayXd wm = (-grid.w).eval();
    const ArrayXcd gm = cache.evaluate(line.shift, wm);
    Complex lower = filon_half_line(grid.w, gm, -t);
    if (opt.tail_correction)
      lower -= Complex(0.0, 1.0) * gm[gm.size() - 1] * std::exp(Complex(0.0, -T_cur * t)) / t;
    return std::exp(line.shift * t) / (2.0 * M_PI) * (upper + lower);
  };

  // refine truncation and resolution independently, driven by which error
  // estimate dominates; the sampler cache makes re-summation cheap
  Complex value = evaluate(T, spacing, ratio);
  for (int level = 0; level < opt.max_refinements; ++level) {
    const Complex v_res = evaluate(T, spacing / 2, 1.0 + (ratio - 1.0) / 2);
    const Complex v_tail = evaluate(2 * T, spacing, ratio);
    const double e_res = std::abs(v_res - value);
    const double e_tail = std::abs(v_tail - value);
    const double target =
        std::max({opt.tol * std::abs(value), opt.tol_abs, 1e-280});
    if (e_res <= target && e_tail <= target) return v_res;
    if (e_tail >= e_res) {
      T *= 2;
      value = v_tail;
    } else {
      spacing /= 2;
      ratio = 1.0 + (ratio - 1.0) / 2;
      value = v_res;
    }
  }
  throw NumericError(
      "bromwich: quadrature did not settle; the sampler may not decay along the line "
      "(a larger t_im or a different contour is needed)");
}

Complex ModelTerm::operator()(Complex eps) const {
  Complex v = coefficient * std::pow(eps, power) /
              std::pow(1.0 + eps * scale, denominator_exponent);
  if (with_log) v *= std::log(eps);
  return v;
}

double watson_leading(const ModelTerm& model, double t) {
  if (!model.with_log) return 0.0;
  const double sign = (model.power % 2 == 0) ? -1.0 : 1.0;  // (-1)^{p+1}
  return sign * std::tgamma(double(model.power + 1)) * model.coefficient *
         std::pow(t, -double(model.power + 1));
}

Complex deformed_cut_integral(const ModelTerm& model, double t, const DeformedHairpin& contour,
                              const BromwichOptions& opt) {
  if (model.power < 1)
    throw ValidationError("deformed_cut_integral: power must be >= 1 (integrable at 0)");
  if (!(contour.cut_depth > 0.0) || model.scale * contour.cut_depth >= 1.0)
    throw ValidationError(
        "deformed_cut_integral: need scale * cut_depth < 1 so no pole sits on the cut path");
  if (!(t > 0.0)) throw ValidationError("deformed_cut_integral: t must be positive");

  // exact log jump across the cut:
  // (-1)^{p+1} r int_0^d e^{-ut} u^p (1 - u scale)^{-M} du
  Complex cut = 0.0;
  if (model.with_log) {
    const ArrayXd u = uniform_grid(0.0, contour.cut_depth, contour.cut_depth / contour.nodes_cut);
    ArrayXcd g(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
      g[i] = std::pow(u[i], model.power) *
             std::pow(1.0 - u[i] * model.scale, -model.denominator_exponent);
    const Complex integral = exp_tail_integral<Complex>(u, g, Complex(t, 0.0))[0];
    const double sign = (model.power % 2 == 0) ? -1.0 : 1.0;
    cut = sign * model.coefficient * integral;
  }

  // vertical legs at Re(eps) = -d, conjugate-symmetric pair
  const double d = contour.cut_depth;
  double T = contour.t_im;
  double spacing = contour.t_im / contour.nodes_vertical;
  auto legs = [&](double T_cur, double sp) {
    const HalfLineGrid grid = HalfLineGrid::build(contour.delta_cut, T_cur, sp, 1.05);
    ArrayXcd g(grid.w.size());
    for (Eigen::Index i = 0; i < grid.w.size(); ++i)
      g[i] = model(Complex(-d, grid.w[i]));
    Complex integral = filon_half_line(grid.w, g, t);
    if (opt.tail_correction)
      integral += Complex(0.0, 1.0) * g[g.size() - 1] * std::exp(Complex(0.0, T_cur * t)) / t;
    return std::exp(-d * t) / M_PI * Complex(integral.real(), 0.0);
  };
  Complex vert = legs(T, spacing);
  for (int level = 0; level < opt.max_refinements; ++level) {
    const Complex next = legs(2 * T, spacing / 2);
    const double change = std::abs(next - vert);
    vert = next;
    T *= 2;
    spacing /= 2;
    if (change <= std::max({opt.tol * std::abs(cut + vert), opt.tol_abs, 1e-280})) break;
  }
  return cut + vert;
}

TimeReconstruction reconstruct_time_solution(const PotentialSpec& spec, const GridFunction& psi0,
                                             const GridFunction& psi1, double x0,
                                             const ArrayXd& t_grid,
                                             const ReconstructionOptions& opt) {
  const Eigen::Index ix = find_node(psi1.grid, x0);
  if (ix < 0)
    throw ValidationError("reconstruct_time_solution: x0 must be a node of the data grid");

  TimeReconstruction out;
  out.t = t_grid;
  out.psi.resize(t_grid.size());
  double imag_max = 0.0;

  // the Laplace transform of the evolution is the negative of the resolvent
  // object: hat{psi}'' = (V + eps^2) hat{psi} + psi_1 + eps psi_0 while
  // L[psi] satisfies the same equation with the opposite source sign
  auto sampler = [&](Complex eps) -> Complex {
    return -psi_hat(spec, Frequency(eps), psi0, psi1, false, opt.resolvent)
                .psi_hat.values[ix];
  };

  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    VerticalLine line{std::min(opt.shift_cap, 1.0 / t), opt.t_im, opt.nodes};
    BromwichOptions bopt = opt.bromwich;
    bopt.conjugate_symmetric = false;  // track the imaginary part as a diagnostic
    const Complex v = bromwich(sampler, t, line, bopt);
    out.psi[i] = v.real();
    imag_max = std::max(imag_max, std::abs(v.imag()));
  }
  out.imag_max = imag_max;
  return out;
}

}  // namespace taillab::ilt

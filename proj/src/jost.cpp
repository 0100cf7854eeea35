#include "taillab/jost.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "taillab/grid.hpp"
#include "taillab/parallel.hpp"
#include "taillab/quadrature.hpp"
#include "taillab/specfun.hpp"

namespace taillab {
namespace {

double truncation_point(const PotentialSpec& spec, bool plus_side, double floor_at,
                        double tol_tail) {
  const TailInfo tail = dominant_tail(spec, plus_side);
  if (tail.amplitude == 0.0) return floor_at;
  const double a = tail.exponent;
  const double x = std::pow(tail.amplitude / ((a - 1.0) * (a - 2.0) * tol_tail), 1.0 / (a - 2.0));
  return std::clamp(x, floor_at, 1e12);
}

struct PicardResult {
  ArrayXcd s, s_prime;
  int iterations;
};

// Tail-side engine in mirrored coordinates (x > 0, decaying solution
// e^{-eps x}(1+s)). pot must be the potential as seen from this side.
PicardResult picard_tail(const std::function<double(double)>& pot, Complex eps,
                         const ArrayXd& x, const JostOptions& opt) {
  const Eigen::Index n = x.size();
  ArrayXd V(n);
  for (Eigen::Index i = 0; i < n; ++i) V[i] = pot(x[i]);

  ArrayXcd s = ArrayXcd::Zero(n);
  const Complex two_eps = 2.0 * eps;
  const ExpTailOperator kernel(x, two_eps);
  const ExpTailOperator antiderivative(x, Complex(0.0, 0.0));
  const ArrayXcd Vc = V.cast<Complex>();
  double prev_delta = std::numeric_limits<double>::infinity();
  double first_delta = 0.0;
  int growth_streak = 0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    ArrayXcd J = kernel.apply((Vc * (1.0 + s)).eval());
    ArrayXcd s_new = antiderivative.apply(J);
    const double delta = (s_new - s).abs().maxCoeff();
    s = std::move(s_new);
    if (delta < opt.tol_fixed_point)
      return {s, -kernel.apply((Vc * (1.0 + s)).eval()), it};
    if (it == 1) first_delta = delta;
    growth_streak = delta > prev_delta ? growth_streak + 1 : 0;
    if (growth_streak >= 6 && delta > 10.0 * first_delta)
      throw NumericError(
          "solve_s: Picard iteration is not contracting; enlarge the truncation point "
          "(smaller tol_tail) or move the grid further into the tail");
    prev_delta = delta;
  }
  throw NumericError("solve_s: Picard iteration did not converge within max_iterations");
}

ArrayXd with_extension(const ArrayXd& grid, double x_inf, const JostOptions& opt) {
  ArrayXd out = grid;
  const double top = grid[grid.size() - 1];
  if (x_inf <= top) return out;
  const double uniform_top = std::min(top + opt.tail_span, x_inf);
  if (uniform_top > top) {
    ArrayXd ext = uniform_grid(top, uniform_top, opt.tail_h);
    out = concat(out, ext.tail(ext.size() - 1));
  }
  const double new_top = out[out.size() - 1];
  if (x_inf > new_top)
    out = concat(out, geometric_extension(new_top, x_inf, opt.tail_h, opt.geometric_ratio));
  return out;
}

void anchor_check(JostSolution& sol, const PotentialSpec& spec, bool plus_side,
                  const ArrayXd& pos_grid, const ArrayXcd& s, Complex eps,
                  const JostOptions& opt) {
  if (spec.family != PotentialFamily::PureInversePower) return;
  const double v = plus_side ? spec.v_plus : spec.v_minus;
  if (!(v > 0.0)) return;
  const double x_cut = plus_side ? spec.x_plus : -spec.x_minus;
  const double eps_switch = opt.eps_switch > 0 ? opt.eps_switch : 1e-3 / x_cut;
  if (std::abs(eps) > eps_switch) return;

  const double scale = std::pow(v, -1.0 / (spec.m - 2));
  const specfun::ZeroEnergyPair pair(spec.m);
  const double x0 = pos_grid[0];
  double worst = 0.0;
  Complex ratio0 = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double target = x0 * (1.0 + 0.4 * j);
    const Eigen::Index i = std::min<Eigen::Index>(
        pos_grid.size() - 1,
        std::lower_bound(pos_grid.data(), pos_grid.data() + pos_grid.size(), target) -
            pos_grid.data());
    const Complex ratio =
        (1.0 + s[i]) * std::exp(-eps * (pos_grid[i] - x0)) / pair.sample(pos_grid[i] / scale).phi1;
    if (j == 0) {
      ratio0 = ratio;
      worst = std::abs(ratio - 1.0);
    } else {
      worst = std::max(worst, std::abs(ratio / ratio0 - 1.0));
    }
  }
  sol.anchor_deviation = worst;
}

}  // namespace

JostSolution solve_s(const PotentialSpec& spec, Frequency eps, Side side, const ArrayXd& grid,
                     const JostOptions& opt) {
  spec.validate();
  if (!strictly_increasing(grid)) throw ValidationError("solve_s: grid must be increasing");
  const bool plus = side == Side::Plus;
  if (plus && grid[0] < spec.x_plus - 1e-12)
    throw ValidationError("solve_s: Plus-side grid must start in the exact tail (x >= x_plus)");
  if (!plus && grid[grid.size() - 1] > spec.x_minus + 1e-12)
    throw ValidationError("solve_s: Minus-side grid must end in the exact tail (x <= x_minus)");

  // mirrored coordinates for the Minus side
  const ArrayXd base = plus ? grid : reversed_negated(grid);
  const std::function<double(double)> pot =
      plus ? std::function<double(double)>([&spec](double x) { return evaluate(spec, x); })
           : std::function<double(double)>([&spec](double x) { return evaluate(spec, -x); });

  const double x_inf = truncation_point(spec, plus, base[base.size() - 1], opt.tol_tail);
  const ArrayXd pos = with_extension(base, x_inf, opt);
  PicardResult pr = picard_tail(pot, eps.value, pos, opt);

  JostSolution sol;
  sol.side = side;
  sol.eps = eps.value;
  sol.picard_iterations = pr.iterations;
  // the last node is pinned to zero by the truncation; report the cell before
  sol.tail_s_magnitude = std::abs(pr.s[std::max<Eigen::Index>(0, pr.s.size() - 2)]);
  anchor_check(sol, spec, plus, pos, pr.s, eps.value, opt);

  const Eigen::Index n = pos.size();
  if (plus) {
    sol.grid = pos;
    sol.s = pr.s;
    sol.s_prime = pr.s_prime;
    sol.y.resize(n);
    sol.y_prime.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex e = std::exp(-eps.value * pos[i]);
      sol.y[i] = e * (1.0 + sol.s[i]);
      sol.y_prime[i] = e * (sol.s_prime[i] - eps.value * (1.0 + sol.s[i]));
    }
  } else {
    sol.grid = reversed_negated(pos);
    sol.s.resize(n);
    sol.s_prime.resize(n);
    sol.y.resize(n);
    sol.y_prime.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index k = n - 1 - i;
      sol.s[i] = pr.s[k];
      sol.s_prime[i] = -pr.s_prime[k];
      const Complex e = std::exp(eps.value * sol.grid[i]);
      sol.y[i] = e * (1.0 + sol.s[i]);
      sol.y_prime[i] = e * (eps.value * (1.0 + sol.s[i]) + sol.s_prime[i]);
    }
  }
  return sol;
}

JostSolution extend_to_line(const JostSolution& j, const PotentialSpec& spec,
                            const ArrayXd& full_grid, const JostOptions& opt) {
  if (!strictly_increasing(full_grid))
    throw ValidationError("extend_to_line: full grid must be increasing");
  const bool plus = j.side == Side::Plus;
  const double anchor = plus ? j.grid[0] : j.grid[j.grid.size() - 1];
  const double tol = 1e-9;

  // split full_grid into the part to fill and the part that must coincide
  std::vector<double> fill;
  for (Eigen::Index i = 0; i < full_grid.size(); ++i) {
    const double x = full_grid[i];
    if (plus ? x < anchor - tol : x > anchor + tol) {
      fill.push_back(x);
    } else if (find_node(j.grid, x, tol) < 0) {
      throw ValidationError("extend_to_line: full grid node does not match the tail solution");
    }
  }

  JostSolution out;
  out.side = j.side;
  out.eps = j.eps;
  out.picard_iterations = j.picard_iterations;
  out.tail_s_magnitude = j.tail_s_magnitude;
  out.anchor_deviation = j.anchor_deviation;

  const Eigen::Index nf = static_cast<Eigen::Index>(fill.size());
  if (nf == 0) {
    out.grid = j.grid;
    out.y = j.y;
    out.y_prime = j.y_prime;
    out.s = j.s;
    out.s_prime = j.s_prime;
    return out;
  }

  // integration nodes: anchor first, then outward toward the far end
  ArrayXd nodes(nf + 1);
  nodes[0] = anchor;
  for (Eigen::Index i = 0; i < nf; ++i)
    nodes[i + 1] = plus ? fill[nf - 1 - i] : fill[i];

  const Eigen::Index ja = plus ? 0 : j.grid.size() - 1;
  const auto ode = integrate_linear_ode([&spec](double x) { return evaluate(spec, x); },
                                        j.eps * j.eps, nodes, j.y[ja], j.y_prime[ja], opt.rk);

  ArrayXd gfill(nf);
  ArrayXcd yfill(nf), ypfill(nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    const Eigen::Index src = plus ? nf - i : i + 1;  // back to increasing order
    gfill[i] = fill[i];
    yfill[i] = ode.y[src];
    ypfill[i] = ode.y_prime[src];
  }

  if (plus) {
    out.grid = concat(gfill, j.grid);
    out.y = ArrayXcd(out.grid.size());
    out.y_prime = ArrayXcd(out.grid.size());
    out.y << yfill, j.y;
    out.y_prime << ypfill, j.y_prime;
  } else {
    out.grid = concat(j.grid, gfill);
    out.y = ArrayXcd(out.grid.size());
    out.y_prime = ArrayXcd(out.grid.size());
    out.y << j.y, yfill;
    out.y_prime << j.y_prime, ypfill;
  }

  const Eigen::Index n = out.grid.size();
  out.s.resize(n);
  out.s_prime.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex e = std::exp((plus ? 1.0 : -1.0) * out.eps * out.grid[i]);
    out.s[i] = out.y[i] * e - 1.0;
    out.s_prime[i] =
        plus ? e * (out.y_prime[i] + out.eps * out.y[i]) : e * (out.y_prime[i] - out.eps * out.y[i]);
  }
  return out;
}

namespace {

std::vector<std::pair<Eigen::Index, Eigen::Index>> common_nodes(const ArrayXd& a,
                                                                const ArrayXd& b) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index i = 0, k = 0;
  while (i < a.size() && k < b.size()) {
    const double tol = 1e-9 * (1.0 + std::abs(a[i]));
    if (std::abs(a[i] - b[k]) <= tol) {
      out.emplace_back(i, k);
      ++i;
      ++k;
    } else if (a[i] < b[k]) {
      ++i;
    } else {
      ++k;
    }
  }
  return out;
}

}  // namespace

ArrayXcd wronskian_profile(const JostSolution& plus, const JostSolution& minus) {
  if (std::abs(plus.eps - minus.eps) > 1e-14 * (1.0 + std::abs(plus.eps)))
    throw ValidationError("wronskian: the two solutions use different eps");
  const auto idx = common_nodes(plus.grid, minus.grid);
  if (idx.size() < 3) throw ValidationError("wronskian: grids mismatch (no common nodes)");
  ArrayXcd w(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto [i, k] = idx[j];
    w[static_cast<Eigen::Index>(j)] =
        plus.y[i] * minus.y_prime[k] - plus.y_prime[i] * minus.y[k];
  }
  return w;
}

Complex wronskian(const JostSolution& plus, const JostSolution& minus) {
  ArrayXcd w = wronskian_profile(plus, minus);
  std::vector<double> re(w.size()), im(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    re[i] = w[i].real();
    im[i] = w[i].imag();
  }
  auto median = [](std::vector<double>& v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  return {median(re), median(im)};
}

ResidualReport jost_residual(const JostSolution& j, const PotentialSpec& spec,
                             Eigen::Index stride) {
  ArrayXcd q(j.grid.size());
  for (Eigen::Index i = 0; i < j.grid.size(); ++i)
    q[i] = evaluate(spec, j.grid[i]) + j.eps * j.eps;
  const ArrayXcd zero = ArrayXcd::Zero(j.grid.size());
  return {ode_residual_max(j.grid, j.y, q, zero, stride), j.y.abs().maxCoeff()};
}

ArrayXd line_grid(const PotentialSpec& spec, double x_lo, double x_hi, double h) {
  if (!(x_lo < spec.x_minus) || !(x_hi > spec.x_plus))
    throw ValidationError("line_grid: range must contain [x_minus, x_plus]");
  ArrayXd left = uniform_grid(x_lo, spec.x_minus, h);
  ArrayXd mid = uniform_grid(spec.x_minus, spec.x_plus, h);
  ArrayXd right = uniform_grid(spec.x_plus, x_hi, h);
  return concat(concat(left, mid.tail(mid.size() - 1)), right.tail(right.size() - 1));
}

LinePair jost_pair_on_grid(const PotentialSpec& spec, Frequency eps, double x_lo, double x_hi,
                           double h, const JostOptions& opt) {
  LinePair out{.plus = {}, .minus = {}, .core = line_grid(spec, x_lo, x_hi, h), .w = 0.0,
               .w_profile = {}};
  const ArrayXd& core = out.core;

  const Eigen::Index ip = find_node(core, spec.x_plus);
  const Eigen::Index im = find_node(core, spec.x_minus);
  const ArrayXd plus_tail = core.tail(core.size() - ip);
  const ArrayXd minus_tail = core.head(im + 1);

  JostSolution ptail = solve_s(spec, eps, Side::Plus, plus_tail, opt);
  JostSolution mtail = solve_s(spec, eps, Side::Minus, minus_tail, opt);
  out.plus = extend_to_line(ptail, spec, core, opt);
  out.minus = extend_to_line(mtail, spec, core, opt);
  out.w_profile = wronskian_profile(out.plus, out.minus);
  out.w = wronskian(out.plus, out.minus);
  return out;
}

std::string SpectralCheck::describe() const {
  std::ostringstream os;
  switch (result) {
    case Result::Ok:
      os << "ok: W(eps) has no zeros on (0, " << eps_max << "] and W(0) = " << w_at_zero
         << " is away from zero";
      break;
    case Result::BoundState:
      os << "bound state: W(eps0) = 0 at eps0 =";
      for (double e : bound_state_eps) os << " " << e;
      os << " (eigenvalue -eps0^2 of -d^2/dx^2 + V)";
      break;
    case Result::Resonance:
      os << "zero-energy resonance: extrapolated W(0) = " << w_at_zero
         << " is below the detection threshold";
      break;
  }
  return os.str();
}

SpectralCheck check_spectral_assumptions(const PotentialSpec& spec, const SpectralOptions& opt) {
  spec.validate();
  SpectralCheck out;

  // deepest possible bound state fixes the scan ceiling
  double vmin = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = spec.x_minus - 2.0 + (spec.x_plus - spec.x_minus + 4.0) * i / 2000.0;
    vmin = std::min(vmin, evaluate(spec, x));
  }
  const double eps_max = opt.eps_max > 0 ? opt.eps_max : std::sqrt(-vmin) + 1.0;
  out.eps_max = eps_max;

  const double x_lo = spec.x_minus - 2.0, x_hi = spec.x_plus + 2.0;
  auto w_at = [&](double e) {
    return jost_pair_on_grid(spec, Frequency(e), x_lo, x_hi, opt.pair_h, opt.jost).w.real();
  };

  const int n = opt.scan_points;
  std::vector<double> es(n), ws(n);
  for (int i = 0; i < n; ++i)
    es[i] = opt.eps_min * std::pow(eps_max / opt.eps_min, double(i) / (n - 1));
  parallel_for(n, [&](std::size_t i) { ws[i] = w_at(es[i]); });
  out.w_at_max = ws[n - 1];

  for (int i = 0; i + 1 < n; ++i) {
    if (ws[i] == 0.0 || ws[i] * ws[i + 1] < 0.0) {
      double a = es[i], b = es[i + 1], fa = ws[i];
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = w_at(mid);
        if (fa * fm <= 0.0) {
          b = mid;
        } else {
          a = mid;
          fa = fm;
        }
        if (b - a < 1e-10 * (1.0 + b)) break;
      }
      out.bound_state_eps.push_back(0.5 * (a + b));
    }
  }

  // W(0) by eliminating the linear term; the eps^{m-1} ln eps correction is
  // beyond the detection threshold
  const double e1 = opt.eps_min;
  out.w_at_zero = 2.0 * w_at(e1) - w_at(2.0 * e1);

  if (!out.bound_state_eps.empty()) {
    out.result = SpectralCheck::Result::BoundState;
  } else if (std::abs(out.w_at_zero) < opt.resonance_threshold * (1.0 + std::abs(out.w_at_max))) {
    out.result = SpectralCheck::Result::Resonance;
  } else {
    out.result = SpectralCheck::Result::Ok;
  }
  return out;
}

}  // namespace taillab

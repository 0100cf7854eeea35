#include "taillab/series.hpp"

#include <cmath>

#include "taillab/grid.hpp"
#include "taillab/quadrature.hpp"

namespace taillab::series {

double LogPolySeries::eval(double w) const {
  if (!(w > 0.0)) throw ValidationError("LogPolySeries: argument must be positive");
  const double lw = std::log(w);
  double acc = 0.0;
  for (const auto& t : terms)
    acc += t.coefficient * std::pow(w, t.power) * std::pow(lw, t.log_power);
  return acc;
}

double LogPolySeries::coefficient(double power, int log_power) const {
  for (const auto& t : terms)
    if (t.log_power == log_power && std::abs(t.power - power) < 1e-12) return t.coefficient;
  return 0.0;
}

double factorial_bound(int j, int m, double abs_tau) {
  const int jm = j_m(j, m);
  const double log_b =
      jm * std::log(abs_tau) - double(m) / (m - 2) * std::lgamma(double(jm - m + 2));
  return std::exp(log_b);
}

ArrayXcd recurrence_step(const ArrayXd& rho, double theta, const ArrayXcd& fj, int m) {
  const double dist_to_pole = theta > M_PI_2 ? 2.0 * std::sin(theta) : 2.0;
  if (dist_to_pole < 0.5)
    throw ValidationError("recurrence_step: ray passes too close to tau = -2");
  const Complex dir = std::exp(Complex(0.0, theta));
  ArrayXcd g(rho.size());
  g[0] = 0.0;  // F_j / (tau (tau+2)) -> 0 at the origin since F_j = O(tau^{m-1})
  for (Eigen::Index i = 1; i < rho.size(); ++i) {
    const Complex tau = rho[i] * dir;
    g[i] = fj[i] / (tau * (tau + 2.0));
  }
  for (int k = 0; k < m; ++k) {
    g = cumulative_from_left<Complex>(rho, g);
    g *= dir;
  }
  return g;
}

RaySamples build_ray(int m, double v1, double theta, double rho_max, int count, double h,
                     double geometric_ratio) {
  RaySamples out;
  out.m = m;
  out.v1 = v1;
  out.theta = theta;
  const double uniform_top = std::min(rho_max, 10.0);
  out.rho = uniform_grid(0.0, uniform_top, h);
  if (rho_max > uniform_top)
    out.rho = concat(out.rho, geometric_extension(uniform_top, rho_max, h, geometric_ratio));

  const Complex dir = std::exp(Complex(0.0, theta));
  ArrayXcd seed(out.rho.size());
  const double fac = std::tgamma(double(m));
  for (Eigen::Index i = 0; i < out.rho.size(); ++i)
    seed[i] = v1 * std::pow(out.rho[i] * dir, m - 1) / fac;
  out.fj.push_back(std::move(seed));
  for (int k = 0; k < count; ++k)
    out.fj.push_back(recurrence_step(out.rho, theta, out.fj.back(), m));
  return out;
}

Complex reconstruct_s(const PotentialSpec& spec, double eps, double x,
                      const ReconstructOptions& opt) {
  spec.validate();
  if (spec.family != PotentialFamily::PureInversePower)
    throw ValidationError("reconstruct_s: only the pure inverse-power family is supported");
  if (!(x >= spec.x_plus)) throw ValidationError("reconstruct_s: need x >= x_plus");
  if (!(eps > 0.0) || eps * x > 1.0 + 1e-12)
    throw ValidationError("reconstruct_s: need real eps in (0, 1/x]");

  const int m = spec.m;
  const double q_max = 1.0 + opt.q_span / x;
  const double tau_max = q_max / eps;

  // grow the ray lazily; every term is an exponential-kernel integral in tau.
  // With a general tail constant, F_j carries a factor v1^{j-m+2} relative to
  // the unit-amplitude recurrence.
  RaySamples ray = build_ray(m, 1.0, 0.0, tau_max, 0, opt.ray_h, opt.ray_ratio);
  const double beta = eps * x;

  Complex acc = 0.0;
  int quiet = 0;
  double v_factor = spec.v_plus;
  for (int k = 0; k < opt.max_terms; ++k) {
    if (k > 0) {
      ray.fj.push_back(recurrence_step(ray.rho, 0.0, ray.fj.back(), m));
      v_factor *= spec.v_plus;
    }
    const int j = ray.j_of(k);
    const int jm = j_m(j, m);
    ArrayXcd g(ray.rho.size());
    g[0] = 0.0;
    for (Eigen::Index i = 1; i < ray.rho.size(); ++i)
      g[i] = ray.fj[k][i] / (ray.rho[i] * (ray.rho[i] + 2.0));
    const Complex integral = exp_tail_integral<Complex>(ray.rho, g, Complex(beta, 0.0))[0];
    const Complex term = v_factor * std::pow(eps, jm - 1) * integral;
    acc += term;

    // tail of the series is controlled by the factorial bound:
    // |term_{j'}| <= (j'_m - 2)! / (x^{j'_m - 1} ((j'_m - m + 1)!)^{m/(m-2)})
    const int jm_next = j_m(j + 1, m);
    const double log_tail = std::lgamma(double(jm_next - 1)) - (jm_next - 1) * std::log(x) -
                            double(m) / (m - 2) * std::lgamma(double(jm_next - m + 2));
    const bool small_term = std::abs(term) < opt.tol * std::max(1e-10, std::abs(acc));
    const bool small_tail = log_tail < std::log(opt.tol * std::max(1e-10, std::abs(acc)));
    if (small_term && small_tail) return acc;
    quiet = small_term ? quiet + 1 : 0;
    if (quiet >= 3) return acc;
  }
  throw NumericError("reconstruct_s: series truncation did not reach the requested tolerance");
}

HCoefficients extract_h_coefficients(const PotentialSpec& spec, double x,
                                     const std::vector<double>& eps_grid,
                                     const JostOptions& jopt) {
  if (eps_grid.size() < 8)
    throw ValidationError("extract_h_coefficients: need at least 8 eps samples");
  for (double e : eps_grid)
    if (!(e > 0.0) || !(e < 1.0 / x))
      throw ValidationError("extract_h_coefficients: eps grid must lie inside (0, 1/x)");

  const int m = spec.m;
  const int n = static_cast<int>(eps_grid.size());
  Eigen::VectorXd rhs(n);
  // the fitted combinations are tiny; keep the tail quadrature fine
  JostOptions tight = jopt;
  tight.tail_h = std::min(tight.tail_h, 5e-3);
  tight.geometric_ratio = std::min(tight.geometric_ratio, 1.004);
  tight.tail_span = std::max(tight.tail_span, 60.0);
  const ArrayXd probe = uniform_grid(x, x + 1.0, tight.tail_h);
  for (int i = 0; i < n; ++i) {
    const JostSolution sol = solve_s(spec, Frequency(eps_grid[i]), Side::Plus, probe, tight);
    rhs[i] = sol.s[0].real();
  }

  // singular columns first, then the smooth spectators (deduplicated)
  std::vector<std::function<double(double)>> cols;
  cols.emplace_back([m](double e) { return std::pow(e, m - 2) * std::log(e); });
  cols.emplace_back([m](double e) { return std::pow(e, m - 1) * std::log(e); });
  cols.emplace_back([m](double e) { return std::pow(e, 2 * m - 4) * std::pow(std::log(e), 2); });
  cols.emplace_back([](double) { return 1.0; });
  cols.emplace_back([](double e) { return e; });
  if (m > 3) {
    cols.emplace_back([m](double e) { return std::pow(e, m - 2); });
  }
  cols.emplace_back([m](double e) { return std::pow(e, m - 1); });

  const int nc = static_cast<int>(cols.size());
  Eigen::MatrixXd design(n, nc);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < nc; ++c) design(i, c) = cols[c](eps_grid[i]);

  Eigen::VectorXd scale(nc);
  for (int c = 0; c < nc; ++c) scale[c] = design.col(c).norm();
  Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  const auto svd = scaled.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond =
      svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  if (cond > 1e12)
    throw NumericError("extract_h_coefficients: fit is ill-conditioned; widen the eps grid");
  Eigen::VectorXd coef = svd.solve(rhs).cwiseQuotient(scale);

  HCoefficients out;
  out.x = x;
  out.h1 = coef[0];
  out.h2 = coef[1];
  out.h3 = coef[2];
  out.h2_log_eps_x = m == 3 ? coef[1] - 2.0 * std::log(x) * coef[2] : coef[1];
  out.fit_residual = (design * coef - rhs).norm() / rhs.norm();
  out.condition = cond;
  return out;
}

double nm0_integral(int n, int l, double eps_x) {
  if (n < -2 || l < 0 || l > 2) throw ValidationError("nm0_integral: need n >= -2, l in 0..2");
  if (!(eps_x > 0.0) || eps_x > 1.0)
    throw ValidationError("nm0_integral: eps*x must lie in (0, 1]");
  const double tau_top = 3.0 + 80.0 / eps_x;
  ArrayXd grid = uniform_grid(3.0, 10.0, 2e-3);
  grid = concat(grid, geometric_extension(10.0, tau_top, 2e-3, 1.004));
  ArrayXcd g(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    g[i] = std::pow(grid[i], n) * std::pow(std::log(grid[i]), l);
  const Complex j0 = exp_tail_integral<Complex>(grid, g, Complex(eps_x, 0.0))[0];
  return std::exp(-3.0 * eps_x) * j0.real();
}

namespace {

// int_0^inf e^{-u} u^n ln^j u du = d^j/ds^j Gamma(s) at s = n+1, j <= 3
double gamma_log_moment(int n, int j) {
  constexpr double kEulerGamma = 0.57721566490153286060651209;
  constexpr double kZeta2 = 1.64493406684822643647241516;  // pi^2/6
  constexpr double kZeta3 = 1.20205690315959428539973816;
  double h1 = 0.0, h2 = 0.0, h3 = 0.0;
  for (int k = 1; k <= n; ++k) {
    h1 += 1.0 / k;
    h2 += 1.0 / (double(k) * k);
    h3 += 1.0 / (double(k) * k * k);
  }
  const double gamma_n = std::tgamma(double(n + 1));
  const double psi = -kEulerGamma + h1;
  const double psi1 = kZeta2 - h2;
  const double psi2 = -2.0 * kZeta3 + 2.0 * h3;
  switch (j) {
    case 0:
      return gamma_n;
    case 1:
      return gamma_n * psi;
    case 2:
      return gamma_n * (psi * psi + psi1);
    case 3:
      return gamma_n * (psi * psi * psi + 3.0 * psi * psi1 + psi2);
  }
  throw ValidationError("gamma_log_moment: j must be in 0..3");
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

// c_q for n >= 0: coefficient of w^{-n-1} ln^q w
std::vector<double> c_nonneg(int n, int l) {
  std::vector<double> c(l + 1, 0.0);
  for (int q = 0; q <= l; ++q)
    c[q] = gamma_log_moment(n, l - q) * ((q % 2) ? -1.0 : 1.0) * binom(l, q);
  return c;
}

}  // namespace

LogPolySeries nm0_expansion(int n, int l) {
  if (n < -2 || l < 0 || l > 2) throw ValidationError("nm0_expansion: need n >= -2, l in 0..2");
  const double ln3 = std::log(3.0);
  LogPolySeries out;
  if (n >= 0) {
    const auto c = c_nonneg(n, l);
    for (int q = 0; q <= l; ++q)
      out.terms.push_back({-double(n + 1), q, c[q]});
    return out;
  }
  if (n == -1) {
    // integration by parts shifts to n = 0 with one more log factor and
    // leaves the boundary constant -(ln 3)^{l+1}/(l+1) at leading order
    auto c = c_nonneg(0, l + 1);
    for (double& v : c) v /= (l + 1);
    c[0] -= std::pow(ln3, l + 1) / (l + 1);
    for (int q = 0; q <= l + 1; ++q)
      out.terms.push_back({0.0, q, c[q]});
    return out;
  }
  // n == -2: boundary constant at order w^0, and the w^1 log coefficients
  // from c^{(-2;l)}_q = l c^{(-2;l-1)}_q - c^{(-1;l)}_q. The log-free w^1
  // coefficient is only defined modulo the analytic remainder's value.
  double h0 = 0.0;  // accumulated boundary constants (ln 3)^{l'} / 3
  std::vector<double> prev;
  for (int lp = 0; lp <= l; ++lp) {
    h0 = std::pow(ln3, lp) / 3.0 + lp * h0;
    auto cm1 = c_nonneg(0, lp + 1);
    for (double& v : cm1) v /= (lp + 1);
    cm1[0] -= std::pow(ln3, lp + 1) / (lp + 1);
    std::vector<double> cur(lp + 2, 0.0);
    for (int q = 0; q <= lp + 1; ++q) {
      cur[q] = -cm1[q];
      if (lp >= 1 && q < static_cast<int>(prev.size())) cur[q] += lp * prev[q];
    }
    prev = cur;
  }
  out.terms.push_back({0.0, 0, h0});
  for (int q = 0; q < static_cast<int>(prev.size()); ++q)
    out.terms.push_back({1.0, q, prev[q]});
  return out;
}

}  // namespace taillab::series

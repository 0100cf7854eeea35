#pragma once

#include <functional>

#include "taillab/common.hpp"

namespace taillab {

struct RKOptions {
  double rtol = 1e-12;
  double atol = 1e-300;
  double safety = 0.9;
  double min_shrink = 0.2;
  double max_grow = 5.0;
  int max_steps = 50'000'000;
};

struct SecondOrderSolution {
  ArrayXcd y;
  ArrayXcd y_prime;
};

// Integrates y'' = q(x) y with Dormand-Prince RK5(4) in complex arithmetic,
// starting from (y0, yp0) at nodes[0] and landing exactly on every node.
// `nodes` may be increasing or decreasing. Error control is relative on
// max(|y|, |y'|) along the current step.
inline SecondOrderSolution integrate_linear_ode(const std::function<double(double)>& q_real,
                                                Complex eps2_shift, const ArrayXd& nodes,
                                                Complex y0, Complex yp0,
                                                const RKOptions& opt = {}) {
  // q(x) = q_real(x) + eps2_shift; splitting keeps the potential callable real
  const Eigen::Index n = nodes.size();
  SecondOrderSolution out{ArrayXcd(n), ArrayXcd(n)};
  out.y[0] = y0;
  out.y_prime[0] = yp0;
  if (n == 1) return out;

  // Dormand-Prince coefficients
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  struct State {
    Complex y, yp;
  };
  auto deriv = [&](double x, const State& u) -> State {
    return {u.yp, (q_real(x) + eps2_shift) * u.y};
  };

  State u{y0, yp0};
  double x = nodes[0];
  const double dir = nodes[1] > nodes[0] ? 1.0 : -1.0;
  double h = dir * std::abs(nodes[1] - nodes[0]);
  int steps = 0;
  State k1 = deriv(x, u);
  for (Eigen::Index target = 1; target < n; ++target) {
    const double xt = nodes[target];
    while (dir * (xt - x) > 1e-14 * std::abs(h)) {
      if (++steps > opt.max_steps) throw NumericError("integrate_linear_ode: step limit");
      if (dir * (x + h - xt) > 0) h = xt - x;
      const State k2 = deriv(x + c2 * h, {u.y + h * a21 * k1.y, u.yp + h * a21 * k1.yp});
      const State k3 = deriv(x + c3 * h, {u.y + h * (a31 * k1.y + a32 * k2.y),
                                          u.yp + h * (a31 * k1.yp + a32 * k2.yp)});
      const State k4 =
          deriv(x + c4 * h, {u.y + h * (a41 * k1.y + a42 * k2.y + a43 * k3.y),
                             u.yp + h * (a41 * k1.yp + a42 * k2.yp + a43 * k3.yp)});
      const State k5 =
          deriv(x + c5 * h, {u.y + h * (a51 * k1.y + a52 * k2.y + a53 * k3.y + a54 * k4.y),
                             u.yp + h * (a51 * k1.yp + a52 * k2.yp + a53 * k3.yp + a54 * k4.yp)});
      const State k6 = deriv(
          x + h, {u.y + h * (a61 * k1.y + a62 * k2.y + a63 * k3.y + a64 * k4.y + a65 * k5.y),
                  u.yp + h * (a61 * k1.yp + a62 * k2.yp + a63 * k3.yp + a64 * k4.yp +
                              a65 * k5.yp)});
      const State u5{u.y + h * (b1 * k1.y + b3 * k3.y + b4 * k4.y + b5 * k5.y + b6 * k6.y),
                     u.yp + h * (b1 * k1.yp + b3 * k3.yp + b4 * k4.yp + b5 * k5.yp + b6 * k6.yp)};
      const State k7 = deriv(x + h, u5);
      const Complex erry =
          h * (e1 * k1.y + e3 * k3.y + e4 * k4.y + e5 * k5.y + e6 * k6.y + e7 * k7.y);
      const Complex erryp =
          h * (e1 * k1.yp + e3 * k3.yp + e4 * k4.yp + e5 * k5.yp + e6 * k6.yp + e7 * k7.yp);
      const double scale_y = opt.atol + opt.rtol * std::max(std::abs(u.y), std::abs(u5.y));
      const double scale_p = opt.atol + opt.rtol * std::max(std::abs(u.yp), std::abs(u5.yp));
      const double err = std::max(std::abs(erry) / scale_y, std::abs(erryp) / scale_p);
      if (err <= 1.0) {
        x += h;
        u = u5;
        k1 = k7;  // FSAL
      }
      const double factor = err > 0 ? opt.safety * std::pow(err, -0.2) : opt.max_grow;
      h *= std::clamp(factor, opt.min_shrink, opt.max_grow);
      if (std::abs(h) < 1e-14 * (1.0 + std::abs(x)))
        throw NumericError("integrate_linear_ode: step size underflow");
    }
    out.y[target] = u.y;
    out.y_prime[target] = u.yp;
  }
  return out;
}

}  // namespace taillab

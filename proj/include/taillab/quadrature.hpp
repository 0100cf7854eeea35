#pragma once

#include <array>
#include <cmath>

#include "taillab/common.hpp"
#include "taillab/grid.hpp"

namespace taillab {

// Moments mu_j = int_0^h u^j e^{-a u} du for j = 0..3.
//
// The series branch avoids the cancellation of the closed form for small
// |a h|; the recursion handles everything else, including underflow of
// e^{-a h} in far-tail cells. Callers must keep Re(a) >= 0.
inline std::array<Complex, 4> exp_moments(Complex a, double h) {
  std::array<Complex, 4> mu;
  const Complex ah = a * h;
  if (std::abs(ah) < 0.5) {
    // mu_j = h^{j+1} sum_i (-ah)^i / (i! (j+i+1))
    for (int j = 0; j < 4; ++j) {
      Complex term = 1.0;
      Complex sum = 1.0 / double(j + 1);
      for (int i = 1; i < 40; ++i) {
        term *= -ah / double(i);
        sum += term / double(j + i + 1);
        if (std::abs(term) < 1e-20 * std::abs(sum)) break;
      }
      mu[j] = sum * std::pow(h, j + 1);
    }
    return mu;
  }
  const Complex em = std::exp(-ah);
  mu[0] = (1.0 - em) / a;
  double hj = 1.0;
  for (int j = 1; j < 4; ++j) {
    hj *= h;
    mu[j] = (double(j) * mu[j - 1] - hj * em) / a;
  }
  return mu;
}

namespace detail {

// Coefficients (in powers of x - xc) of the Lagrange interpolant through
// npts <= 4 nodes, via Newton divided differences.
template <class Scalar>
inline std::array<Scalar, 4> interp_coeffs(const double* xs, const Scalar* ys, int npts,
                                           double xc) {
  std::array<Scalar, 4> dd{};
  for (int i = 0; i < npts; ++i) dd[i] = ys[i];
  for (int k = 1; k < npts; ++k)
    for (int i = npts - 1; i >= k; --i) dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k]);
  // Horner-expand  dd0 + dd1 (x-x0) + dd2 (x-x0)(x-x1) + ...  about xc,
  // i.e. in u = x - xc, where (x - x_k) = u + (xc - x_k)
  std::array<Scalar, 4> c{};
  c[0] = dd[npts - 1];
  int deg = 0;
  for (int k = npts - 2; k >= 0; --k) {
    const double shift = xc - xs[k];
    for (int j = deg + 1; j >= 1; --j) c[j] = c[j - 1] + c[j] * shift;
    c[0] = c[0] * shift + dd[k];
    ++deg;
  }
  return c;
}

inline void stencil_range(Eigen::Index n, Eigen::Index k, int& lo, int& npts) {
  // 4-point stencil {k-1, k, k+1, k+2} shifted to stay inside [0, n-1]
  if (n < 4) {
    lo = 0;
    npts = static_cast<int>(n);
    return;
  }
  lo = static_cast<int>(k) - 1;
  npts = 4;
  if (lo < 0) lo = 0;
  if (lo + 4 > n) lo = static_cast<int>(n) - 4;
}

}  // namespace detail

// Reusable backward-recursion operator for
//   J[k] = int_{x_k}^{x_max} e^{-a (u - x_k)} g(u) du
// with per-cell cubic interpolation of g and exact exponential moments, so
// cells only need to resolve g, not the kernel. The per-cell node weights
// are independent of g; building them once makes repeated applications (for
// fixed grid and kernel) cheap. a = 0 gives the plain cumulative integral
// from the right.
class ExpTailOperator {
 public:
  ExpTailOperator(const ArrayXd& x, Complex a) : n_(x.size()), lo_(n_), w_(n_ * 4), decay_(n_) {
    double last_h = -1.0;
    Complex last_decay = 1.0;
    std::array<Complex, 4> last_mu{};
    for (Eigen::Index k = 0; k + 1 < n_; ++k) {
      const double h = x[k + 1] - x[k];
      if (std::abs(h - last_h) > 1e-13 * h) {
        last_h = h;
        last_decay = std::exp(-a * h);
        last_mu = exp_moments(a, h);
      }
      decay_[k] = last_decay;
      int lo, npts;
      detail::stencil_range(n_, k, lo, npts);
      lo_[k] = lo;
      // weights: local = sum_i w_i g(node_i) with w = A^T mu, where A maps
      // node values to monomial coefficients about x_k
      std::array<Complex, 4> basis{};
      for (int i = 0; i < npts; ++i) {
        basis.fill(Complex(0.0));
        basis[i] = 1.0;
        const auto c =
            detail::interp_coeffs<Complex>(x.data() + lo, basis.data(), npts, x[k]);
        Complex wi = 0.0;
        for (int j = 0; j < npts; ++j) wi += c[j] * last_mu[j];
        w_[4 * k + i] = wi;
      }
      for (int i = npts; i < 4; ++i) w_[4 * k + i] = 0.0;
    }
  }

  ArrayXcd apply(const ArrayXcd& g) const {
    ArrayXcd J(n_);
    J[n_ - 1] = 0.0;
    for (Eigen::Index k = n_ - 2; k >= 0; --k) {
      const Complex* w = &w_[4 * k];
      const Complex* gs = g.data() + lo_[k];
      J[k] = decay_[k] * J[k + 1] + w[0] * gs[0] + w[1] * gs[1] + w[2] * gs[2] + w[3] * gs[3];
    }
    return J;
  }

 private:
  Eigen::Index n_;
  std::vector<int> lo_;
  std::vector<Complex> w_;
  std::vector<Complex> decay_;
};

// One-shot convenience wrapper.
template <class Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> exp_tail_integral(
    const ArrayXd& x, const Eigen::Array<Scalar, Eigen::Dynamic, 1>& g, Complex a) {
  const Eigen::Index n = x.size();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> J(n);
  J[n - 1] = Scalar(0);
  for (Eigen::Index k = n - 2; k >= 0; --k) {
    const double h = x[k + 1] - x[k];
    int lo, npts;
    detail::stencil_range(n, k, lo, npts);
    const auto c = detail::interp_coeffs<Scalar>(x.data() + lo, g.data() + lo, npts, x[k]);
    const auto mu = exp_moments(a, h);
    Scalar local = Scalar(0);
    for (int j = 0; j < npts; ++j) local += c[j] * Scalar(mu[j]);
    J[k] = Scalar(std::exp(-a * h)) * J[k + 1] + local;
  }
  return J;
}

// K[k] = int_{x_min}^{x_k} e^{-a (x_k - u)} g(u) du.
template <class Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> exp_head_integral(
    const ArrayXd& x, const Eigen::Array<Scalar, Eigen::Dynamic, 1>& g, Complex a) {
  const Eigen::Index n = x.size();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> K(n);
  K[0] = Scalar(0);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double h = x[k] - x[k - 1];
    int lo, npts;
    detail::stencil_range(n, k - 1, lo, npts);
    const auto c = detail::interp_coeffs<Scalar>(x.data() + lo, g.data() + lo, npts, x[k]);
    const auto mu = exp_moments(a, h);
    // substitute u = x_k - w: interpolant becomes sum_j c_j (-w)^j
    Scalar local = Scalar(0);
    double sgn = 1.0;
    for (int j = 0; j < npts; ++j) {
      local += c[j] * Scalar(mu[j]) * sgn;
      sgn = -sgn;
    }
    K[k] = Scalar(std::exp(-a * h)) * K[k - 1] + local;
  }
  return K;
}

// C[k] = int_{x_min}^{x_k} g du (cubic cells).
template <class Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> cumulative_from_left(
    const ArrayXd& x, const Eigen::Array<Scalar, Eigen::Dynamic, 1>& g) {
  const Eigen::Index n = x.size();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> C(n);
  C[0] = Scalar(0);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double h = x[k + 1] - x[k];
    int lo, npts;
    detail::stencil_range(n, k, lo, npts);
    const auto c = detail::interp_coeffs<Scalar>(x.data() + lo, g.data() + lo, npts, x[k]);
    Scalar local = Scalar(0);
    double hp = h;
    for (int j = 0; j < npts; ++j) {
      local += c[j] * Scalar(hp / double(j + 1));
      hp *= h;
    }
    C[k + 1] = C[k] + local;
  }
  return C;
}

template <class Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> cumulative_from_right(
    const ArrayXd& x, const Eigen::Array<Scalar, Eigen::Dynamic, 1>& g) {
  auto C = cumulative_from_left<Scalar>(x, g);
  const Scalar total = C[C.size() - 1];
  for (Eigen::Index k = 0; k < C.size(); ++k) C[k] = total - C[k];
  return C;
}

template <class Scalar>
Scalar integrate(const ArrayXd& x, const Eigen::Array<Scalar, Eigen::Dynamic, 1>& g) {
  auto C = cumulative_from_left<Scalar>(x, g);
  return C[C.size() - 1];
}

// ---------------------------------------------------------------------------
// Stencil derivatives (uniform spacing).

namespace detail {
// centered coefficients, O(h^8)
inline constexpr std::array<double, 9> kD2Stencil9 = {
    -1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315,
    -1.0 / 560};
inline constexpr std::array<double, 9> kD1Stencil9 = {
    1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
}  // namespace detail

// Second derivative at index i from 9 points spaced stride*h apart.
// Requires uniform spacing across the stencil (checked by the caller).
template <class Scalar>
Scalar stencil_second_derivative(const ArrayXd& x,
                                 const Eigen::Array<Scalar, Eigen::Dynamic, 1>& y,
                                 Eigen::Index i, Eigen::Index stride) {
  const double h = x[i + stride] - x[i];
  Scalar acc = Scalar(0);
  for (int j = -4; j <= 4; ++j)
    acc += detail::kD2Stencil9[j + 4] * y[i + j * stride];
  return acc / (h * h);
}

template <class Scalar>
Scalar stencil_first_derivative(const ArrayXd& x,
                                const Eigen::Array<Scalar, Eigen::Dynamic, 1>& y,
                                Eigen::Index i, Eigen::Index stride) {
  const double h = x[i + stride] - x[i];
  Scalar acc = Scalar(0);
  for (int j = -4; j <= 4; ++j)
    acc += detail::kD1Stencil9[j + 4] * y[i + j * stride];
  return acc / h;
}

// True when the 9-point stencil centered at i with the given stride lies in a
// locally uniform region of the grid.
inline bool stencil_usable(const ArrayXd& x, Eigen::Index i, Eigen::Index stride) {
  if (i - 4 * stride < 0 || i + 4 * stride >= x.size()) return false;
  const double h = x[i + stride] - x[i];
  for (int j = -4; j < 4; ++j) {
    const double hj = x[i + (j + 1) * stride] - x[i + j * stride];
    if (std::abs(hj - h) > 1e-9 * std::abs(h)) return false;
  }
  return true;
}

// max_i |y''(x_i) - q(x_i) y(x_i) - f(x_i)| over all stencil-usable nodes.
inline double ode_residual_max(const ArrayXd& x, const ArrayXcd& y, const ArrayXcd& q,
                               const ArrayXcd& f, Eigen::Index stride = 1) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!stencil_usable(x, i, stride)) continue;
    const Complex d2 = stencil_second_derivative<Complex>(x, y, i, stride);
    worst = std::max(worst, std::abs(d2 - q[i] * y[i] - f[i]));
  }
  return worst;
}

}  // namespace taillab

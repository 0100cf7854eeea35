#include "taillab/potential.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace taillab {
namespace {

// Plain dense polynomial in one variable, coefficient of u^i at c[i].
struct Poly {
  std::vector<double> c;

  double eval(double u) const {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  }
  Poly derivative() const {
    if (c.size() <= 1) return Poly{{0.0}};
    Poly d;
    d.c.resize(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d.c[i - 1] = c[i] * double(i);
    return d;
  }
};

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

// Smoothstep of order N: S(0)=0, S(1)=1, derivatives 1..N vanish at both ends.
// Polynomial of degree 2N+1.
Poly smoothstep_poly(int N) {
  Poly p;
  p.c.assign(2 * N + 2, 0.0);
  for (int k = 0; k <= N; ++k) {
    const double coef = binom(N + k, k) * binom(2 * N + 1, N - k) * ((k % 2) ? -1.0 : 1.0);
    p.c[N + 1 + k] = coef;
  }
  return p;
}

// (1 - u^2)^p expanded in monomials.
Poly bump_poly(int p) {
  Poly b;
  b.c.assign(2 * p + 1, 0.0);
  for (int i = 0; i <= p; ++i) b.c[2 * i] = binom(p, i) * ((i % 2) ? -1.0 : 1.0);
  return b;
}

// d^k/dx^k of x^{-alpha} for x > 0:  (-1)^k alpha (alpha+1)...(alpha+k-1) x^{-alpha-k}
double power_tail_deriv(double amplitude, double alpha, double x, int k) {
  double coef = amplitude;
  for (int i = 0; i < k; ++i) coef *= -(alpha + i);
  return coef * std::pow(x, -alpha - k);
}

// d^k/dx^k of |x|^{-alpha} for x < 0: all derivative factors come out positive
double power_tail_deriv_left(double amplitude, double alpha, double x, int k) {
  double coef = amplitude;
  for (int i = 0; i < k; ++i) coef *= (alpha + i);
  return coef * std::pow(-x, -alpha - k);
}

struct TailEval {
  const PotentialSpec& spec;
  bool plus;

  double deriv(double x, int k) const {
    switch (spec.family) {
      case PotentialFamily::PureInversePower:
        return plus ? power_tail_deriv(spec.v_plus, spec.m, x, k)
                    : power_tail_deriv_left(spec.v_minus, spec.m, x, k);
      case PotentialFamily::InversePowerSum: {
        double acc = 0.0;
        for (const auto& t : spec.sum_terms)
          acc += plus ? power_tail_deriv(t.coefficient, t.alpha, x, k)
                      : power_tail_deriv_left(t.coefficient, t.alpha, x, k);
        return acc;
      }
      case PotentialFamily::PowerPlusCorrection: {
        const double a = spec.m + spec.correction_delta;
        if (plus)
          return power_tail_deriv(spec.v_plus, spec.m, x, k) +
                 power_tail_deriv(spec.correction_coeff, a, x, k);
        return power_tail_deriv_left(spec.v_minus, spec.m, x, k) +
               power_tail_deriv_left(spec.correction_coeff, a, x, k);
      }
    }
    return 0.0;
  }
};

struct BridgeGeometry {
  double a_plus, a_minus;  // inner edges of the two transition zones
};

BridgeGeometry geometry(const PotentialSpec& spec) {
  return {spec.x_plus / 2.0, spec.x_minus / 2.0};
}

// Derivatives of the transition factor chi_plus (0 left of a_plus, 1 right of
// x_plus) and chi_minus (1 left of x_minus, 0 right of a_minus). The
// smoothstep is evaluated through its point symmetry S(u) = 1 - S(1-u) for
// u > 1/2, which keeps the huge alternating monomials from cancelling near
// the seams.
struct Transition {
  std::vector<Poly> s;  // s[k] = k-th derivative of the smoothstep polynomial

  explicit Transition(int N) {
    s.push_back(smoothstep_poly(N));
    for (int k = 1; k <= N + 2; ++k) s.push_back(s.back().derivative());
  }
  double deriv(double u, int k, double inv_width) const {
    if (k >= static_cast<int>(s.size())) return 0.0;
    double val;
    if (u <= 0.5) {
      val = s[k].eval(u);
    } else if (k == 0) {
      val = 1.0 - s[0].eval(1.0 - u);
    } else {
      val = ((k % 2) ? 1.0 : -1.0) * s[k].eval(1.0 - u);
    }
    return val * std::pow(inv_width, k);
  }
};

// smoothstep order per decay power; well above m+2 so the seams stay gentle
int bridge_order(int m) { return 2 * m + 6; }

const Transition& transition_for(int N) {
  static std::mutex mu;
  static std::map<int, Transition> cache;
  std::lock_guard<std::mutex> lock(mu);
  return cache.try_emplace(N, Transition(N)).first->second;
}

double bump_deriv(const PotentialSpec& spec, double x, int k) {
  if (spec.bump_amplitude == 0.0) return 0.0;
  const double u = (x - spec.bump_center) / spec.bump_halfwidth;
  if (std::abs(u) >= 1.0) return 0.0;
  Poly b = bump_poly(2 * spec.m + 8);
  for (int i = 0; i < k; ++i) b = b.derivative();
  return spec.bump_amplitude * b.eval(u) * std::pow(1.0 / spec.bump_halfwidth, k);
}

double side_deriv(const PotentialSpec& spec, double x, int k, bool plus) {
  const BridgeGeometry geo = geometry(spec);
  const TailEval tail{spec, plus};
  if (plus) {
    if (x <= geo.a_plus) return 0.0;
    if (x >= spec.x_plus) return tail.deriv(x, k);
    const double width = spec.x_plus - geo.a_plus;
    const Transition& tr = transition_for(bridge_order(spec.m));
    const double u = (x - geo.a_plus) / width;
    // Leibniz on chi(x) * tail(x)
    double acc = 0.0;
    for (int j = 0; j <= k; ++j)
      acc += binom(k, j) * tr.deriv(u, j, 1.0 / width) * tail.deriv(x, k - j);
    return acc;
  }
  if (x >= geo.a_minus) return 0.0;
  if (x <= spec.x_minus) return tail.deriv(x, k);
  const double width = geo.a_minus - spec.x_minus;
  const Transition& tr = transition_for(bridge_order(spec.m));
  const double u = (geo.a_minus - x) / width;  // increases toward the tail
  double acc = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double sign = (j % 2) ? -1.0 : 1.0;  // chain rule for u(x)
    acc += binom(k, j) * sign * tr.deriv(u, j, 1.0 / width) * tail.deriv(x, k - j);
  }
  return acc;
}

}  // namespace

void PotentialSpec::validate() const {
  if (m < 3) throw ValidationError("PotentialSpec: m must be an integer >= 3");
  if (!(x_plus >= 1.0)) throw ValidationError("PotentialSpec: x_plus must be >= 1");
  if (!(x_minus <= -1.0)) throw ValidationError("PotentialSpec: x_minus must be <= -1");
  if (family == PotentialFamily::InversePowerSum) {
    if (sum_terms.empty())
      throw ValidationError("PotentialSpec: InversePowerSum needs at least one term");
    for (const auto& t : sum_terms)
      if (!(t.alpha > 2.0))
        throw ValidationError("PotentialSpec: sum term exponents must exceed 2");
  }
  if (family == PotentialFamily::PowerPlusCorrection && !(correction_delta > 3.0))
    throw ValidationError("PotentialSpec: correction_delta must exceed 3");
  if (bump_amplitude != 0.0) {
    if (!(bump_halfwidth > 0.0))
      throw ValidationError("PotentialSpec: bump_halfwidth must be positive");
    if (bump_center - bump_halfwidth < x_minus || bump_center + bump_halfwidth > x_plus)
      throw ValidationError("PotentialSpec: bump support must lie inside [x_minus, x_plus]");
  }
}

PotentialSpec PotentialSpec::pure(int m, double v_plus, double v_minus, double x_plus,
                                  double x_minus) {
  PotentialSpec s;
  s.family = PotentialFamily::PureInversePower;
  s.m = m;
  s.v_plus = v_plus;
  s.v_minus = v_minus;
  s.x_plus = x_plus;
  s.x_minus = x_minus;
  s.validate();
  return s;
}

double evaluate(const PotentialSpec& spec, double x) { return derivative(spec, x, 0); }

double derivative(const PotentialSpec& spec, double x, int k) {
  if (k < 0 || k > spec.m + 2)
    throw ValidationError("derivative: order k must satisfy 0 <= k <= m+2");
  return side_deriv(spec, x, k, true) + side_deriv(spec, x, k, false) + bump_deriv(spec, x, k);
}

TailInfo dominant_tail(const PotentialSpec& spec, bool plus_side) {
  switch (spec.family) {
    case PotentialFamily::PureInversePower:
      return {double(spec.m), std::abs(plus_side ? spec.v_plus : spec.v_minus)};
    case PotentialFamily::InversePowerSum: {
      TailInfo best{spec.sum_terms.front().alpha, std::abs(spec.sum_terms.front().coefficient)};
      for (const auto& t : spec.sum_terms)
        if (t.alpha < best.exponent) best = {t.alpha, std::abs(t.coefficient)};
      return best;
    }
    case PotentialFamily::PowerPlusCorrection:
      return {double(spec.m), std::abs(plus_side ? spec.v_plus : spec.v_minus)};
  }
  return {double(spec.m), 1.0};
}

double sup_norm(const PotentialSpec& spec) {
  double worst = 0.0;
  const double lo = spec.x_minus - 2.0, hi = spec.x_plus + 2.0;
  const int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    worst = std::max(worst, std::abs(evaluate(spec, x)));
  }
  return worst;
}

}  // namespace taillab

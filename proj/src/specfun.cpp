#include "taillab/specfun.hpp"

#include <cmath>

namespace taillab::specfun {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr double kAsymptoticCrossover = 6.0;

double series_i(double nu, double x) {
  // I_nu(x) = sum_k (x/2)^{2k+nu} / (k! Gamma(nu+k+1))
  const double q = 0.25 * x * x;
  double term = std::pow(0.5 * x, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (double(k) * (nu + k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Uniform asymptotic tail sum_k a_k(nu) / (sign z)^k with
// a_k = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k); truncated at the
// smallest term.
double asymptotic_sum(double nu, double x, double sign) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0, prev = 1e300;
  for (int k = 1; k < 30; ++k) {
    term *= sign * (mu - double(2 * k - 1) * double(2 * k - 1)) / (8.0 * double(k) * x);
    if (std::abs(term) > prev) break;
    prev = std::abs(term);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double asymptotic_i(double nu, double x) {
  return std::exp(x) / std::sqrt(2.0 * M_PI * x) * asymptotic_sum(nu, x, -1.0);
}

double asymptotic_k(double nu, double x) {
  return std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) * asymptotic_sum(nu, x, +1.0);
}

double harmonic(int k) {
  double h = 0.0;
  for (int j = 1; j <= k; ++j) h += 1.0 / j;
  return h;
}

double series_k0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (double(k) * double(k));
    const double add = term * harmonic(k);
    sum += add;
    if (std::abs(add) < 1e-18 * (std::abs(sum) + 1.0)) break;
  }
  return -(std::log(0.5 * x) + kEulerGamma) * series_i(0.0, x) + sum;
}

double series_k1(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) term *= q / (double(k) * double(k + 1));
    const double psi_sum = -2.0 * kEulerGamma + harmonic(k) + harmonic(k + 1);
    const double add = term * psi_sum;
    sum += add;
    if (k > 2 && std::abs(add) < 1e-18 * (std::abs(sum) + 1.0)) break;
  }
  return std::log(0.5 * x) * series_i(1.0, x) + 1.0 / x - 0.25 * x * sum;
}

double k_integer(int n, double x) {
  if (n < 0) n = -n;
  const double k0 = series_k0(x);
  if (n == 0) return k0;
  const double k1 = series_k1(x);
  if (n == 1) return k1;
  double km = k0, kc = k1;
  for (int j = 1; j < n; ++j) {
    const double kn = km + 2.0 * double(j) / x * kc;
    km = kc;
    kc = kn;
  }
  return kc;
}

bool near_integer(double nu, int& n) {
  const double r = std::round(nu);
  if (std::abs(nu - r) < 1e-9) {
    n = static_cast<int>(r);
    return true;
  }
  return false;
}

}  // namespace

double bessel_i(double nu, double x) {
  if (!(x > 0.0)) throw ValidationError("bessel_i: argument must be positive");
  if (x > 700.0) throw ValidationError("bessel_i: argument too large");
  if (x >= 30.0) return asymptotic_i(nu, x);
  return series_i(nu, x);
}

double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw ValidationError("bessel_k: argument must be positive");
  nu = std::abs(nu);
  if (x >= kAsymptoticCrossover) return asymptotic_k(nu, x);
  int n;
  if (near_integer(nu, n)) return k_integer(n, x);
  // reflection; the sine factor stays away from 0 for the fractional orders
  // that arise here (nu = j/(m-2) style rationals)
  return 0.5 * M_PI * (series_i(-nu, x) - series_i(nu, x)) / std::sin(nu * M_PI);
}

double bessel_i_prime(double nu, double x) {
  return bessel_i(nu + 1.0, x) + nu / x * bessel_i(nu, x);
}

double bessel_k_prime(double nu, double x) {
  return -bessel_k(nu - 1.0, x) - nu / x * bessel_k(nu, x);
}

ZeroEnergyPair::ZeroEnergyPair(int m_) : m(m_), order(1.0 / (m_ - 2)) {
  if (m < 3) throw ValidationError("ZeroEnergyPair: m must be >= 3");
}

ZeroEnergySample ZeroEnergyPair::sample(double x) const {
  if (!(x > 0.0)) throw ValidationError("ZeroEnergyPair: x must be positive");
  const double nu = order;
  const double z = 2.0 * std::pow(x, 1.0 - 0.5 * m) / (m - 2);
  const double zp = -std::pow(x, -0.5 * m);
  const double c1 = std::pow(double(m - 2), nu) * std::tgamma(nu + 1.0);
  const double c2 = 2.0 * std::pow(double(m - 2), -nu) / std::tgamma(nu);
  const double sx = std::sqrt(x);
  const double iv = bessel_i(nu, z), ivp = bessel_i_prime(nu, z);
  const double kv = bessel_k(nu, z), kvp = bessel_k_prime(nu, z);
  ZeroEnergySample out;
  out.phi1 = c1 * sx * iv;
  out.phi1_prime = c1 * (0.5 / sx * iv + sx * ivp * zp);
  out.phi2 = c2 * sx * kv;
  out.phi2_prime = c2 * (0.5 / sx * kv + sx * kvp * zp);
  return out;
}

double phi1(int m, double x) { return ZeroEnergyPair(m).sample(x).phi1; }
double phi2(int m, double x) { return ZeroEnergyPair(m).sample(x).phi2; }
double phi1_prime(int m, double x) { return ZeroEnergyPair(m).sample(x).phi1_prime; }
double phi2_prime(int m, double x) { return ZeroEnergyPair(m).sample(x).phi2_prime; }

}  // namespace taillab::specfun

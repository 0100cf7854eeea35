#pragma once

#include "taillab/common.hpp"

namespace taillab::specfun {

// Modified Bessel functions for the argument/order ranges this project needs:
// order |nu| <= 3, argument x in (0, ~700). Power series below the crossover,
// large-argument asymptotic series above it.
double bessel_i(double nu, double x);
double bessel_k(double nu, double x);

double bessel_i_prime(double nu, double x);
double bessel_k_prime(double nu, double x);

struct ZeroEnergySample {
  double phi1, phi1_prime, phi2, phi2_prime;
};

// The two solutions of f''(x) = x^{-m} f(x) on x > 0, normalized so that
// phi1 -> 1 and phi2 ~ x as x -> infinity. Derivatives come from Bessel
// recurrences, not numerical differentiation.
struct ZeroEnergyPair {
  int m;
  double order;  // 1/(m-2)

  explicit ZeroEnergyPair(int m_);
  ZeroEnergySample sample(double x) const;
};

double phi1(int m, double x);
double phi2(int m, double x);
double phi1_prime(int m, double x);
double phi2_prime(int m, double x);

}  // namespace taillab::specfun

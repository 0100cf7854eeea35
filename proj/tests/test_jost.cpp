#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "taillab/grid.hpp"
#include "taillab/jost.hpp"
#include "taillab/quadrature.hpp"
#include "taillab/specfun.hpp"

using namespace taillab;

namespace {
const PotentialSpec kFree = PotentialSpec::pure(3, 0.0, 0.0);
const PotentialSpec kRepulsive3 = PotentialSpec::pure(3, 1.0, 1.0);
}  // namespace

TEST_CASE("frequency validation") {
  CHECK_THROWS_AS(Frequency(Complex(-0.1, 1.0)), ValidationError);
  CHECK_THROWS_AS(Frequency(Complex(0.0, 0.0)), ValidationError);
  CHECK_NOTHROW(Frequency(Complex(0.0, 2.0)));  // imaginary axis admitted
}

TEST_CASE("free space: s vanishes after one iteration, y is the pure exponential") {
  const Complex eps(0.8, 0.4);
  const LinePair pair = jost_pair_on_grid(kFree, Frequency(eps), -6.0, 6.0, 0.01);
  CHECK(pair.plus.picard_iterations == 1);
  CHECK(pair.plus.s.abs().maxCoeff() < 1e-13);
  CHECK(pair.minus.s.abs().maxCoeff() < 1e-13);
  // y_+ = e^{-eps x} everywhere, including the continued region
  double worst = 0.0;
  for (Eigen::Index i = 0; i < pair.core.size(); ++i) {
    const Eigen::Index k = find_node(pair.plus.grid, pair.core[i]);
    worst = std::max(worst, std::abs(pair.plus.y[k] - std::exp(-eps * pair.core[i])) /
                                std::abs(std::exp(-eps * pair.core[i])));
  }
  CHECK(worst < 1e-11);
  // W = 2 eps exactly
  CHECK(std::abs(pair.w - 2.0 * eps) < 1e-11);
}

TEST_CASE("residual invariant on both Jost solutions") {
  const Complex eps(0.5, 0.3);
  const LinePair pair = jost_pair_on_grid(kRepulsive3, Frequency(eps), -8.0, 8.0, 0.005);
  for (const JostSolution* sol : {&pair.plus, &pair.minus}) {
    const ResidualReport rep = jost_residual(*sol, kRepulsive3);
    CHECK(rep.residual_max < 1e-7 * rep.y_max);
  }
}

TEST_CASE("value and derivative are continuous at the cutoff") {
  const Complex eps(0.5, 0.3);
  JostSolution tail = solve_s(kRepulsive3, Frequency(eps), Side::Plus,
                              uniform_grid(1.0, 8.0, 0.005));
  const ArrayXd full = line_grid(kRepulsive3, -4.0, 8.0, 0.005);
  JostSolution ext = extend_to_line(tail, kRepulsive3, full);
  const Eigen::Index i_tail = find_node(tail.grid, 1.0);
  const Eigen::Index i_ext = find_node(ext.grid, 1.0);
  CHECK(std::abs(ext.y[i_ext] - tail.y[i_tail]) <= 1e-10 * std::abs(tail.y[i_tail]));
  CHECK(std::abs(ext.y_prime[i_ext] - tail.y_prime[i_tail]) <=
        1e-10 * std::abs(tail.y_prime[i_tail]));
}

TEST_CASE("Wronskian: x-constancy and large-eps boundedness") {
  for (const Complex eps : {Complex(2.0, 0.0), Complex(0.7, 1.1)}) {
    const LinePair pair = jost_pair_on_grid(kRepulsive3, Frequency(eps), -7.0, 7.0, 0.005);
    const ArrayXcd w = pair.w_profile;
    const Complex mean = w.mean();
    const double rel_std = std::sqrt((w - mean).abs2().mean()) / std::abs(mean);
    CHECK(rel_std < 1e-6);
  }
  // q3 = W - 2 eps stays bounded as eps grows
  std::vector<double> q3;
  for (double e : {2.0, 4.0, 8.0, 16.0}) {
    const LinePair pair = jost_pair_on_grid(kRepulsive3, Frequency(e), -7.0, 7.0, 0.002);
    q3.push_back(std::abs(pair.w - Complex(2.0 * e, 0.0)));
  }
  for (double v : q3) CHECK(v < 2.0 * (q3.front() + 0.05));
}

TEST_CASE("decay-bound shape of s in the tail, uniformly over eps") {
  // |s| (|eps|<x> + 1) <x>^{m-2} stays comparable to its value at x = 40
  for (const Complex eps : {Complex(1.0, 0.0), Complex(0.0, 2.0), Complex(0.5, 0.5)}) {
    JostSolution sol = solve_s(kRepulsive3, Frequency(eps), Side::Plus,
                               uniform_grid(1.0, 200.0, 0.01));
    const Eigen::Index ref = find_node(sol.grid, 40.0);
    auto weighted = [&](Eigen::Index i) {
      const double b = japanese_bracket(sol.grid[i]);
      return std::abs(sol.s[i]) * (std::abs(eps) * b + 1.0) * b;
    };
    const double c_ref = weighted(ref);
    for (Eigen::Index i = 0; i < sol.grid.size(); i += 50)
      CHECK(weighted(i) < 3.0 * c_ref);
  }
}

TEST_CASE("small-eps solutions agree with the zero-energy anchor") {
  JostSolution sol = solve_s(kRepulsive3, Frequency(1e-4), Side::Plus,
                             uniform_grid(1.0, 10.0, 0.01));
  CHECK(sol.anchor_deviation >= 0.0);  // check ran
  CHECK(sol.anchor_deviation < 0.10);
  // and the profile matches Phi_1 pointwise at small eps
  const Eigen::Index i = find_node(sol.grid, 5.0);
  CHECK(std::abs(sol.y[i] * std::exp(Complex(1e-4, 0) * 5.0) - specfun::phi1(3, 5.0)) < 5e-3);
}

TEST_CASE("conjugate symmetry in eps for real potentials") {
  const Complex eps(0.6, 0.9);
  const LinePair a = jost_pair_on_grid(kRepulsive3, Frequency(eps), -6.0, 6.0, 0.01);
  const LinePair b = jost_pair_on_grid(kRepulsive3, Frequency(std::conj(eps)), -6.0, 6.0, 0.01);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.plus.y.size(); i += 37)
    worst = std::max(worst,
                     std::abs(a.plus.y[i] - std::conj(b.plus.y[i])) / std::abs(a.plus.y[i]));
  CHECK(worst < 1e-10);
}

TEST_CASE("analyticity proxy: discrete Cauchy mean over a small circle") {
  const Complex center(0.8, 0.4);
  const double radius = 0.05;
  Complex mean = 0.0;
  const int n = 16;
  for (int k = 0; k < n; ++k) {
    const Complex eps = center + radius * std::exp(Complex(0.0, 2.0 * M_PI * k / n));
    mean += jost_pair_on_grid(kRepulsive3, Frequency(eps), -6.0, 6.0, 0.01).w;
  }
  mean /= double(n);
  const Complex w0 = jost_pair_on_grid(kRepulsive3, Frequency(center), -6.0, 6.0, 0.01).w;
  CHECK(std::abs(mean - w0) < 1e-6 * std::abs(w0));
}

TEST_CASE("spectral classification") {
  SpectralOptions opt;
  opt.scan_points = 40;

  // free space: W = 2 eps, W(0) = 0 is the free-resonance edge case
  const SpectralCheck free_check = check_spectral_assumptions(kFree, opt);
  CHECK(free_check.result == SpectralCheck::Result::Resonance);

  // repulsive tails with a nonnegative bridge admit no bound states
  const SpectralCheck rep = check_spectral_assumptions(kRepulsive3, opt);
  CHECK(rep.result == SpectralCheck::Result::Ok);
  CHECK(rep.bound_state_eps.empty());

  // a deep attractive well traps a mode; the zero of W is located
  PotentialSpec well = kRepulsive3;
  well.bump_amplitude = -10.0;
  well.validate();
  const SpectralCheck trapped = check_spectral_assumptions(well, opt);
  CHECK(trapped.result == SpectralCheck::Result::BoundState);
  REQUIRE(!trapped.bound_state_eps.empty());
  CHECK(trapped.bound_state_eps.front() > 0.0);
  // located zero: W flips sign across it
  const double e0 = trapped.bound_state_eps.front();
  const double below =
      jost_pair_on_grid(well, Frequency(e0 * 0.9), -5.0, 5.0, 0.01).w.real();
  const double above =
      jost_pair_on_grid(well, Frequency(e0 * 1.1), -5.0, 5.0, 0.01).w.real();
  CHECK(below * above < 0.0);
}

TEST_CASE("non-contracting iteration is reported") {
  const PotentialSpec strong = PotentialSpec::pure(3, 400.0, 400.0);
  CHECK_THROWS_AS(
      solve_s(strong, Frequency(0.5), Side::Plus, uniform_grid(1.0, 5.0, 0.01)),
      NumericError);
}

TEST_CASE("interface misuse is rejected") {
  JostSolution tail = solve_s(kRepulsive3, Frequency(1.0), Side::Plus,
                              uniform_grid(1.0, 4.0, 0.01));
  // full grid with a node that is not in the tail solution
  ArrayXd bad(3);
  bad << -1.0, 0.5, 1.0037;
  CHECK_THROWS_AS(extend_to_line(tail, kRepulsive3, bad), ValidationError);

  JostSolution other = solve_s(kRepulsive3, Frequency(2.0), Side::Minus,
                               uniform_grid(-4.0, -1.0, 0.01));
  CHECK_THROWS_AS(wronskian(tail, other), ValidationError);

  CHECK_THROWS_AS(
      solve_s(kRepulsive3, Frequency(1.0), Side::Plus, uniform_grid(0.2, 4.0, 0.01)),
      ValidationError);
}

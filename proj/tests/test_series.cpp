#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "taillab/grid.hpp"
#include "taillab/quadrature.hpp"
#include "taillab/series.hpp"
#include "taillab/specfun.hpp"

using namespace taillab;
using namespace taillab::series;

TEST_CASE("seed term is exact") {
  const auto ray = build_ray(3, 1.0, 0.0, 8.0, 0, 1e-3);
  for (Eigen::Index i = 0; i < ray.rho.size(); i += 101) {
    const double tau = ray.rho[i];
    CHECK(std::abs(ray.fj[0][i] - Complex(tau * tau / 2.0, 0.0)) < 1e-14 * (1 + tau * tau));
  }
}

TEST_CASE("first recurrence step against the small-tau Taylor oracle") {
  // F_3 = P^3 [ F_2 / (tau (tau+2)) ] with F_2 = tau^2/2 for m = 3:
  // F_2/(tau(tau+2)) = (tau/4) sum_k (-tau/2)^k, so
  // F_3 = sum_k (1/4)(-1/2)^k tau^{k+4} / ((k+2)(k+3)(k+4))
  const auto ray = build_ray(3, 1.0, 0.0, 1.0, 1, 1e-4);
  auto oracle = [](double tau) {
    double acc = 0.0, pw = tau * tau * tau * tau;
    for (int k = 0; k < 24; ++k) {
      acc += 0.25 * std::pow(-0.5, k) * pw / ((k + 2.0) * (k + 3.0) * (k + 4.0));
      pw *= tau;
    }
    return acc;
  };
  for (double tau : {0.05, 0.2, 0.5}) {
    const Eigen::Index i = find_node(ray.rho, tau, 1e-9);
    REQUIRE(i >= 0);
    CHECK(std::abs(ray.fj[1][i] - Complex(oracle(tau), 0.0)) < 1e-10 * std::abs(oracle(tau)));
  }
}

TEST_CASE("factorial bound holds along the three rays") {
  for (int m : {3, 4}) {
    for (double theta : {0.0, M_PI / 3.0, 2.0 * M_PI / 3.0}) {
      const auto ray = build_ray(m, 1.0, theta, 50.0, 6, 2e-3, 1.002);
      for (std::size_t k = 0; k < ray.fj.size(); ++k) {
        const int j = ray.j_of(static_cast<int>(k));
        double worst = 0.0;
        for (Eigen::Index i = 1; i < ray.rho.size(); i += 7)
          worst = std::max(worst,
                           std::abs(ray.fj[k][i]) / factorial_bound(j, m, ray.rho[i]));
        CHECK(worst <= 1.0);
      }
    }
  }
}

TEST_CASE("differential form of the recurrence holds at interior tau") {
  // tau (tau+2) F_{j+1}^{(m)} = F_j, m-th derivative by stencil
  for (int m : {3, 4}) {
    const double h = 0.01;
    const auto ray = build_ray(m, 1.0, 0.0, 10.0, 3, h, 1.0 + 1e-9);
    for (std::size_t k = 0; k + 1 < ray.fj.size(); ++k) {
      for (double tau : {2.0, 5.0, 8.0}) {
        const Eigen::Index i = find_node(ray.rho, tau, 1e-7);
        REQUIRE(i >= 0);
        Complex dm;
        if (m == 3) {
          // centered 3rd derivative, O(h^4)
          auto f = [&](int o) { return ray.fj[k + 1][i + o]; };
          dm = (f(-3) - 8.0 * f(-2) + 13.0 * f(-1) - 13.0 * f(1) + 8.0 * f(2) - f(3)) /
               (8.0 * h * h * h);
        } else {
          // centered 4th derivative, O(h^4)
          auto f = [&](int o) { return ray.fj[k + 1][i + o]; };
          dm = (-f(-3) + 12.0 * f(-2) - 39.0 * f(-1) + 56.0 * f(0) - 39.0 * f(1) +
                12.0 * f(2) - f(3)) /
               (6.0 * h * h * h * h);
        }
        const Complex lhs = tau * (tau + 2.0) * dm;
        CHECK(std::abs(lhs - ray.fj[k][i]) < 1e-5 * std::abs(ray.fj[k][i]));
      }
    }
  }
}

TEST_CASE("rays near the pole are rejected") {
  const auto ray = build_ray(3, 1.0, 0.0, 2.0, 0, 1e-3);
  CHECK_THROWS_AS(recurrence_step(ray.rho, M_PI - 0.05, ray.fj[0], 3), ValidationError);
}

TEST_CASE("dual-space reconstruction agrees with the direct tail solver") {
  const PotentialSpec spec = PotentialSpec::pure(3, 1.0, 1.0);
  const double x = 20.0, eps = 0.02;
  const Complex via_series = reconstruct_s(spec, eps, x);
  const JostSolution direct =
      solve_s(spec, Frequency(eps), Side::Plus, uniform_grid(x, x + 1.0, 5e-3));
  const Complex via_jost = direct.s[0];
  CHECK(std::abs(via_series - via_jost) < 0.01 * std::abs(via_jost));
}

TEST_CASE("reconstruction tends to the zero-energy profile") {
  const PotentialSpec spec = PotentialSpec::pure(3, 1.0, 1.0);
  const double x = 5.0;
  const Complex s_small = reconstruct_s(spec, 3e-5, x);
  const double ref = specfun::phi1(3, x) - 1.0;  // y_+(x; 0) = Phi_1(x)
  CHECK(std::abs(s_small - ref) < 0.01 * std::abs(ref));
}

TEST_CASE("leading order is linear in the tail amplitude") {
  const PotentialSpec a = PotentialSpec::pure(3, 1e-6, 1e-6);
  const PotentialSpec b = PotentialSpec::pure(3, 2e-6, 2e-6);
  const ArrayXd probe = uniform_grid(3.0, 4.0, 0.01);
  const Complex sa = solve_s(a, Frequency(0.5), Side::Plus, probe).s[0];
  const Complex sb = solve_s(b, Frequency(0.5), Side::Plus, probe).s[0];
  CHECK(std::abs(sb / sa - 2.0) < 1e-4);
}

TEST_CASE("validity preconditions of the reconstruction") {
  const PotentialSpec spec = PotentialSpec::pure(3, 1.0, 1.0);
  CHECK_THROWS_AS(reconstruct_s(spec, 0.2, 20.0), ValidationError);  // eps x > 1
  CHECK_THROWS_AS(reconstruct_s(spec, -0.01, 20.0), ValidationError);
  CHECK_THROWS_AS(reconstruct_s(spec, 0.01, 0.5), ValidationError);  // x < x_plus
}

TEST_CASE("small-eps coefficients reach their large-x limits") {
  std::vector<double> eps_grid;
  for (int i = 0; i < 16; ++i)
    eps_grid.push_back(1e-4 * std::pow(30.0, i / 15.0));

  const PotentialSpec m3 = PotentialSpec::pure(3, 1.0, 1.0);
  const HCoefficients h3 = extract_h_coefficients(m3, 100.0, eps_grid);
  CHECK(std::abs(h3.h1 - 1.0) < 0.10);  // -(-2)^{m-2}/Gamma(m) = 1 for m = 3

  const PotentialSpec m4 = PotentialSpec::pure(4, 1.0, 1.0);
  const HCoefficients h4 = extract_h_coefficients(m4, 100.0, eps_grid);
  CHECK(std::abs(h4.h1 - (-2.0 / 3.0)) < 0.10 * (2.0 / 3.0));

  // h2 scales like x at large x: compare x = 100 and x = 200
  const HCoefficients h3b = extract_h_coefficients(m3, 200.0, eps_grid);
  const double ratio_a = h3.h2_log_eps_x / 100.0, ratio_b = h3b.h2_log_eps_x / 200.0;
  CHECK(std::abs(ratio_b / ratio_a - 1.0) < 0.15);

  // invariance under the choice of log-spaced grid
  std::vector<double> alt;
  for (int i = 0; i < 12; ++i) alt.push_back(1.5e-4 * std::pow(15.0, i / 11.0));
  const HCoefficients h3alt = extract_h_coefficients(m3, 100.0, alt);
  CHECK(std::abs(h3alt.h1 - h3.h1) < 0.05 * std::abs(h3.h1) + h3.fit_residual + 0.02);

  CHECK_THROWS_AS(extract_h_coefficients(m3, 100.0, {1e-3, 2e-3}), ValidationError);
}

TEST_CASE("Laplace tail integrals and their expansions") {
  // elementary case: n = 0, l = 0 -> e^{-3 w}/w
  for (double w : {0.03, 0.4, 1.0})
    CHECK(nm0_integral(0, 0, w) == doctest::Approx(std::exp(-3.0 * w) / w).epsilon(1e-9));

  // expansion coefficients fixed by the Gamma-integral formula
  CHECK(nm0_expansion(0, 1).coefficient(-1.0, 1) == doctest::Approx(-1.0));
  CHECK(nm0_expansion(-1, 0).coefficient(0.0, 1) == doctest::Approx(-1.0));
  CHECK(nm0_expansion(-2, 0).coefficient(1.0, 1) == doctest::Approx(1.0));

  // quadrature confirms the leading log coefficients
  {
    const double w = 1e-3;
    const LogPolySeries exp01 = nm0_expansion(0, 1);
    const double c0 = exp01.coefficient(-1.0, 0);
    const double extracted = (nm0_integral(0, 1, w) * w - c0) / std::log(w);
    CHECK(std::abs(extracted - (-1.0)) < 0.01);
  }
  {
    const double w = 1e-4;
    const LogPolySeries expm1 = nm0_expansion(-1, 0);
    const double c0 = expm1.coefficient(0.0, 0);
    const double extracted = (nm0_integral(-1, 0, w) - c0) / std::log(w);
    CHECK(std::abs(extracted - (-1.0)) < 0.02);
  }

  // full singular part tracks the quadrature up to the bounded remainder
  const double w = 1e-3;
  CHECK(std::abs(nm0_integral(0, 2, w) - nm0_expansion(0, 2).eval(w)) < 5.0);

  CHECK_THROWS_AS(nm0_integral(-3, 0, 0.5), ValidationError);
  CHECK_THROWS_AS(nm0_integral(0, 0, 2.0), ValidationError);
}

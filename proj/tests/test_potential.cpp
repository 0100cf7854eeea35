#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "taillab/potential.hpp"

using namespace taillab;

TEST_CASE("pure family: exact tail values") {
  const PotentialSpec spec = PotentialSpec::pure(3, 1.0, 2.0);
  CHECK(evaluate(spec, 10.0) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(evaluate(spec, -10.0) == doctest::Approx(2e-3).epsilon(1e-14));
  // continuity at the cutoff
  CHECK(evaluate(spec, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(evaluate(spec, 1.0 - 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  // exact tail on a grid outside the bridge
  for (double x = 1.0; x < 50.0; x += 0.37)
    CHECK(evaluate(spec, x) == doctest::Approx(std::pow(x, -3.0)).epsilon(1e-14));
}

TEST_CASE("derivatives: identity, closed form, finite differences") {
  const PotentialSpec spec = PotentialSpec::pure(3, 1.0, 1.0);
  CHECK(derivative(spec, 10.0, 1) == doctest::Approx(-3e-4).epsilon(1e-12));
  CHECK(derivative(spec, 7.3, 0) == evaluate(spec, 7.3));
  CHECK_THROWS_AS(derivative(spec, 1.0, spec.m + 3), ValidationError);

  // k = 2 at x = 20 against a central difference of evaluate
  const double h = 1e-3;
  const double fd =
      (evaluate(spec, 20.0 + h) - 2.0 * evaluate(spec, 20.0) + evaluate(spec, 20.0 - h)) /
      (h * h);
  CHECK(derivative(spec, 20.0, 2) == doctest::Approx(fd).epsilon(1e-6));

  // each order against a central difference of the previous one, across the
  // whole line including the bridge
  const double hf = 1e-4;
  for (int k = 1; k <= spec.m + 2; ++k) {
    for (double x = -50.0; x <= 50.0; x += 1.7) {
      const double d = derivative(spec, x, k);
      const double fd2 =
          (derivative(spec, x + hf, k - 1) - derivative(spec, x - hf, k - 1)) / (2.0 * hf);
      const double scale = std::max({std::abs(d), std::abs(fd2), 1e-8});
      CHECK(std::abs(d - fd2) / scale < 1e-5);
    }
  }
}

TEST_CASE("bridge keeps V smooth to order m+2 at the cutoffs") {
  for (int m : {3, 4}) {
    const PotentialSpec spec = PotentialSpec::pure(m, 1.0, -0.7);
    const double h = 1e-4;
    for (double cut : {spec.x_plus, spec.x_minus, spec.x_plus / 2, spec.x_minus / 2}) {
      for (int k = 0; k <= m + 2; ++k) {
        // slope-cancelling discontinuity estimate: 2 d(h) - d(2h) -> jump + O(h^3)
        const double d1 = derivative(spec, cut + h, k) - derivative(spec, cut - h, k);
        const double d2 = derivative(spec, cut + 2 * h, k) - derivative(spec, cut - 2 * h, k);
        CHECK(std::abs(2.0 * d1 - d2) < 10.0 * h);
      }
    }
  }
}

TEST_CASE("decay envelope |V^(k)| <= C <x>^{-m-k}") {
  const PotentialSpec spec = PotentialSpec::pure(3, 1.0, 1.0);
  for (int k = 0; k <= 2; ++k) {
    double c_tail = 0.0, c_global = 0.0;
    for (double x = -60.0; x <= 60.0; x += 0.1) {
      const double weighted =
          std::abs(derivative(spec, x, k)) * std::pow(japanese_bracket(x), spec.m + k);
      c_global = std::max(c_global, weighted);
      if (x >= spec.x_plus || x <= spec.x_minus) c_tail = std::max(c_tail, weighted);
    }
    CHECK(c_tail < 150.0);   // tail constants are the exact power-law factors
    CHECK(c_global < 2000.0); // the bridge only inflates the envelope by a bounded factor
  }
}

TEST_CASE("inverse-power sum family matches the sum in the tail") {
  PotentialSpec spec;
  spec.family = PotentialFamily::InversePowerSum;
  spec.m = 3;
  spec.sum_terms = {{2.5, 1.0}, {4.0, -0.3}};
  spec.validate();
  for (double x : {1.5, 3.0, 17.0}) {
    const double ref = std::pow(x, -2.5) - 0.3 * std::pow(x, -4.0);
    CHECK(evaluate(spec, x) == doctest::Approx(ref).epsilon(1e-14));
    CHECK(evaluate(spec, -x) == doctest::Approx(ref).epsilon(1e-14));
  }
  CHECK(dominant_tail(spec, true).exponent == doctest::Approx(2.5));
}

TEST_CASE("correction family adds the steeper tail term") {
  PotentialSpec spec;
  spec.family = PotentialFamily::PowerPlusCorrection;
  spec.m = 3;
  spec.correction_delta = 3.5;
  spec.correction_coeff = 0.4;
  spec.validate();
  const double x = 5.0;
  CHECK(evaluate(spec, x) ==
        doctest::Approx(std::pow(x, -3.0) + 0.4 * std::pow(x, -6.5)).epsilon(1e-14));
}

TEST_CASE("middle bump: value, smooth edges, support validation") {
  PotentialSpec spec = PotentialSpec::pure(3, 1.0, 1.0);
  spec.bump_amplitude = -10.0;
  spec.validate();
  CHECK(evaluate(spec, 0.0) == doctest::Approx(-10.0 + evaluate(PotentialSpec::pure(3, 1, 1), 0.0))
                                   .epsilon(1e-12));
  // smooth at the bump edge (the bump is flat well beyond order m+2 there)
  const double h = 1e-4;
  for (int k = 0; k <= spec.m + 2; ++k) {
    const double d1 = derivative(spec, 1.0 + h, k) - derivative(spec, 1.0 - h, k);
    const double d2 = derivative(spec, 1.0 + 2 * h, k) - derivative(spec, 1.0 - 2 * h, k);
    CHECK(std::abs(2.0 * d1 - d2) < 10.0 * h);
  }

  PotentialSpec bad = spec;
  bad.bump_halfwidth = 3.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(PotentialSpec::pure(2, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(PotentialSpec::pure(3, 1.0, 1.0, 0.5), ValidationError);
  CHECK_THROWS_AS(PotentialSpec::pure(3, 1.0, 1.0, 1.0, -0.5), ValidationError);
  PotentialSpec sum;
  sum.family = PotentialFamily::InversePowerSum;
  sum.sum_terms = {{1.5, 1.0}};
  CHECK_THROWS_AS(sum.validate(), ValidationError);
}

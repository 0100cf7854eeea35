#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "taillab/initial_data.hpp"
#include "taillab/timedomain.hpp"

using namespace taillab;
using namespace taillab::timedomain;

namespace {
const PotentialSpec kFree = PotentialSpec::pure(3, 0.0, 0.0);
const PotentialSpec kRepulsive3 = PotentialSpec::pure(3, 1.0, 1.0);

SimulationConfig small_config(double T, double h = 0.01) {
  SimulationConfig c;
  c.half_width = T + 14.0;
  c.h = h;
  c.final_time = T;
  c.support_radius = 12.5;
  c.recorders = {0.0, 3.0};
  return c;
}
}  // namespace

TEST_CASE("free evolution follows d'Alembert") {
  // psi0 bump, psi1 = 0: two half-amplitude traveling bumps
  const auto ts = leapfrog_solve(kFree, gaussian(0.0, 1.0, 1.0), [](double) { return 0.0; },
                                 small_config(5.0));
  double worst = 0.0;
  for (Eigen::Index n = 0; n < ts.t.size(); n += 50) {
    for (std::size_t r = 0; r < ts.recorders.size(); ++r) {
      const double x0 = ts.recorders[r], t = ts.t[n];
      const double ref = 0.5 * (std::exp(-(x0 - t) * (x0 - t)) + std::exp(-(x0 + t) * (x0 + t)));
      worst = std::max(worst, std::abs(ts.psi[r][n] - ref));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("second-order self-convergence") {
  auto run = [](double h) {
    return leapfrog_solve(kRepulsive3, gaussian(0.0, 1.0, 1.0), [](double) { return 0.0; },
                          small_config(4.0, h));
  };
  const auto coarse = run(0.04), mid = run(0.02), fine = run(0.01);
  // compare at the common final time against the finest run
  auto err = [&](const TimeSeries& a) {
    double w = 0.0;
    const Eigen::Index n = a.t.size() - 1;
    const Eigen::Index nf = fine.t.size() - 1;
    w = std::max(w, std::abs(a.psi[0][n] - fine.psi[0][nf]));
    return w;
  };
  const double e_coarse = err(coarse), e_mid = err(mid);
  CHECK(e_coarse / e_mid > 3.0);
  CHECK(e_coarse / e_mid < 5.5);
}

TEST_CASE("energy drift stays small for a repulsive potential") {
  const auto ts = leapfrog_solve(kRepulsive3, gaussian(0.0, 1.2, 1.0),
                                 gaussian(1.0, 0.8, 0.5), small_config(50.0, 0.02));
  CHECK(ts.energy_drift < 1e-4);
}

TEST_CASE("light cone: nothing reaches a recorder outside support + t") {
  SimulationConfig c = small_config(12.0, 0.02);
  c.half_width = 60.0;
  c.recorders = {40.0};
  const auto ts = leapfrog_solve(kRepulsive3, [](double) { return 0.0; },
                                 gaussian(0.0, 0.5, 1.0), c);
  CHECK(ts.psi[0].abs().maxCoeff() < 1e-12);
}

TEST_CASE("leapfrog is time-reversible") {
  const double h = 0.02, k = 0.9 * h, L = 30.0;
  const Eigen::Index N = 2 * static_cast<Eigen::Index>(std::round(L / h)) + 1;
  ArrayXd V(N), prev(N), cur(N);
  auto bump = gaussian(0.0, 1.0, 1.0);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double x = -L + h * i;
    V[i] = evaluate(kRepulsive3, x);
    prev[i] = bump(x);
  }
  // symmetric start: one explicit half-history step with psi1 = 0
  cur = prev;
  cur.segment(1, N - 2) +=
      0.5 * k * k *
      ((prev.segment(2, N - 2) - 2.0 * prev.segment(1, N - 2) + prev.segment(0, N - 2)) /
           (h * h) -
       V.segment(1, N - 2) * prev.segment(1, N - 2));
  const ArrayXd snapshot0 = prev;
  leapfrog_steps(V, prev, cur, 500, h, k);
  // reverse: swap the two stored levels and march back
  std::swap(prev, cur);
  leapfrog_steps(V, prev, cur, 500, h, k);
  CHECK((cur - snapshot0).abs().maxCoeff() < 1e-6);
}

TEST_CASE("decay fit on synthetic power laws") {
  ArrayXd t(200), clean(200), corrected(200);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    t[i] = 20.0 + 3.0 * i;
    clean[i] = 7.0 * std::pow(t[i], -3.0);
    corrected[i] = std::pow(t[i], -3.0) * (1.0 + 5.0 / t[i]);
  }
  const DecayReport a = decay_fit(t, clean, 25.0, 600.0);
  CHECK(a.exponent == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(a.amplitude == doctest::Approx(7.0).epsilon(1e-6));
  CHECK(a.exponent_stderr < 1e-6);

  const DecayReport b = decay_fit(t, corrected, 50.0, 500.0);
  CHECK(b.exponent > 2.9);
  CHECK(b.exponent < 3.0);
  // the window further right is closer to the clean exponent
  const DecayReport c = decay_fit(t, corrected, 200.0, 600.0);
  CHECK(std::abs(c.exponent - 3.0) < std::abs(b.exponent - 3.0));

  // oscillatory contamination is reported
  ArrayXd wavy = clean;
  for (Eigen::Index i = 0; i < t.size(); ++i) wavy[i] *= std::cos(0.1 * t[i]);
  CHECK_THROWS_AS(decay_fit(t, wavy, 25.0, 600.0), NumericError);
}

TEST_CASE("sine and cosine evolutions separate by one power") {
  SimulationConfig c;
  c.half_width = 175.0;
  c.h = 0.05;
  c.final_time = 150.0;
  c.support_radius = 13.0;
  c.recorders = {0.0};

  const auto sine = leapfrog_solve(kRepulsive3, [](double) { return 0.0; },
                                   gaussian(0.0, 1.0, 1.0), c);
  const DecayReport ds = decay_fit(sine.t, sine.psi[0], 30.0, 140.0);
  CHECK(std::abs(ds.exponent - 3.0) < 0.5);

  const auto cosine = leapfrog_solve(kRepulsive3, gaussian(0.0, 1.0, 1.0),
                                     [](double) { return 0.0; }, c);
  const DecayReport dc = decay_fit(cosine.t, cosine.psi[0], 30.0, 140.0);
  CHECK(std::abs(dc.exponent - 4.0) < 0.6);
}

TEST_CASE("Duhamel iteration: free case converges immediately") {
  DuhamelOptions opt;
  opt.hx = 0.05;
  opt.support_radius = 13.0;
  const auto res = duhamel_solve(kFree, [](double) { return 0.0; },
                                 gaussian(0.0, 1.0, 1.0), 4.0, opt);
  CHECK(res.increments.size() <= 2);  // V-term vanishes
  const double ref = 0.5 * std::sqrt(M_PI) * std::erf(2.0);
  CHECK(std::abs(res.at(0.0, 4.0) - ref) < 1e-3);
}

TEST_CASE("Duhamel iteration: contraction bound and oracle agreement") {
  DuhamelOptions opt;
  opt.hx = 0.05;
  opt.support_radius = 13.0;
  const auto res = duhamel_solve(kRepulsive3, [](double) { return 0.0; },
                                 gaussian(0.0, 1.0, 1.0), 10.0, opt);
  // observed contraction never exceeds 2 ||V||_inf / nu^2
  for (std::size_t i = 1; i < res.increments.size(); ++i)
    CHECK(res.increments[i] / res.increments[i - 1] <= res.contraction_bound * 1.05);

  SimulationConfig c = small_config(10.0, 0.0125);
  const auto ts = leapfrog_solve(kRepulsive3, [](double) { return 0.0; },
                                 gaussian(0.0, 1.0, 1.0), c);
  auto at_time = [&](double t0) {
    Eigen::Index n = 0;
    while (n + 2 < ts.t.size() && ts.t[n + 1] <= t0) ++n;
    const double w = (t0 - ts.t[n]) / (ts.t[n + 1] - ts.t[n]);
    return (1.0 - w) * ts.psi[0][n] + w * ts.psi[0][n + 1];
  };
  for (double t0 : {2.0, 5.0, 10.0})
    CHECK(std::abs(res.at(0.0, t0) - at_time(t0)) < 1e-3);

  // nu below the threshold diverges and is reported
  DuhamelOptions low = opt;
  low.nu = 0.2 * std::sqrt(2.0 * sup_norm(kRepulsive3));
  CHECK_THROWS_AS(duhamel_solve(kRepulsive3, [](double) { return 0.0; },
                                gaussian(0.0, 1.0, 1.0), 10.0, low),
                  NumericError);
}

TEST_CASE("configuration validation") {
  SimulationConfig c;
  c.half_width = 10.0;
  c.final_time = 20.0;
  c.support_radius = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);  // light cone violated
  c.final_time = 5.0;
  c.courant = 1.1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

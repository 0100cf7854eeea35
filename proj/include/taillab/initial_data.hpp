#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "taillab/common.hpp"

namespace taillab {

// Smooth effectively-compact initial data profiles. Gaussians are cut at
// kCutSigmas standard deviations, far below double precision, so the support
// radius is finite for light-cone bookkeeping.
struct InitialData {
  std::function<double(double)> psi0 = [](double) { return 0.0; };
  std::function<double(double)> psi1 = [](double) { return 0.0; };
  double support_radius = 0.0;
};

inline constexpr double kCutSigmas = 12.0;

inline std::function<double(double)> gaussian(double center, double width, double amplitude) {
  return [=](double x) {
    const double u = (x - center) / width;
    if (std::abs(u) > kCutSigmas) return 0.0;
    return amplitude * std::exp(-u * u);
  };
}

// Sum of a few Gaussians with seeded random centers/widths/amplitudes inside
// |x| <= radius; deterministic per seed.
inline std::function<double(double)> random_bump(std::uint64_t seed, double radius,
                                                 int components = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uc(-0.5 * radius, 0.5 * radius);
  std::uniform_real_distribution<double> uw(0.6, 1.6);
  std::uniform_real_distribution<double> ua(0.3, 1.0);
  std::vector<std::array<double, 3>> parts;
  for (int i = 0; i < components; ++i) parts.push_back({uc(rng), uw(rng), ua(rng)});
  return [parts](double x) {
    double acc = 0.0;
    for (const auto& p : parts) {
      const double u = (x - p[0]) / p[1];
      if (std::abs(u) <= kCutSigmas) acc += p[2] * std::exp(-u * u);
    }
    return acc;
  };
}

inline double gaussian_support_radius(double center, double width) {
  return std::abs(center) + kCutSigmas * width;
}

}  // namespace taillab

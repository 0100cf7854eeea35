#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace taillab {

using Complex = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::ArrayXd;

inline constexpr const char* kVersion = "0.1.0";

// Thrown when inputs violate a documented precondition (CLI exit code 2).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when the potential fails the spectral admissibility check (exit code 3).
class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an iteration or quadrature fails to converge (exit code 4).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

}  // namespace taillab

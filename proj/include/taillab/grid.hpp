#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "taillab/common.hpp"

namespace taillab {

// Closed uniform grid over [a, b]; the step is adjusted down so both ends land
// exactly on nodes.
inline ArrayXd uniform_grid(double a, double b, double h) {
  if (!(b > a) || !(h > 0)) throw ValidationError("uniform_grid: need b > a and h > 0");
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-12)));
  ArrayXd g(n + 1);
  const double step = (b - a) / n;
  for (int i = 0; i <= n; ++i) g[i] = a + step * i;
  g[n] = b;
  return g;
}

// Geometrically spaced nodes (from, to]; spacing of successive nodes grows by
// `ratio` starting from `h0`.
inline ArrayXd geometric_extension(double from, double to, double h0, double ratio) {
  if (!(to > from) || !(h0 > 0) || !(ratio > 1.0))
    throw ValidationError("geometric_extension: bad parameters");
  std::vector<double> pts;
  double x = from, h = h0;
  while (x < to) {
    x = std::min(x + h, to);
    pts.push_back(x);
    h *= ratio;
  }
  return Eigen::Map<const ArrayXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
}

inline ArrayXd concat(const ArrayXd& a, const ArrayXd& b) {
  ArrayXd out(a.size() + b.size());
  out.head(a.size()) = a;
  out.tail(b.size()) = b;
  return out;
}

inline ArrayXd reversed_negated(const ArrayXd& g) {
  ArrayXd out(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) out[i] = -g[g.size() - 1 - i];
  return out;
}

// Index of the node equal to x (within tol); -1 if absent.
inline Eigen::Index find_node(const ArrayXd& g, double x, double tol = 1e-9) {
  const double* lo = std::lower_bound(g.data(), g.data() + g.size(), x - tol);
  if (lo == g.data() + g.size()) return -1;
  const Eigen::Index i = lo - g.data();
  return std::abs(g[i] - x) <= tol ? i : -1;
}

inline bool strictly_increasing(const ArrayXd& g) {
  for (Eigen::Index i = 0; i + 1 < g.size(); ++i)
    if (!(g[i + 1] > g[i])) return false;
  return g.size() > 0;
}

}  // namespace taillab

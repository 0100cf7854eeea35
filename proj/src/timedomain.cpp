#include "taillab/timedomain.hpp"

#include <cmath>
#include <sstream>

#include "taillab/grid.hpp"
#include "taillab/quadrature.hpp"

namespace taillab::timedomain {

void SimulationConfig::validate() const {
  if (!(h > 0) || !(courant > 0) || !(courant < 1))
    throw ValidationError("SimulationConfig: need h > 0 and Courant ratio in (0, 1)");
  if (!(final_time > 0)) throw ValidationError("SimulationConfig: final_time must be positive");
  if (!(half_width > support_radius + final_time))
    throw ValidationError(
        "SimulationConfig: light-cone safety requires L > support_radius + final_time");
  for (double r : recorders)
    if (std::abs(r) > half_width)
      throw ValidationError("SimulationConfig: recorder outside the domain");
}

void leapfrog_steps(const ArrayXd& V, ArrayXd& prev, ArrayXd& cur, int n, double h, double k) {
  const Eigen::Index N = cur.size();
  const double r2 = k * k / (h * h);
  ArrayXd next = ArrayXd::Zero(N);
  for (int step = 0; step < n; ++step) {
    auto c = cur.segment(1, N - 2);
    next.segment(1, N - 2) = 2.0 * c - prev.segment(1, N - 2) +
                             r2 * (cur.segment(2, N - 2) - 2.0 * c + cur.segment(0, N - 2)) -
                             (k * k) * V.segment(1, N - 2) * c;
    next[0] = 0.0;
    next[N - 1] = 0.0;
    prev.swap(cur);
    cur.swap(next);
  }
}

TimeSeries leapfrog_solve(const PotentialSpec& spec, const std::function<double(double)>& psi0,
                          const std::function<double(double)>& psi1,
                          const SimulationConfig& config) {
  spec.validate();
  config.validate();
  const double L = config.half_width, h = config.h;
  const double k = config.courant * h;
  const Eigen::Index N = 2 * static_cast<Eigen::Index>(std::round(L / h)) + 1;
  const int steps = static_cast<int>(std::ceil(config.final_time / k));

  ArrayXd x(N), V(N), u0(N), v0(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    x[i] = -L + h * i;
    V[i] = evaluate(spec, x[i]);
    u0[i] = psi0(x[i]);
    v0[i] = psi1(x[i]);
  }

  TimeSeries out;
  out.recorders.reserve(config.recorders.size());
  std::vector<Eigen::Index> rec_idx;
  for (double r : config.recorders) {
    const Eigen::Index i = static_cast<Eigen::Index>(std::round((r + L) / h));
    rec_idx.push_back(std::min(std::max<Eigen::Index>(i, 0), N - 1));
    out.recorders.push_back(x[rec_idx.back()]);
  }

  out.t.resize(steps + 1);
  out.psi.assign(rec_idx.size(), ArrayXd(steps + 1));

  // first step via the Taylor expansion; interior second difference of psi0
  ArrayXd prev = u0;
  ArrayXd cur = u0;
  cur.segment(1, N - 2) +=
      k * v0.segment(1, N - 2) +
      0.5 * k * k *
          ((u0.segment(2, N - 2) - 2.0 * u0.segment(1, N - 2) + u0.segment(0, N - 2)) / (h * h) -
           V.segment(1, N - 2) * u0.segment(1, N - 2));

  const int n_energy = steps / std::max(1, config.energy_stride) + 2;
  std::vector<double> et, ev;
  et.reserve(n_energy);
  ev.reserve(n_energy);

  auto record = [&](int n_step, const ArrayXd& field) {
    out.t[n_step] = n_step * k;
    for (std::size_t r = 0; r < rec_idx.size(); ++r) out.psi[r][n_step] = field[rec_idx[r]];
  };
  record(0, prev);
  record(1, cur);

  auto energy_at = [&](const ArrayXd& a, const ArrayXd& b) {
    // midpoint-in-time energy between levels a (older) and b (newer)
    double e = 0.0;
    for (Eigen::Index i = 1; i + 1 < N; ++i) {
      const double dt = (b[i] - a[i]) / k;
      const double dxm = 0.5 * ((b[i + 1] - b[i - 1]) / (2 * h) + (a[i + 1] - a[i - 1]) / (2 * h));
      const double um = 0.5 * (a[i] + b[i]);
      e += 0.5 * (dt * dt + dxm * dxm + V[i] * um * um);
    }
    return e * h;
  };

  double e0 = energy_at(prev, cur);
  et.push_back(0.5 * k);
  ev.push_back(e0);
  double drift = 0.0;

  for (int n_step = 2; n_step <= steps; ++n_step) {
    leapfrog_steps(V, prev, cur, 1, h, k);
    record(n_step, cur);
    if (n_step % config.energy_stride == 0 || n_step == steps) {
      const double e = energy_at(prev, cur);
      et.push_back((n_step - 0.5) * k);
      ev.push_back(e);
      if (e0 != 0.0) drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
    }
  }

  out.energy_t = Eigen::Map<const ArrayXd>(et.data(), static_cast<Eigen::Index>(et.size()));
  out.energy = Eigen::Map<const ArrayXd>(ev.data(), static_cast<Eigen::Index>(ev.size()));
  out.energy_drift = drift;
  return out;
}

double DuhamelResult::at(double x0, double t0) const {
  const Eigen::Index i = find_node(x, x0, 1e-6);
  const Eigen::Index n = find_node(t, t0, 1e-6);
  if (i < 0 || n < 0) throw ValidationError("DuhamelResult::at: point off the grid");
  return u(i, n);
}

DuhamelResult duhamel_solve(const PotentialSpec& spec, const std::function<double(double)>& psi0,
                            const std::function<double(double)>& psi1, double final_time,
                            const DuhamelOptions& opt) {
  spec.validate();
  const double hx = opt.hx;
  const double L0 = opt.margin + final_time + opt.support_radius;
  const Eigen::Index Nx = 2 * static_cast<Eigen::Index>(std::round(L0 / hx)) + 1;
  const Eigen::Index Nt = static_cast<Eigen::Index>(std::round(final_time / hx)) + 1;

  DuhamelResult out;
  out.x.resize(Nx);
  out.t.resize(Nt);
  for (Eigen::Index i = 0; i < Nx; ++i) out.x[i] = -L0 + hx * i;
  for (Eigen::Index n = 0; n < Nt; ++n) out.t[n] = hx * n;

  ArrayXd V(Nx), f(Nx), g(Nx);
  double vmax = 0.0;
  for (Eigen::Index i = 0; i < Nx; ++i) {
    V[i] = evaluate(spec, out.x[i]);
    vmax = std::max(vmax, std::abs(V[i]));
    f[i] = psi0(out.x[i]);
    g[i] = psi1(out.x[i]);
  }
  const double nu = opt.nu > 0 ? opt.nu : 2.2 * std::sqrt(2.0 * vmax + 1e-12);
  out.nu = nu;
  out.contraction_bound = 2.0 * vmax / (nu * nu);

  // free evolution: characteristics land on nodes because dt = dx
  const ArrayXd G = cumulative_from_left<double>(out.x, g);
  Eigen::MatrixXd free_part(Nx, Nt);
  for (Eigen::Index n = 0; n < Nt; ++n) {
    for (Eigen::Index i = 0; i < Nx; ++i) {
      const Eigen::Index il = std::max<Eigen::Index>(0, i - n);
      const Eigen::Index ir = std::min<Eigen::Index>(Nx - 1, i + n);
      free_part(i, n) = 0.5 * (f[il] + f[ir]) + 0.5 * (G[ir] - G[il]);
    }
  }

  Eigen::MatrixXd u = free_part;
  Eigen::MatrixXd w(Nx, Nt), cw(Nx, Nt);
  out.increments.clear();
  for (int it = 0; it < opt.max_iterations; ++it) {
    for (Eigen::Index n = 0; n < Nt; ++n) {
      w.col(n) = (V * u.col(n).array()).matrix();
      cw.col(n) = cumulative_from_left<double>(out.x, w.col(n).array()).matrix();
    }
    Eigen::MatrixXd u_new(Nx, Nt);
    u_new.col(0) = free_part.col(0);
    for (Eigen::Index n = 1; n < Nt; ++n) {
      for (Eigen::Index i = 0; i < Nx; ++i) {
        // trapezoid over s-levels; the cone edge (s = t) contributes zero width
        double acc = 0.0;
        for (Eigen::Index s = 0; s <= n; ++s) {
          const Eigen::Index il = std::max<Eigen::Index>(0, i - (n - s));
          const Eigen::Index ir = std::min<Eigen::Index>(Nx - 1, i + (n - s));
          const double val = cw(ir, s) - cw(il, s);
          acc += (s == 0 || s == n) ? 0.5 * val : val;
        }
        u_new(i, n) = free_part(i, n) - 0.5 * hx * acc;
      }
    }
    // nu-weighted L1 increment
    double inc = 0.0;
    for (Eigen::Index n = 0; n < Nt; ++n) {
      const double l1 = hx * (u_new.col(n) - u.col(n)).array().abs().sum();
      inc = std::max(inc, std::exp(-nu * out.t[n]) * l1);
    }
    u = std::move(u_new);
    out.increments.push_back(inc);
    if (inc < opt.tolerance) {
      out.u = std::move(u);
      return out;
    }
    if (out.increments.size() >= 3) {
      const auto& v = out.increments;
      if (v[v.size() - 1] > v[v.size() - 2] && v[v.size() - 2] > v[v.size() - 3])
        throw NumericError(
            "duhamel_solve: iteration diverging; nu is below the contraction threshold");
    }
  }
  throw NumericError("duhamel_solve: fixed point not reached within max_iterations");
}

DecayReport decay_fit(const ArrayXd& t, const ArrayXd& psi, double window_lo, double window_hi,
                      double x0) {
  if (t.size() != psi.size() || t.size() < 8)
    throw ValidationError("decay_fit: need matching series with at least 8 samples");
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (t[i] >= window_lo && t[i] <= window_hi) idx.push_back(i);
  if (idx.size() < 8) throw ValidationError("decay_fit: window contains too few samples");

  double sign = 0.0;
  for (Eigen::Index i : idx) {
    if (psi[i] == 0.0) continue;
    const double s = psi[i] > 0 ? 1.0 : -1.0;
    if (sign == 0.0) sign = s;
    if (s != sign)
      throw NumericError(
          "decay_fit: sign change inside the fit window (oscillatory contamination); "
          "shrink the window");
  }
  if (sign == 0.0) throw ValidationError("decay_fit: series vanishes on the window");

  const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
  Eigen::VectorXd lt(n), ly(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    lt[j] = std::log(t[idx[j]]);
    ly[j] = std::log(std::abs(psi[idx[j]]));
  }
  const double mt = lt.mean(), my = ly.mean();
  const double sxx = (lt.array() - mt).square().sum();
  const double sxy = ((lt.array() - mt) * (ly.array() - my)).sum();
  const double slope = sxy / sxx;
  const Eigen::VectorXd fitted = (my + slope * (lt.array() - mt)).matrix();
  const double rss = (ly - fitted).squaredNorm();
  const double stderr_slope = std::sqrt(rss / double(n - 2) / sxx);

  DecayReport rep;
  rep.x0 = x0;
  rep.exponent = -slope;
  rep.exponent_stderr = stderr_slope;
  rep.window_lo = window_lo;
  rep.window_hi = window_hi;
  rep.fit_residual = std::sqrt(rss / double(n));

  const double p_round = std::round(rep.exponent);
  double amp = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) amp += std::pow(t[idx[j]], p_round) * psi[idx[j]];
  rep.amplitude = amp / double(n);

  // local log-derivative via centered differences
  std::vector<double> pt, ptt;
  for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
    const Eigen::Index a = idx[j - 1], b = idx[j + 1];
    if (psi[a] == 0.0 || psi[b] == 0.0) continue;
    pt.push_back(-(std::log(std::abs(psi[b])) - std::log(std::abs(psi[a]))) /
                 (std::log(t[b]) - std::log(t[a])));
    ptt.push_back(t[idx[j]]);
  }
  rep.p_t = Eigen::Map<const ArrayXd>(pt.data(), static_cast<Eigen::Index>(pt.size()));
  rep.p_t_times = Eigen::Map<const ArrayXd>(ptt.data(), static_cast<Eigen::Index>(ptt.size()));
  return rep;
}

}  // namespace taillab::timedomain

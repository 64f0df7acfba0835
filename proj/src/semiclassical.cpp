#include "qhj/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qhj/errors.hpp"

namespace qhj {

namespace {

struct State {
  double q, p, dq, dp;  // position, momentum and their derivatives w.r.t. p(0)
};

// Force derivative for the variational equations, by central differences of
// the (smooth) force.
double force_slope(const Potential& pot, double q, double ramp) {
  if (pot.kind() != Potential::Kind::barrier) return -pot.second_derivative(q);
  const double h = 1e-6 * std::max(1.0, pot.width());
  return (pot.smooth_force(q + h, ramp) - pot.smooth_force(q - h, ramp)) / (2.0 * h);
}

State rhs(const Potential& pot, const State& y, double ramp) {
  const double m = pot.mass();
  const double fs = force_slope(pot, y.q, ramp);
  return {y.p / m, pot.smooth_force(y.q, ramp), y.dp / m, fs * y.dq};
}

State axpy(const State& y, double h, const State& k) {
  return {y.q + h * k.q, y.p + h * k.p, y.dq + h * k.dq, y.dp + h * k.dp};
}

State rk4(const Potential& pot, const State& y, double h, double ramp) {
  const State k1 = rhs(pot, y, ramp);
  const State k2 = rhs(pot, axpy(y, 0.5 * h, k1), ramp);
  const State k3 = rhs(pot, axpy(y, 0.5 * h, k2), ramp);
  const State k4 = rhs(pot, axpy(y, h, k3), ramp);
  return {y.q + h / 6.0 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q), y.p + h / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p),
          y.dq + h / 6.0 * (k1.dq + 2 * k2.dq + 2 * k3.dq + k4.dq),
          y.dp + h / 6.0 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp)};
}

void check_uniform(const std::vector<double>& x, const char* axis) {
  if (x.size() < 5) throw InvalidArgument(std::string(axis) + " axis needs at least 5 nodes");
  const double h = x[1] - x[0];
  if (!(h > 0.0)) throw InvalidArgument(std::string(axis) + " axis must be increasing");
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (std::abs((x[k] - x[k - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw InvalidArgument(std::string(axis) + " axis must be uniform");
    }
  }
}

}  // namespace

Trajectory solve_bvp(const Potential& pot, double Q, double q, double t, const BvpOptions& opts) {
  if (!(t > 0.0)) throw InvalidArgument("boundary-value problem needs t > 0");
  if (pot.kind() == Potential::Kind::harmonic && pot.omega() * t >= std::numbers::pi) {
    throw NoPathError("harmonic boundary-value problem at or past the first conjugate time");
  }
  const std::size_t mesh = std::max<std::size_t>(2, opts.mesh + (opts.mesh % 2));
  const double h = t / static_cast<double>(mesh);
  const double m = pot.mass();
  const double tol = 1e-10 * std::max(1.0, std::abs(q - Q));

  auto shoot = [&](double p0, Trajectory* out) {
    State y{Q, p0, 0.0, 1.0};
    if (out) {
      out->s.assign(mesh + 1, 0.0);
      out->q.assign(mesh + 1, 0.0);
      out->p.assign(mesh + 1, 0.0);
      out->q[0] = Q;
      out->p[0] = p0;
    }
    for (std::size_t k = 1; k <= mesh; ++k) {
      y = rk4(pot, y, h, opts.ramp);
      if (out) {
        out->s[k] = h * static_cast<double>(k);
        out->q[k] = y.q;
        out->p[k] = y.p;
      }
    }
    return y;
  };

  double p0 = m * (q - Q) / t;
  Trajectory tr;
  tr.Q = Q;
  tr.q_target = q;
  tr.t = t;
  bool converged = false;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const State y = shoot(p0, nullptr);
    const double miss = y.q - q;
    tr.iterations = it;
    if (!std::isfinite(miss)) break;
    if (std::abs(miss) < tol) {
      converged = true;
      break;
    }
    if (y.dq == 0.0 || !std::isfinite(y.dq)) break;
    p0 -= miss / y.dq;
  }
  if (!converged) {
    throw NoPathError("shooting did not converge for Q=" + std::to_string(Q) + ", q=" + std::to_string(q) +
                      ", t=" + std::to_string(t));
  }
  shoot(p0, &tr);
  tr.boundary_residual = std::abs(tr.q.back() - q);

  // Simpson for the integral of p^2/(2m) - V.
  auto lagrangian = [&](std::size_t k) { return tr.p[k] * tr.p[k] / (2.0 * m) - pot.smooth_value(tr.q[k], opts.ramp); };
  double sum = lagrangian(0) + lagrangian(mesh);
  for (std::size_t k = 1; k < mesh; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * lagrangian(k);
  tr.action = sum * h / 3.0;

  const double e0 = tr.p[0] * tr.p[0] / (2.0 * m) + pot.smooth_value(tr.q[0], opts.ramp);
  double drift = 0.0;
  for (std::size_t k = 0; k <= mesh; ++k) {
    const double e = tr.p[k] * tr.p[k] / (2.0 * m) + pot.smooth_value(tr.q[k], opts.ramp);
    drift = std::max(drift, std::abs(e - e0));
  }
  tr.energy_drift = drift / std::max(std::abs(e0), 1e-300);
  return tr;
}

double principal_function(const Potential& pot, double Q, double q, double t, const BvpOptions& opts) {
  return solve_bvp(pot, Q, q, t, opts).action;
}

ActionTable build_action_table(const Potential& pot, const std::vector<double>& q_nodes,
                               const std::vector<double>& Q_nodes, double t, const BvpOptions& opts) {
  check_uniform(q_nodes, "q");
  check_uniform(Q_nodes, "Q");
  ActionTable tab;
  tab.q_nodes = q_nodes;
  tab.Q_nodes = Q_nodes;
  tab.t = t;
  tab.mass = pot.mass();
  const std::size_t total = q_nodes.size() * Q_nodes.size();
  tab.S.resize(total);
  tab.p_final.resize(total);
  tab.p_initial.resize(total);
  for (std::size_t a = 0; a < Q_nodes.size(); ++a) {
    for (std::size_t b = 0; b < q_nodes.size(); ++b) {
      const Trajectory tr = solve_bvp(pot, Q_nodes[a], q_nodes[b], t, opts);
      const std::size_t idx = a * q_nodes.size() + b;
      tab.S[idx] = tr.action;
      tab.p_final[idx] = tr.final_momentum();
      tab.p_initial[idx] = tr.initial_momentum();
    }
  }
  return tab;
}

ActionTable perturbative_step_table(double V0, double a_width, double m, const std::vector<double>& q_nodes,
                                    const std::vector<double>& Q_nodes, double t) {
  check_uniform(q_nodes, "q");
  check_uniform(Q_nodes, "Q");
  ActionTable tab;
  tab.q_nodes = q_nodes;
  tab.Q_nodes = Q_nodes;
  tab.t = t;
  tab.mass = m;
  for (double Q : Q_nodes) {
    for (double q : q_nodes) {
      const double d = q - Q;
      tab.S.push_back(perturbative_step_action(V0, a_width, m, Q, q, t));
      tab.p_final.push_back(m * d / t + V0 * a_width * t / (d * d));
      tab.p_initial.push_back(m * d / t + V0 * a_width * t / (d * d));
    }
  }
  return tab;
}

TableField<std::complex<double>> gather_phase(const std::vector<PhaseField>& family, std::size_t time_index,
                                              const std::vector<double>& q_nodes,
                                              const std::vector<double>& Q_nodes) {
  if (family.size() != Q_nodes.size()) throw InvalidArgument("one phase field per Q node is required");
  TableField<std::complex<double>> out;
  out.q_nodes = q_nodes;
  out.Q_nodes = Q_nodes;
  for (std::size_t a = 0; a < family.size(); ++a) {
    const PhaseField& w = family[a];
    if (std::abs(w.source - Q_nodes[a]) > 1e-9) throw InvalidArgument("phase field source does not match Q node");
    if (time_index >= w.times.count()) throw InvalidArgument("time index out of range");
    for (double q : q_nodes) {
      if (!w.grid.is_node(q)) throw InvalidArgument("q node is not on the phase grid");
      const std::size_t i = w.grid.nearest(q);
      if (w.masked(time_index, i)) throw InvalidArgument("q node is masked");
      out.values.push_back(w.at(time_index, i));
    }
  }
  return out;
}

TableField<double> van_vleck(const ActionTable& table) {
  check_uniform(table.q_nodes, "q");
  check_uniform(table.Q_nodes, "Q");
  const double hq = table.q_nodes[1] - table.q_nodes[0];
  const double hQ = table.Q_nodes[1] - table.Q_nodes[0];
  TableField<double> d;
  d.q_nodes.assign(table.q_nodes.begin() + 1, table.q_nodes.end() - 1);
  d.Q_nodes.assign(table.Q_nodes.begin() + 1, table.Q_nodes.end() - 1);
  for (std::size_t a = 1; a + 1 < table.nQ(); ++a) {
    for (std::size_t b = 1; b + 1 < table.nq(); ++b) {
      const double v = (table.at(a + 1, b + 1) - table.at(a + 1, b - 1) - table.at(a - 1, b + 1) +
                        table.at(a - 1, b - 1)) /
                       (4.0 * hq * hQ);
      d.values.push_back(v);
    }
  }
  return d;
}

TableField<std::complex<double>> semiclassical_phase(const ActionTable& table, double hbar) {
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  const TableField<double> d = van_vleck(table);
  TableField<std::complex<double>> w;
  w.q_nodes = d.q_nodes;
  w.Q_nodes = d.Q_nodes;
  for (std::size_t a = 0; a < d.Q_nodes.size(); ++a) {
    for (std::size_t b = 0; b < d.q_nodes.size(); ++b) {
      const double D = d.at(a, b);
      if (!(D < 0.0)) {
        throw CausticError("d2S/dqdQ is not negative at q=" + std::to_string(d.q_nodes[b]) +
                           ", Q=" + std::to_string(d.Q_nodes[a]));
      }
      w.values.emplace_back(table.at(a + 1, b + 1), -0.5 * hbar * std::log(-D));
    }
  }
  return w;
}

Discrepancy compare_semiclassical(const TableField<std::complex<double>>& W,
                                  const TableField<std::complex<double>>& W_sc, double hbar) {
  if (W.values.size() != W_sc.values.size() || W.q_nodes.size() != W_sc.q_nodes.size() ||
      W.Q_nodes.size() != W_sc.Q_nodes.size() || W.values.empty()) {
    throw InvalidArgument("phase tables do not share a grid");
  }
  for (std::size_t k = 0; k < W.q_nodes.size(); ++k) {
    if (std::abs(W.q_nodes[k] - W_sc.q_nodes[k]) > 1e-9) throw InvalidArgument("q grids differ");
  }
  for (std::size_t k = 0; k < W.Q_nodes.size(); ++k) {
    if (std::abs(W.Q_nodes[k] - W_sc.Q_nodes[k]) > 1e-9) throw InvalidArgument("Q grids differ");
  }
  const std::size_t n = W.values.size();
  const std::size_t ref = (W.Q_nodes.size() / 2) * W.q_nodes.size() + W.q_nodes.size() / 2;
  const std::complex<double> d0 = W.values[ref] - W_sc.values[ref];
  const double period = 2.0 * std::numbers::pi * hbar;
  std::vector<std::complex<double>> delta(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> d = W.values[k] - W_sc.values[k] - d0;
    const double re = d.real() - period * std::round(d.real() / period);
    delta[k] = {re, d.imag()};
  }
  Discrepancy out;
  out.count = n;
  std::complex<double> mean = 0.0;
  for (const auto& d : delta) mean += d;
  mean /= static_cast<double>(n);
  for (const auto& d : delta) {
    out.variance += std::norm(d - mean);
    out.variance_re += (d.real() - mean.real()) * (d.real() - mean.real());
    out.variance_im += (d.imag() - mean.imag()) * (d.imag() - mean.imag());
    out.max_abs_re = std::max(out.max_abs_re, std::abs(d.real()));
    out.max_abs_im = std::max(out.max_abs_im, std::abs(d.imag()));
    out.rms_re += d.real() * d.real();
    out.rms_im += d.imag() * d.imag();
  }
  const double inv = 1.0 / static_cast<double>(n);
  out.variance *= inv;
  out.variance_re *= inv;
  out.variance_im *= inv;
  out.rms_re = std::sqrt(out.rms_re * inv);
  out.rms_im = std::sqrt(out.rms_im * inv);
  return out;
}

double perturbative_step_action(double V0, double a_width, double m, double y, double x, double t) {
  if (!(a_width > 0.0) || !(m > 0.0) || !(t > 0.0)) throw InvalidArgument("width, mass and t must be positive");
  if (!(y < -0.5 * a_width) || !(x > 0.5 * a_width)) {
    throw InvalidArgument("endpoints must lie on opposite sides outside the barrier");
  }
  const double d = x - y;
  return m * d * d / (2.0 * t) - V0 * a_width * t / d;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("log-log fit needs at least two pairs");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw InvalidArgument("log-log fit needs positive data");
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("log-log fit needs distinct x values");
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace qhj

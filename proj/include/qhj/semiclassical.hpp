#pragma once

#include <complex>
#include <vector>

#include "qhj/hamiltonian.hpp"
#include "qhj/phase.hpp"

namespace qhj {

/// Classical path from Q at s = 0 to q at s = t.
struct Trajectory {
  std::vector<double> s, q, p;
  double Q = 0.0;
  double q_target = 0.0;
  double t = 0.0;
  double action = 0.0;
  double energy_drift = 0.0;  // max relative deviation of p^2/2m + V along the path
  double boundary_residual = 0.0;
  int iterations = 0;

  double initial_momentum() const { return p.front(); }
  double final_momentum() const { return p.back(); }
};

struct BvpOptions {
  std::size_t mesh = 4000;  // RK4 steps, made even for Simpson quadrature
  int max_iterations = 50;
  double ramp = 0.05;  // logistic ramp width of the barrier, relative to its width
};

/// Shooting on the initial momentum with Newton iterations from m(q-Q)/t.
/// Throws NoPathError when Newton does not reach 1e-10 max(1,|q-Q|).
Trajectory solve_bvp(const Potential& pot, double Q, double q, double t, const BvpOptions& opts = {});

/// Integral of p qdot - H along the path (composite Simpson).
double principal_function(const Potential& pot, double Q, double q, double t, const BvpOptions& opts = {});

/// Values indexed [iQ * nq + iq].
struct ActionTable {
  std::vector<double> q_nodes;
  std::vector<double> Q_nodes;
  double t = 0.0;
  double mass = 1.0;
  std::vector<double> S;
  std::vector<double> p_final;
  std::vector<double> p_initial;

  std::size_t nq() const { return q_nodes.size(); }
  std::size_t nQ() const { return Q_nodes.size(); }
  double at(std::size_t iQ, std::size_t iq) const { return S[iQ * nq() + iq]; }
};

/// Throws InvalidArgument when either axis is not uniform or has fewer than 5 nodes.
ActionTable build_action_table(const Potential& pot, const std::vector<double>& q_nodes,
                               const std::vector<double>& Q_nodes, double t, const BvpOptions& opts = {});

/// A real or complex field on the interior of a q x Q table, [iQ * nq + iq].
template <class T>
struct TableField {
  std::vector<double> q_nodes;
  std::vector<double> Q_nodes;
  std::vector<T> values;

  std::size_t nq() const { return q_nodes.size(); }
  T at(std::size_t iQ, std::size_t iq) const { return values[iQ * nq() + iq]; }
};

/// The perturbative step action tabulated on uniform q and Q axes (no BVP).
ActionTable perturbative_step_table(double V0, double a_width, double m, const std::vector<double>& q_nodes,
                                    const std::vector<double>& Q_nodes, double t);

/// W(q, Q, t) at one output time, gathered from phase fields of a Q-family.
/// family[a] must have source Q_nodes[a]; every q node must be an unmasked
/// grid node. Throws InvalidArgument otherwise.
TableField<std::complex<double>> gather_phase(const std::vector<PhaseField>& family, std::size_t time_index,
                                              const std::vector<double>& q_nodes,
                                              const std::vector<double>& Q_nodes);

/// Central-difference d2S/dq dQ on interior nodes (edges dropped).
TableField<double> van_vleck(const ActionTable& table);

/// S - (i hbar/2) ln(-D) on the interior nodes. Throws CausticError where D >= 0.
TableField<std::complex<double>> semiclassical_phase(const ActionTable& table, double hbar);

/// Spread of Delta = W - W_sc after subtracting the value at a reference node.
/// The real part is compared modulo 2 pi hbar.
struct Discrepancy {
  double variance = 0.0;  // mean |Delta - mean|^2
  double variance_re = 0.0;
  double variance_im = 0.0;
  double max_abs_re = 0.0;
  double max_abs_im = 0.0;
  double rms_re = 0.0;  // rms of Re Delta relative to the reference node
  double rms_im = 0.0;
  std::size_t count = 0;
};

/// Throws InvalidArgument on grid mismatch.
Discrepancy compare_semiclassical(const TableField<std::complex<double>>& W,
                                  const TableField<std::complex<double>>& W_sc, double hbar);

/// m (x-y)^2/(2t) - V0 a t/(x-y) for y < -a/2, x > a/2.
double perturbative_step_action(double V0, double a_width, double m, double y, double x, double t);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (ln x, ln y). Needs at least two positive pairs.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qhj

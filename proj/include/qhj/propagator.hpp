#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qhj/grid.hpp"
#include "qhj/hamiltonian.hpp"

namespace qhj {

using cdouble = std::complex<double>;

/// sqrt(m/(2 pi i hbar t)) exp(i m (q-Q)^2/(2 hbar t)), with sqrt(1/i) = e^{-i pi/4}.
cdouble kernel_free(double m, double hbar, double q, double Q, double t);

/// Mehler kernel for V = m omega^2 q^2/2 on 0 < omega t < pi - 0.1.
/// Throws CausticError inside the margin of a caustic.
cdouble kernel_harmonic(double m, double omega, double hbar, double q, double Q, double t);

/// Complex values on a q x t grid, stored time-major with q fastest.
struct SpaceTimeField {
  SpatialGrid grid;
  TimeGrid times;
  std::vector<cdouble> values;
  Potential potential = Potential::free();
  double hbar = 1.0;
  std::string method;
  /// Largest |hbar k| carried by the initial data (0 when not band-limited).
  double momentum_cutoff = 0.0;
  /// Relative drift of dq*sum|psi|^2 across the run.
  double norm_drift = 0.0;

  double mass() const { return potential.mass(); }
  std::size_t nq() const { return grid.n; }
  std::size_t nt() const { return times.count(); }
  cdouble& at(std::size_t k, std::size_t i) { return values[k * grid.n + i]; }
  const cdouble& at(std::size_t k, std::size_t i) const { return values[k * grid.n + i]; }
  double norm(std::size_t k) const;
};

/// K(q, Q, t) at a fixed source node Q.
struct PropagatorSlab : SpaceTimeField {
  double source = 0.0;
};

using WaveField = SpaceTimeField;

/// Samples a closed-form kernel ("free" or "harmonic") on the grid.
PropagatorSlab analytic_slab(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times,
                             double Q);

struct EvolveOptions {
  /// Super-Gaussian cutoff k_c of the initial lattice delta; chosen from the
  /// box size and potential when unset.
  std::optional<double> band_limit;
  int filter_order = 16;
  /// Upper bound on the Strang step in addition to the kinetic-phase rule.
  std::optional<double> max_step;
  /// Replaces the step rule entirely; for step-size convergence studies.
  std::optional<double> fixed_step;
  double edge_tolerance = 1e-6;
  /// When false, the initial delta is the raw lattice delta 1/dq.
  bool filter = true;
};

/// Default band limit: the largest k_c whose carried momenta, plus the
/// filter's Fresnel tail, stay inside the box at every output time; capped at
/// 0.45 of the grid Nyquist number. Throws DomainTooSmallError if none fits.
double auto_band_limit(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times, double Q);

/// Strang step length used for a run: the largest kinetic phase per step on
/// the grid is at most pi/4, and t_min is covered by at least 10 steps.
double strang_step(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times,
                   const EvolveOptions& opts);

/// Split-operator propagation of the (band-limited) lattice delta at node Q.
/// Throws DomainTooSmallError when |K| at either box edge exceeds
/// edge_tolerance*max|K| at an output time.
PropagatorSlab evolve_split_operator(const Potential& pot, double hbar, const SpatialGrid& grid,
                                     const TimeGrid& times, double Q, const EvolveOptions& opts = {});

/// Split-operator propagation of an arbitrary initial wave function given at
/// t = 0 on the grid nodes. No filter is applied.
WaveField evolve_wave(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times,
                      const std::vector<cdouble>& psi0, const EvolveOptions& opts = {});

/// Slabs for each source node in Q_nodes with shared options.
std::vector<PropagatorSlab> build_family(const Potential& pot, double hbar, const SpatialGrid& grid,
                                         const TimeGrid& times, const std::vector<double>& Q_nodes,
                                         const EvolveOptions& opts = {});

/// psi(q, t) = dq * sum_Q K(q, Q, t) phi(Q). phi is sampled on all grid nodes;
/// every node where |phi| exceeds 1e-14 max|phi| must have a slab.
WaveField convolve(const std::vector<PropagatorSlab>& family, const std::vector<cdouble>& phi);

/// The same sum with each slab evolved on demand and discarded, so memory does
/// not grow with the number of source nodes.
WaveField convolve(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times,
                   const std::vector<cdouble>& phi, const EvolveOptions& opts = {});

/// Per-time norms of i hbar psi_t - H psi, relative to the slice norms of H psi.
/// H psi = -2 hbar^2 a psi'' - 2 hbar^2 a' psi' - (hbar^2/2) a'' psi
///         - 2 i hbar b psi' - i hbar b' psi + c psi.
struct SchrodingerResidual {
  std::vector<double> times;
  std::vector<double> l2;   // rms(r)/rms(H psi)
  std::vector<double> max;  // max|r|/max|H psi|
  double worst_l2() const;
  double worst_max() const;
};

struct ResidualWindow {
  double q_lo = -1e300;
  double q_hi = 1e300;
};

SchrodingerResidual schrodinger_residual(const SpaceTimeField& field, const HamiltonianSpec& spec,
                                         const ResidualWindow& window = {});

}  // namespace qhj

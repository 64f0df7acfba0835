#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qhj/propagator.hpp"

namespace qhj {

/// Branch-tracked W = -i hbar ln K on a slab grid. Masked nodes hold NaN.
struct PhaseField {
  SpatialGrid grid;
  TimeGrid times;
  double source = 0.0;
  double hbar = 1.0;
  Potential potential = Potential::free();
  std::vector<cdouble> values;
  std::vector<std::uint8_t> mask;  // 1 where |K| < zero_threshold * max|K| of the slice
  std::size_t base_node = 0;
  std::size_t base_time = 0;
  double zero_threshold = 1e-8;
  /// Plaquettes whose wrapped phase differences do not close (2D unwrapping
  /// would be path dependent there).
  std::size_t residues = 0;

  cdouble& at(std::size_t k, std::size_t i) { return values[k * grid.n + i]; }
  const cdouble& at(std::size_t k, std::size_t i) const { return values[k * grid.n + i]; }
  bool masked(std::size_t k, std::size_t i) const { return mask[k * grid.n + i] != 0; }
};

struct PhaseOptions {
  double zero_threshold = 1e-8;
  /// Base node for fields without a source; defaults to the largest |psi| at
  /// the earliest time.
  std::optional<std::size_t> base_node;
};

/// Base node: nearest Q + 5 dq. Unwraps along t at the base column, then
/// outward along q in every slice. Throws CausticSliceError when a slice is
/// fully masked and DomainError when the base column is masked.
PhaseField extract_phase(const PropagatorSlab& slab, const PhaseOptions& opts = {});

/// Same policy for a Q-independent wave function.
PhaseField extract_phase(const WaveField& field, const PhaseOptions& opts = {});

/// exp(i W/hbar), zero at masked nodes.
std::vector<cdouble> phase_to_field(const PhaseField& w);

/// Per-time residual of the c-number QHJE
///   2a(W_q^2 - i hbar W_qq) + 2(b - i hbar a')W_q + c - i hbar b' - (hbar^2/2)a'' + W_t
/// with fourth-order differences in q and second-order in t.
struct ResidualReport {
  std::vector<double> times;
  std::vector<double> l2;      // rms |R| over included nodes
  std::vector<double> max;     // max |R|
  std::vector<double> median;  // median |R|
  /// |R psi| relative to |H psi|, psi = exp(iW/hbar): the scale on which the
  /// Schrodinger residual is reported.
  std::vector<double> rel_l2;
  std::vector<double> rel_max;
  std::vector<std::size_t> counts;
  double dq = 0.0;
  double dt = 0.0;
  int order_q = 4;
  int order_t = 2;

  double worst_l2() const;
  double worst_max() const;
  double worst_rel_max() const;
  double worst_rel_l2() const;
};

struct QhjeOptions {
  ResidualWindow window;
  std::size_t collar = 2;
};

/// Stencil neighbours are taken modulo 2 pi hbar relative to the centre node,
/// so the residual does not depend on the branch of W.
/// Masked nodes are excluded together with a collar in q around them.
/// Throws InvalidArgument with fewer than 5 usable times or nodes.
ResidualReport qhje_residual(const PhaseField& w, const HamiltonianSpec& spec, const QhjeOptions& opts = {});

/// Remainder W - m(q-Q)^2/(2t) - (i hbar/2) ln t over the smallest five times.
struct SmallTimeReport {
  std::vector<double> times;
  std::vector<double> spread;  // per time: max |r - mean_q r|
  double max_deviation = 0.0;  // max over (q,t) of |r - r(ref)|
  double slope = 0.0;          // |d mean_q r / dt| by least squares
};

/// potential_scale bounds |V| on the window; it must satisfy
/// potential_scale * t_min / hbar < 1e-2.
SmallTimeReport small_t_boundary_check(const PhaseField& w, double m, double hbar, double potential_scale = 0.0,
                                       const ResidualWindow& window = {});

/// Extracts the Q-independent W(q,t) of a wave function and returns its QHJE
/// residual.
ResidualReport particular_solution_check(const WaveField& field, const HamiltonianSpec& spec,
                                         const QhjeOptions& opts = {}, const PhaseOptions& phase_opts = {});

}  // namespace qhj

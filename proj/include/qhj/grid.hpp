#pragma once

#include <cstddef>
#include <vector>

namespace qhj {

/// Uniform periodic grid q_k = q_min + k*dq, k = 0..n-1, dq = (q_max - q_min)/n.
struct SpatialGrid {
  double q_min = -20.0;
  double q_max = 20.0;
  std::size_t n = 1024;

  double dq() const { return (q_max - q_min) / static_cast<double>(n); }
  double node(std::size_t k) const { return q_min + static_cast<double>(k) * dq(); }
  std::vector<double> nodes() const;
  /// Index of the nearest node; throws InvalidArgument outside [q_min, q_max).
  std::size_t nearest(double q) const;
  /// True when q lies on a node to within 1e-9 dq.
  bool is_node(double q) const;
  /// Angular wavenumbers in FFT order.
  std::vector<double> wavenumbers() const;

  void validate() const;
  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;
};

/// Output times t_k = t_min + k*dt, k = 0..steps, dt = (t_max - t_min)/steps.
struct TimeGrid {
  double t_min = 0.5;
  double t_max = 1.5;
  std::size_t steps = 200;

  double dt() const { return (t_max - t_min) / static_cast<double>(steps); }
  std::size_t count() const { return steps + 1; }
  double time(std::size_t k) const { return t_min + static_cast<double>(k) * dt(); }
  std::vector<double> times() const;

  void validate() const;
  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

}  // namespace qhj

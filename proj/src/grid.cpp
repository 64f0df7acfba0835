#include "qhj/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qhj/errors.hpp"

namespace qhj {

std::vector<double> SpatialGrid::nodes() const {
  std::vector<double> q(n);
  for (std::size_t k = 0; k < n; ++k) q[k] = node(k);
  return q;
}

std::size_t SpatialGrid::nearest(double q) const {
  if (!(q >= q_min && q < q_max)) throw InvalidArgument("point " + std::to_string(q) + " lies outside the grid");
  const auto k = static_cast<std::size_t>(std::llround((q - q_min) / dq()));
  return k >= n ? n - 1 : k;
}

bool SpatialGrid::is_node(double q) const {
  if (!(q >= q_min && q < q_max)) return false;
  const double x = (q - q_min) / dq();
  return std::abs(x - std::round(x)) < 1e-9;
}

std::vector<double> SpatialGrid::wavenumbers() const {
  std::vector<double> k(n);
  const double dk = 2.0 * std::numbers::pi / (q_max - q_min);
  for (std::size_t j = 0; j < n; ++j) {
    const auto s = static_cast<long>(j);
    const long half = static_cast<long>(n / 2);
    k[j] = dk * static_cast<double>(s < half ? s : s - static_cast<long>(n));
  }
  return k;
}

void SpatialGrid::validate() const {
  if (!std::isfinite(q_min) || !std::isfinite(q_max) || !(q_max > q_min)) {
    throw InvalidArgument("spatial grid needs q_max > q_min");
  }
  if (n < 64 || (n & (n - 1)) != 0) throw InvalidArgument("spatial grid size must be a power of two >= 64");
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(count());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = time(k);
  return t;
}

void TimeGrid::validate() const {
  if (!(t_min > 0.0)) throw InvalidArgument("time grid needs t_min > 0");
  if (!(t_max > t_min) || !std::isfinite(t_max)) throw InvalidArgument("time grid needs t_max > t_min");
  if (steps < 1) throw InvalidArgument("time grid needs at least one step");
}

}  // namespace qhj

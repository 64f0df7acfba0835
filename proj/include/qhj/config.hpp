#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qhj/io.hpp"
#include "qhj/propagator.hpp"

namespace qhj {

/// Nodes start, start + stride*dq, ... snapped to the spatial grid.
struct NodeAxis {
  double start = 0.0;
  std::size_t stride = 1;
  std::size_t count = 5;

  std::vector<double> nodes(const SpatialGrid& grid) const;
};

struct SweepSpec {
  std::string parameter;  // "V0" or "hbar"
  std::vector<double> values;
};

/// Validated run configuration. Unknown keys anywhere are rejected.
struct RunConfig {
  json raw;
  Potential potential = Potential::free();
  double hbar = 1.0;
  double m = 1.0;
  SpatialGrid grid;
  TimeGrid times;
  double source = 0.0;
  std::string method = "split-operator";  // or "analytic"
  EvolveOptions evolve;
  std::optional<double> tolerance;
  ResidualWindow window;
  std::filesystem::path output_dir = "out";
  // semiclassical comparison
  std::optional<NodeAxis> q_axis;
  std::optional<NodeAxis> Q_axis;
  std::optional<double> t;
  std::size_t bvp_mesh = 4000;
  std::optional<SweepSpec> sweep;
};

/// Throws InvalidArgument describing the first violation.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace qhj

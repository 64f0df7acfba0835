#include "qhj/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "qhj/errors.hpp"

namespace qhj {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& keys, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw InvalidArgument("unknown key '" + k + "' in " + where);
  }
}

double number(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw InvalidArgument(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidArgument(where + "." + key + " must be finite");
  return x;
}

std::size_t count(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_unsigned()) throw InvalidArgument(where + "." + key + " must be a non-negative integer");
  return v.get<std::size_t>();
}

NodeAxis parse_axis(const json& j, const std::string& where) {
  reject_unknown(j, {"start", "stride", "count"}, where);
  NodeAxis a;
  if (!j.contains("start")) throw InvalidArgument(where + ".start is required");
  a.start = number(j, "start", where);
  if (j.contains("stride")) a.stride = count(j, "stride", where);
  if (j.contains("count")) a.count = count(j, "count", where);
  if (a.stride < 1 || a.count < 5) throw InvalidArgument(where + " needs stride >= 1 and count >= 5");
  return a;
}

}  // namespace

std::vector<double> NodeAxis::nodes(const SpatialGrid& grid) const {
  const std::size_t first = grid.nearest(start);
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t idx = first + k * stride;
    if (idx >= grid.n) throw InvalidArgument("node axis runs off the grid");
    out.push_back(grid.node(idx));
  }
  return out;
}

RunConfig parse_config(const json& j) {
  reject_unknown(j,
                 {"version", "potential", "hbar", "m", "grid", "times", "source", "method", "tolerance", "window",
                  "output_dir", "q_axis", "Q_axis", "t", "bvp_mesh", "sweep"},
                 "config");
  RunConfig c;
  c.raw = j;
  if (j.contains("version") && (!j.at("version").is_number_integer() || j.at("version").get<int>() != 1)) {
    throw InvalidArgument("config.version must be 1");
  }
  if (j.contains("hbar")) c.hbar = number(j, "hbar", "config");
  if (j.contains("m")) c.m = number(j, "m", "config");
  if (!(c.hbar > 0.0)) throw InvalidArgument("config.hbar must be positive");
  if (!(c.m > 0.0)) throw InvalidArgument("config.m must be positive");
  if (!j.contains("potential")) throw InvalidArgument("config.potential is required");
  c.potential = potential_from_json(j.at("potential"), c.m);
  if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"));
  if (j.contains("times")) c.times = times_from_json(j.at("times"));
  c.grid.validate();
  c.times.validate();
  if (j.contains("source")) c.source = number(j, "source", "config");
  if (j.contains("method")) {
    const json& m = j.at("method");
    reject_unknown(m, {"kind", "band_limit", "filter_order", "max_step", "edge_tolerance", "filter"}, "method");
    if (m.contains("kind")) {
      if (!m.at("kind").is_string()) throw InvalidArgument("method.kind must be a string");
      c.method = m.at("kind").get<std::string>();
      if (c.method != "split-operator" && c.method != "analytic") {
        throw InvalidArgument("method.kind must be 'split-operator' or 'analytic'");
      }
    }
    if (m.contains("band_limit")) c.evolve.band_limit = number(m, "band_limit", "method");
    if (m.contains("filter_order")) c.evolve.filter_order = static_cast<int>(count(m, "filter_order", "method"));
    if (m.contains("max_step")) c.evolve.max_step = number(m, "max_step", "method");
    if (m.contains("edge_tolerance")) c.evolve.edge_tolerance = number(m, "edge_tolerance", "method");
    if (m.contains("filter")) {
      if (!m.at("filter").is_boolean()) throw InvalidArgument("method.filter must be a boolean");
      c.evolve.filter = m.at("filter").get<bool>();
    }
  }
  if (j.contains("tolerance")) {
    c.tolerance = number(j, "tolerance", "config");
    if (!(*c.tolerance > 0.0)) throw InvalidArgument("config.tolerance must be positive");
  }
  if (j.contains("window")) {
    reject_unknown(j.at("window"), {"q_lo", "q_hi"}, "window");
    if (j.at("window").contains("q_lo")) c.window.q_lo = number(j.at("window"), "q_lo", "window");
    if (j.at("window").contains("q_hi")) c.window.q_hi = number(j.at("window"), "q_hi", "window");
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw InvalidArgument("config.output_dir must be a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("q_axis")) c.q_axis = parse_axis(j.at("q_axis"), "q_axis");
  if (j.contains("Q_axis")) c.Q_axis = parse_axis(j.at("Q_axis"), "Q_axis");
  if (j.contains("t")) {
    c.t = number(j, "t", "config");
    if (!(*c.t > 0.0)) throw InvalidArgument("config.t must be positive");
  }
  if (j.contains("bvp_mesh")) c.bvp_mesh = count(j, "bvp_mesh", "config");
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    reject_unknown(s, {"parameter", "values"}, "sweep");
    SweepSpec sw;
    if (!s.contains("parameter") || !s.at("parameter").is_string()) {
      throw InvalidArgument("sweep.parameter must be a string");
    }
    sw.parameter = s.at("parameter").get<std::string>();
    if (sw.parameter != "V0" && sw.parameter != "hbar") throw InvalidArgument("sweep.parameter must be V0 or hbar");
    if (!s.contains("values") || !s.at("values").is_array() || s.at("values").size() < 2) {
      throw InvalidArgument("sweep.values must list at least two numbers");
    }
    for (const auto& v : s.at("values")) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) throw InvalidArgument("sweep.values must be positive numbers");
      sw.values.push_back(v.get<double>());
    }
    if (sw.parameter == "V0" && c.potential.kind() != Potential::Kind::barrier) {
      throw InvalidArgument("a V0 sweep needs a barrier potential");
    }
    c.sweep = std::move(sw);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace qhj

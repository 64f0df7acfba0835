#include "qhj/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qhj/errors.hpp"

namespace qhj {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLayout = "row-major, q fastest";

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return __builtin_bswap64(v);
  }
}

void write_binary(const fs::path& path, const std::vector<cdouble>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  std::vector<std::uint64_t> buf(2 * values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    buf[2 * k] = to_little(std::bit_cast<std::uint64_t>(values[k].real()));
    buf[2 * k + 1] = to_little(std::bit_cast<std::uint64_t>(values[k].imag()));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8));
  if (!out) throw FormatError("failed writing " + path.string());
}

std::vector<cdouble> read_binary(const fs::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size != count * 16) {
    throw FormatError(path.string() + " holds " + std::to_string(size) + " bytes, expected " +
                      std::to_string(count * 16));
  }
  in.seekg(0);
  std::vector<std::uint64_t> buf(2 * count);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  if (!in) throw FormatError("failed reading " + path.string());
  std::vector<cdouble> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    values[k] = {std::bit_cast<double>(to_little(buf[2 * k])), std::bit_cast<double>(to_little(buf[2 * k + 1]))};
  }
  return values;
}

fs::path with_ext(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

json field_meta(const SpaceTimeField& f, const char* kind, const fs::path& stem) {
  json j;
  j["version"] = kFormatVersion;
  j["kind"] = kind;
  j["grid"] = grid_to_json(f.grid);
  j["times"] = times_to_json(f.times);
  j["hbar"] = f.hbar;
  j["m"] = f.mass();
  j["potential"] = potential_to_json(f.potential);
  j["method"] = f.method;
  j["momentum_cutoff"] = f.momentum_cutoff;
  j["norm_drift"] = f.norm_drift;
  j["layout"] = kLayout;
  j["dtype"] = "complex128";
  j["byte_order"] = "little";
  j["data"] = with_ext(stem, ".bin").filename().string();
  return j;
}

json read_meta(const fs::path& stem) {
  const fs::path p = with_ext(stem, ".json");
  std::ifstream in(p);
  if (!in) throw FormatError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("malformed metadata " + p.string() + ": " + e.what());
  }
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("metadata is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("metadata field '") + key + "' has the wrong type");
  }
}

void load_common(const json& j, SpaceTimeField& f) {
  if (get<int>(j, "version") != kFormatVersion) throw FormatError("unsupported format version");
  if (get<std::string>(j, "layout") != kLayout) throw FormatError("unsupported layout");
  if (get<std::string>(j, "byte_order") != "little") throw FormatError("unsupported byte order");
  try {
    f.grid = grid_from_json(j.at("grid"));
    f.times = times_from_json(j.at("times"));
    f.potential = potential_from_json(j.at("potential"), get<double>(j, "m"));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("inconsistent metadata: ") + e.what());
  } catch (const json::exception& e) {
    throw FormatError(std::string("inconsistent metadata: ") + e.what());
  }
  f.hbar = get<double>(j, "hbar");
  f.method = get<std::string>(j, "method");
  f.momentum_cutoff = get<double>(j, "momentum_cutoff");
  f.norm_drift = get<double>(j, "norm_drift");
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw InvalidArgument(std::string("'") + key + "' must be a number");
  }
}

}  // namespace

json potential_to_json(const Potential& pot) {
  json j;
  j["type"] = pot.tag();
  switch (pot.kind()) {
    case Potential::Kind::free:
      break;
    case Potential::Kind::harmonic:
      j["omega"] = pot.omega();
      break;
    case Potential::Kind::linear:
      j["force"] = pot.force();
      break;
    case Potential::Kind::barrier:
      j["V0"] = pot.height();
      j["width"] = pot.width();
      break;
    case Potential::Kind::custom: {
      json rows = json::array();
      const auto& t = pot.table();
      for (std::size_t k = 0; k < t.q.size(); ++k) rows.push_back({t.q[k], t.V[k], t.dV[k]});
      j["table"] = rows;
      break;
    }
  }
  return j;
}

Potential potential_from_json(const json& j, double mass) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw InvalidArgument("potential needs a string 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : j.items()) {
      bool known = k == "type";
      for (const char* key : keys) known = known || k == key;
      if (!known) throw InvalidArgument("unknown potential key '" + k + "'");
    }
    for (const char* key : keys) require_number(j, key);
  };
  if (type == "free") {
    only({});
    return Potential::free(mass);
  }
  if (type == "harmonic") {
    only({"omega"});
    return Potential::harmonic(mass, j.at("omega").get<double>());
  }
  if (type == "linear") {
    only({"force"});
    return Potential::linear(mass, j.at("force").get<double>());
  }
  if (type == "barrier") {
    only({"V0", "width"});
    return Potential::barrier(mass, j.at("V0").get<double>(), j.at("width").get<double>());
  }
  if (type == "custom") {
    for (const auto& [k, v] : j.items()) {
      if (k != "type" && k != "table") throw InvalidArgument("unknown potential key '" + k + "'");
    }
    if (!j.contains("table") || !j.at("table").is_array()) throw InvalidArgument("custom potential needs 'table'");
    PotentialTable t;
    for (const auto& row : j.at("table")) {
      if (!row.is_array() || row.size() != 3) throw InvalidArgument("custom table rows are [q, V, dV]");
      for (const auto& x : row) {
        if (!x.is_number()) throw InvalidArgument("custom table entries must be numbers");
      }
      t.q.push_back(row[0].get<double>());
      t.V.push_back(row[1].get<double>());
      t.dV.push_back(row[2].get<double>());
    }
    return Potential::custom(mass, std::move(t));
  }
  throw InvalidArgument("unknown potential type '" + type + "'");
}

json grid_to_json(const SpatialGrid& g) { return json{{"q_min", g.q_min}, {"q_max", g.q_max}, {"n", g.n}}; }

json times_to_json(const TimeGrid& t) {
  return json{{"t_min", t.t_min}, {"t_max", t.t_max}, {"steps", t.steps}};
}

SpatialGrid grid_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("grid must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "q_min" && k != "q_max" && k != "n") throw InvalidArgument("unknown grid key '" + k + "'");
  }
  require_number(j, "q_min");
  require_number(j, "q_max");
  if (!j.contains("n") || !j.at("n").is_number_unsigned()) throw InvalidArgument("'n' must be a positive integer");
  SpatialGrid g{j.at("q_min").get<double>(), j.at("q_max").get<double>(), j.at("n").get<std::size_t>()};
  g.validate();
  return g;
}

TimeGrid times_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("times must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "t_min" && k != "t_max" && k != "steps") throw InvalidArgument("unknown times key '" + k + "'");
  }
  require_number(j, "t_min");
  require_number(j, "t_max");
  if (!j.contains("steps") || !j.at("steps").is_number_unsigned()) {
    throw InvalidArgument("'steps' must be a positive integer");
  }
  TimeGrid t{j.at("t_min").get<double>(), j.at("t_max").get<double>(), j.at("steps").get<std::size_t>()};
  t.validate();
  return t;
}

void write_slab(const PropagatorSlab& slab, const fs::path& stem) {
  ensure_parent(stem);
  json j = field_meta(slab, "propagator", stem);
  j["Q"] = slab.source;
  write_binary(with_ext(stem, ".bin"), slab.values);
  write_json(with_ext(stem, ".json"), j);
}

void write_field(const WaveField& field, const fs::path& stem) {
  ensure_parent(stem);
  json j = field_meta(field, "wave", stem);
  write_binary(with_ext(stem, ".bin"), field.values);
  write_json(with_ext(stem, ".json"), j);
}

void write_phase(const PhaseField& w, const fs::path& stem) {
  ensure_parent(stem);
  SpaceTimeField shell;
  shell.grid = w.grid;
  shell.times = w.times;
  shell.potential = w.potential;
  shell.hbar = w.hbar;
  shell.method = "phase";
  json j = field_meta(shell, "phase", stem);
  j["tag"] = "phase";
  j["Q"] = std::isfinite(w.source) ? json(w.source) : json(nullptr);
  j["base_node"] = w.base_node;
  j["base_time"] = w.base_time;
  j["zero_threshold"] = w.zero_threshold;
  j["residues"] = w.residues;
  std::vector<cdouble> v = w.values;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (w.mask[k]) v[k] = {nan, nan};
  }
  write_binary(with_ext(stem, ".bin"), v);
  write_json(with_ext(stem, ".json"), j);
}

PropagatorSlab read_slab(const fs::path& stem) {
  const json j = read_meta(stem);
  if (get<std::string>(j, "kind") == "phase") throw FormatError("file holds a phase field, not a slab");
  PropagatorSlab s;
  load_common(j, s);
  s.source = j.contains("Q") && j.at("Q").is_number() ? j.at("Q").get<double>() : 0.0;
  s.values = read_binary(stem.parent_path() / get<std::string>(j, "data"), s.grid.n * s.times.count());
  for (const auto& z : s.values) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw FormatError("slab contains non-finite values");
  }
  return s;
}

PhaseField read_phase(const fs::path& stem) {
  const json j = read_meta(stem);
  if (get<std::string>(j, "kind") != "phase") throw FormatError("file does not hold a phase field");
  SpaceTimeField shell;
  load_common(j, shell);
  PhaseField w;
  w.grid = shell.grid;
  w.times = shell.times;
  w.potential = shell.potential;
  w.hbar = shell.hbar;
  w.source = j.at("Q").is_number() ? j.at("Q").get<double>() : std::numeric_limits<double>::quiet_NaN();
  w.base_node = get<std::size_t>(j, "base_node");
  w.base_time = get<std::size_t>(j, "base_time");
  w.zero_threshold = get<double>(j, "zero_threshold");
  w.residues = get<std::size_t>(j, "residues");
  w.values = read_binary(stem.parent_path() / get<std::string>(j, "data"), w.grid.n * w.times.count());
  w.mask.resize(w.values.size());
  for (std::size_t k = 0; k < w.values.size(); ++k) w.mask[k] = std::isnan(w.values[k].real()) ? 1 : 0;
  return w;
}

std::string config_hash(const json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

json stamp_report(const json& config, json payload) {
  json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config_hash"] = config_hash(config);
  for (auto& [k, v] : payload.items()) j[k] = v;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void write_residual_csv(const fs::path& path, const ResidualReport& r) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << "t,L2,max,median\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    out << fmt(r.times[k]) << ',' << fmt(r.l2[k]) << ',' << fmt(r.max[k]) << ',' << fmt(r.median[k]) << '\n';
  }
}

void write_action_csv(const fs::path& path, const ActionTable& table) {
  ensure_parent(path);
  const TableField<double> d = van_vleck(table);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << "q,Q,S,D\n";
  for (std::size_t a = 0; a < table.nQ(); ++a) {
    for (std::size_t b = 0; b < table.nq(); ++b) {
      out << fmt(table.q_nodes[b]) << ',' << fmt(table.Q_nodes[a]) << ',' << fmt(table.at(a, b)) << ',';
      const bool interior = a > 0 && b > 0 && a + 1 < table.nQ() && b + 1 < table.nq();
      if (interior) out << fmt(d.at(a - 1, b - 1));
      out << '\n';
    }
  }
}

void write_plot(const fs::path& path, const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("plot columns differ in length");
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  for (std::size_t k = 0; k < x.size(); ++k) out << fmt(x[k]) << ' ' << fmt(y[k]) << '\n';
}

json residual_to_json(const ResidualReport& r) {
  json j;
  j["dq"] = r.dq;
  j["dt"] = r.dt;
  j["order_q"] = r.order_q;
  j["order_t"] = r.order_t;
  j["worst_l2"] = r.worst_l2();
  j["worst_max"] = r.worst_max();
  j["worst_rel_max"] = r.worst_rel_max();
  j["times"] = r.times;
  j["l2"] = r.l2;
  j["max"] = r.max;
  j["median"] = r.median;
  return j;
}

json discrepancy_to_json(const Discrepancy& d) {
  return json{{"variance", d.variance},     {"variance_re", d.variance_re}, {"variance_im", d.variance_im},
              {"rms_re", d.rms_re},         {"rms_im", d.rms_im},           {"max_abs_re", d.max_abs_re},
              {"max_abs_im", d.max_abs_im}, {"count", d.count}};
}

}  // namespace qhj

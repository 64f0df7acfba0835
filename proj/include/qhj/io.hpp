#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "qhj/phase.hpp"
#include "qhj/propagator.hpp"
#include "qhj/semiclassical.hpp"

namespace qhj {

inline constexpr const char* kToolName = "qhj";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kFormatVersion = 1;

using json = nlohmann::ordered_json;

/// {"type": ..., parameters...}; the mass is carried separately.
json potential_to_json(const Potential& pot);
Potential potential_from_json(const json& j, double mass);

json grid_to_json(const SpatialGrid& g);
json times_to_json(const TimeGrid& t);
SpatialGrid grid_from_json(const json& j);
TimeGrid times_from_json(const json& j);

/// Writes <stem>.json (metadata) and <stem>.bin (interleaved re/im binary64,
/// little-endian, time-major with q fastest). Creates the directory.
void write_slab(const PropagatorSlab& slab, const std::filesystem::path& stem);
void write_field(const WaveField& field, const std::filesystem::path& stem);
/// Masked nodes are written as NaN and restored as masked.
void write_phase(const PhaseField& w, const std::filesystem::path& stem);

/// Throws FormatError on missing, truncated or inconsistent files.
PropagatorSlab read_slab(const std::filesystem::path& stem);
PhaseField read_phase(const std::filesystem::path& stem);

/// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const json& config);

/// Adds tool, version and config_hash keys ahead of the payload.
json stamp_report(const json& config, json payload);

void write_json(const std::filesystem::path& path, const json& j);
void write_residual_csv(const std::filesystem::path& path, const ResidualReport& r);
void write_action_csv(const std::filesystem::path& path, const ActionTable& table);
/// Two whitespace-separated columns per line.
void write_plot(const std::filesystem::path& path, const std::vector<double>& x, const std::vector<double>& y);

json residual_to_json(const ResidualReport& r);
json discrepancy_to_json(const Discrepancy& d);

}  // namespace qhj

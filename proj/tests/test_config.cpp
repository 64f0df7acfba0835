#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "qhj/config.hpp"
#include "qhj/errors.hpp"

using namespace qhj;
namespace fs = std::filesystem;

namespace {

json base() {
  return json::parse(R"({
    "version": 1,
    "potential": {"type": "barrier", "V0": 0.01, "width": 0.5},
    "hbar": 0.1,
    "m": 1.0,
    "grid": {"q_min": -32.0, "q_max": 32.0, "n": 1024},
    "times": {"t_min": 1.0, "t_max": 1.05, "steps": 20},
    "source": -2.0,
    "method": {"kind": "split-operator", "band_limit": 20.0, "filter_order": 16, "max_step": 0.001,
               "edge_tolerance": 1e-10, "filter": true},
    "tolerance": 1e-6,
    "window": {"q_lo": -4.0, "q_hi": 4.0},
    "output_dir": "runs/a",
    "q_axis": {"start": 1.0, "stride": 2, "count": 7},
    "Q_axis": {"start": -1.0, "count": 5},
    "t": 1.0,
    "bvp_mesh": 2000,
    "sweep": {"parameter": "V0", "values": [0.04, 0.02, 0.01]}
  })");
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("a full config parses") {
  const auto c = parse_config(base());
  CHECK(c.potential.kind() == Potential::Kind::barrier);
  CHECK(c.potential.height() == 0.01);
  CHECK(c.hbar == 0.1);
  CHECK(c.grid.n == 1024);
  CHECK(c.times.steps == 20);
  CHECK(c.source == -2.0);
  CHECK(c.method == "split-operator");
  CHECK(*c.evolve.band_limit == 20.0);
  CHECK(*c.evolve.max_step == 0.001);
  CHECK(c.evolve.filter);
  CHECK(*c.tolerance == 1e-6);
  CHECK(c.window.q_lo == -4.0);
  CHECK(c.window.q_hi == 4.0);
  CHECK(c.output_dir == fs::path("runs/a"));
  CHECK(c.q_axis->stride == 2);
  CHECK(c.Q_axis->stride == 1);
  CHECK(*c.t == 1.0);
  CHECK(c.bvp_mesh == 2000);
  CHECK(c.sweep->parameter == "V0");
  CHECK(c.sweep->values.size() == 3);
  CHECK(c.raw == base());
}

TEST_CASE("defaults for a minimal config") {
  const auto c = parse_config(json{{"potential", {{"type", "free"}}}});
  CHECK(c.hbar == 1.0);
  CHECK(c.m == 1.0);
  CHECK(c.method == "split-operator");
  CHECK_FALSE(c.tolerance.has_value());
  CHECK_FALSE(c.sweep.has_value());
  CHECK(c.output_dir == fs::path("out"));
}

TEST_CASE("unknown keys are rejected at every level") {
  const char* paths[] = {"/extra", "/method/extra", "/window/extra", "/q_axis/extra", "/Q_axis/extra", "/sweep/extra",
                         "/grid/extra", "/times/extra", "/potential/extra"};
  for (const char* p : paths) {
    json j = base();
    j[json::json_pointer(p)] = 1;
    CAPTURE(p);
    CHECK(error_of(j).find("extra") != std::string::npos);
  }
}

TEST_CASE("invalid values are rejected") {
  auto bad = [](const char* pointer, json value) {
    json j = base();
    j[json::json_pointer(pointer)] = value;
    CAPTURE(pointer);
    CHECK_FALSE(error_of(j).empty());
  };
  bad("/version", 2);
  bad("/version", "1");
  bad("/hbar", 0.0);
  bad("/hbar", -1.0);
  bad("/hbar", "small");
  bad("/m", 0.0);
  bad("/grid/n", 0);
  bad("/times/steps", 0);
  bad("/times/t_min", 0.0);
  bad("/method/kind", "crank-nicolson");
  bad("/method/filter", 1);
  bad("/method/filter_order", -2);
  bad("/tolerance", 0.0);
  bad("/t", -1.0);
  bad("/output_dir", 3);
  bad("/q_axis/count", 4);
  bad("/q_axis/stride", 0);
  bad("/sweep/parameter", "m");
  bad("/sweep/values", json::array({0.1}));
  bad("/sweep/values", json::array({0.1, -0.2}));
  bad("/potential/type", "harmonic");

  json j = base();
  j.erase("potential");
  CHECK(error_of(j).find("potential") != std::string::npos);
  j = base();
  j["Q_axis"].erase("start");
  CHECK_FALSE(error_of(j).empty());
  CHECK_FALSE(error_of(json::array()).empty());
}

TEST_CASE("a V0 sweep needs a barrier") {
  json j = base();
  j["potential"] = {{"type", "harmonic"}, {"omega", 1.0}};
  CHECK(error_of(j).find("barrier") != std::string::npos);
  j["sweep"]["parameter"] = "hbar";
  CHECK(error_of(j).empty());
}

TEST_CASE("node axes snap to the grid") {
  const SpatialGrid g{-1.0, 1.0, 64};
  const NodeAxis a{0.013, 3, 5};
  const auto nodes = a.nodes(g);
  REQUIRE(nodes.size() == 5);
  CHECK(nodes[0] == g.node(g.nearest(0.013)));
  for (std::size_t k = 1; k < 5; ++k) CHECK(nodes[k] - nodes[k - 1] == doctest::Approx(3.0 * g.dq()));
  CHECK_THROWS_AS((NodeAxis{0.9, 3, 5}.nodes(g)), InvalidArgument);
}

TEST_CASE("load_config reads files and reports bad ones") {
  const fs::path dir = fs::temp_directory_path() / "qhj_test_config";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << base().dump(2);
    std::ofstream(dir / "broken.json") << "{\"potential\": ";
  }
  CHECK(load_config(dir / "ok.json").grid.n == 1024);
  CHECK_THROWS_AS(load_config(dir / "broken.json"), InvalidArgument);
  CHECK_THROWS_AS(load_config(dir / "absent.json"), InvalidArgument);
}

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qhj/algebra/derivations.hpp"
#include "qhj/algebra/parser.hpp"
#include "qhj/config.hpp"
#include "qhj/errors.hpp"
#include "qhj/io.hpp"
#include "qhj/phase.hpp"
#include "qhj/semiclassical.hpp"

using namespace qhj;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kDomain = 2, kTolerance = 3 };

constexpr double kDefaultTolerance = 1e-3;

struct Globals {
  std::string config;
  std::string out;
  std::optional<double> tolerance;
  std::uint64_t seed = 0;
};

RunConfig load(const Globals& g) {
  if (g.config.empty()) throw InvalidArgument("--config is required for this command");
  RunConfig c = load_config(g.config);
  if (!g.out.empty()) {
    c.output_dir = g.out;
    c.raw["output_dir"] = g.out;
  }
  if (g.tolerance) {
    c.tolerance = *g.tolerance;
    c.raw["tolerance"] = *g.tolerance;
  }
  return c;
}

fs::path out_dir(const Globals& g, const std::optional<RunConfig>& c) {
  if (!g.out.empty()) return g.out;
  if (c) return c->output_dir;
  return "out";
}

double snap(const SpatialGrid& grid, double x) { return grid.node(grid.nearest(x)); }

PropagatorSlab make_slab(const RunConfig& c, const TimeGrid& times, double Q) {
  if (c.method == "analytic") return analytic_slab(c.potential, c.hbar, c.grid, times, Q);
  return evolve_split_operator(c.potential, c.hbar, c.grid, times, Q, c.evolve);
}

void emit(const fs::path& path, const json& report) {
  write_json(path, report);
  std::cout << report.dump(2) << '\n';
}

int cmd_propagate(const Globals& g) {
  const RunConfig c = load(g);
  const double Q = snap(c.grid, c.source);
  const PropagatorSlab slab = make_slab(c, c.times, Q);
  const fs::path dir = out_dir(g, c);
  write_slab(slab, dir / "slab");
  json payload;
  payload["command"] = "propagate";
  payload["method"] = slab.method;
  payload["source_requested"] = c.source;
  payload["source"] = Q;
  payload["momentum_cutoff"] = slab.momentum_cutoff;
  payload["norm_drift"] = slab.norm_drift;
  payload["files"] = {"slab.json", "slab.bin"};
  emit(dir / "propagate.json", stamp_report(c.raw, payload));
  return kOk;
}

int cmd_phase(const Globals& g, const std::string& slab_stem) {
  std::optional<RunConfig> c;
  if (!g.config.empty()) c = load(g);
  const fs::path dir = out_dir(g, c);
  const fs::path stem = slab_stem.empty() ? dir / "slab" : fs::path(slab_stem);
  const PhaseField w = extract_phase(read_slab(stem));
  write_phase(w, dir / "phase");
  std::size_t masked = 0;
  for (auto m : w.mask) masked += m;
  json payload;
  payload["command"] = "phase";
  payload["slab"] = stem.string();
  payload["base_node"] = w.base_node;
  payload["base_time"] = w.base_time;
  payload["masked_nodes"] = masked;
  payload["residues"] = w.residues;
  payload["files"] = {"phase.json", "phase.bin"};
  emit(dir / "phase_report.json", stamp_report(c ? c->raw : json{{"slab", stem.string()}}, payload));
  return kOk;
}

int cmd_check_qhje(const Globals& g, const std::string& slab_stem, bool analytic) {
  std::optional<RunConfig> c;
  if (!g.config.empty() || analytic) c = load(g);
  const fs::path dir = out_dir(g, c);
  const double tol = g.tolerance ? *g.tolerance : (c && c->tolerance ? *c->tolerance : kDefaultTolerance);
  QhjeOptions opts;
  if (c) opts.window = c->window;

  PropagatorSlab slab;
  json inputs = c ? c->raw : json::object();
  if (analytic) {
    slab = analytic_slab(c->potential, c->hbar, c->grid, c->times, snap(c->grid, c->source));
    inputs["check"] = "analytic";
  } else {
    const fs::path stem = slab_stem.empty() ? dir / "slab" : fs::path(slab_stem);
    slab = read_slab(stem);
    inputs["slab"] = stem.string();
  }
  inputs["tolerance"] = tol;

  json payload;
  payload["command"] = "check-qhje";
  payload["tolerance"] = tol;
  PhaseField w;
  try {
    w = extract_phase(slab);
  } catch (const CausticSliceError& e) {
    payload["status"] = "fail";
    payload["diagnostic"] = std::string("all-masked slice: ") + e.what();
    emit(dir / "qhje.json", stamp_report(inputs, payload));
    return kTolerance;
  }
  const ResidualReport r = qhje_residual(w, from_standard(slab.potential, slab.hbar), opts);
  const bool pass = r.worst_max() < tol;
  write_residual_csv(dir / "qhje_residual.csv", r);
  write_plot(dir / "qhje_max.dat", r.times, r.max);
  payload["status"] = pass ? "pass" : "fail";
  payload["residual"] = residual_to_json(r);
  emit(dir / "qhje.json", stamp_report(inputs, payload));
  return pass ? kOk : kTolerance;
}

struct ScRun {
  ActionTable table;
  Discrepancy d;
  double t = 0.0;
};

ScRun semiclassical_run(const RunConfig& c) {
  if (!c.q_axis || !c.Q_axis) throw InvalidArgument("semiclassical runs need q_axis and Q_axis");
  const double t = c.t ? *c.t : c.times.t_max;
  const TimeGrid times = c.t ? TimeGrid{0.9 * t, t, 10} : c.times;
  const auto qn = c.q_axis->nodes(c.grid);
  const auto Qn = c.Q_axis->nodes(c.grid);
  BvpOptions bvp;
  bvp.mesh = c.bvp_mesh;
  ScRun run;
  run.t = t;
  run.table = build_action_table(c.potential, qn, Qn, t, bvp);
  const auto wsc = semiclassical_phase(run.table, c.hbar);
  std::vector<PhaseField> family;
  for (double Q : wsc.Q_nodes) family.push_back(extract_phase(make_slab(c, times, Q)));
  const auto W = gather_phase(family, times.count() - 1, wsc.q_nodes, wsc.Q_nodes);
  run.d = compare_semiclassical(W, wsc, c.hbar);
  return run;
}

json sweep_report(const RunConfig& c, const fs::path& dir) {
  const SweepSpec& sw = *c.sweep;
  std::vector<double> rms_re, rms_im;
  json rows = json::array();
  fs::create_directories(dir);
  std::ofstream csv(dir / "sweep.csv", std::ios::trunc);
  csv << sw.parameter << ",variance,variance_re,variance_im\n";
  csv.precision(17);
  for (double v : sw.values) {
    RunConfig ci = c;
    if (sw.parameter == "V0") {
      ci.potential = Potential::barrier(c.m, v, c.potential.width());
    } else {
      ci.hbar = v;
    }
    const ScRun run = semiclassical_run(ci);
    rms_re.push_back(std::sqrt(run.d.variance_re));
    rms_im.push_back(std::sqrt(run.d.variance_im));
    csv << v << ',' << run.d.variance << ',' << run.d.variance_re << ',' << run.d.variance_im << '\n';
    rows.push_back(json{{sw.parameter, v}, {"discrepancy", discrepancy_to_json(run.d)}});
  }
  write_plot(dir / "sweep_re.dat", sw.values, rms_re);
  json j;
  j["parameter"] = sw.parameter;
  j["runs"] = rows;
  j["slope_re"] = fit_loglog(sw.values, rms_re).slope;
  j["slope_im"] = fit_loglog(sw.values, rms_im).slope;
  return j;
}

int cmd_semiclassical(const Globals& g) {
  const RunConfig c = load(g);
  const fs::path dir = out_dir(g, c);
  const ScRun run = semiclassical_run(c);
  write_action_csv(dir / "action.csv", run.table);
  json payload;
  payload["command"] = "semiclassical";
  payload["t"] = run.t;
  payload["hbar"] = c.hbar;
  payload["discrepancy"] = discrepancy_to_json(run.d);
  bool pass = true;
  if (c.tolerance) {
    pass = run.d.variance < *c.tolerance;
    payload["tolerance"] = *c.tolerance;
    payload["status"] = pass ? "pass" : "fail";
  }
  if (c.sweep) payload["sweep"] = sweep_report(c, dir);
  emit(dir / "semiclassical.json", stamp_report(c.raw, payload));
  return pass ? kOk : kTolerance;
}

int cmd_sweep(const Globals& g) {
  const RunConfig c = load(g);
  if (!c.sweep) throw InvalidArgument("the sweep command needs a 'sweep' block in the config");
  const fs::path dir = out_dir(g, c);
  json payload;
  payload["command"] = "sweep";
  payload["sweep"] = sweep_report(c, dir);
  emit(dir / "sweep.json", stamp_report(c.raw, payload));
  return kOk;
}

algebra::SymbolBindings parse_bindings(const std::vector<std::string>& items) {
  algebra::SymbolBindings b;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("binding '" + item + "' is not name=value");
    const auto sym = algebra::symbol_from_name(item.substr(0, eq));
    if (!sym) throw InvalidArgument("unknown symbol '" + item.substr(0, eq) + "'");
    b.set(*sym, algebra::parse_scalar(item.substr(eq + 1)).evaluate({}));
  }
  return b;
}

std::string complex_text(std::complex<double> z) {
  char buf[64];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.15g", z.real());
  } else {
    std::snprintf(buf, sizeof buf, "%.15g%+.15g*i", z.real(), z.imag());
  }
  return buf;
}

algebra::CommutatorSpec commutator_from(const std::string& kappa) {
  return algebra::CommutatorSpec{algebra::parse_scalar(kappa)};
}

struct OpArgs {
  std::string expr;
  std::string kappa = "-i*hbar*t/m";
  std::optional<double> q, Q;
  std::vector<std::string> bind;
  std::size_t count = 5;
};

int op_wellorder(const OpArgs& a) {
  const auto w = algebra::wellorder(algebra::parse_expr(a.expr), commutator_from(a.kappa));
  std::cout << w.str() << '\n';
  if (a.q || a.Q) {
    if (!a.q || !a.Q) throw InvalidArgument("--q and --Q go together");
    std::cout << "<q|W|Q>/<q|Q> = " << complex_text(algebra::matrix_element(w, *a.q, *a.Q, parse_bindings(a.bind)))
              << '\n';
  }
  return kOk;
}

int op_momenta(const OpArgs& a) {
  const auto w = algebra::wellorder(algebra::parse_expr(a.expr), commutator_from(a.kappa));
  const auto mom = algebra::canonical_momenta(w);
  std::cout << "p = " << mom.p.str() << '\n' << "P = " << mom.P.str() << '\n';
  return kOk;
}

int op_random(const OpArgs& a, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const char* atoms[] = {"q", "Q", "q^2", "Q^2", "hbar", "exp(u*q)", "exp(-u*Q)"};
  const auto comm = commutator_from(a.kappa);
  for (std::size_t n = 0; n < a.count; ++n) {
    std::string text;
    const int len = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int k = 0; k < len; ++k) {
      if (k) text += "*";
      text += atoms[std::uniform_int_distribution<int>(0, 6)(rng)];
    }
    std::cout << text << " -> " << algebra::wellorder(algebra::parse_expr(text), comm).str() << '\n';
  }
  return kOk;
}

void show_parse_error(const std::string& text, const ParseError& e) {
  std::cerr << "error: " << e.message() << '\n' << "  " << text << '\n' << "  " << std::string(e.position(), ' ') << "^\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Hamilton-Jacobi workbench"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_option("--out", g.out, "Output directory (overrides the config)");
  app.add_option("--tolerance", g.tolerance, "Pass/fail tolerance (overrides the config)");
  app.add_option("--seed", g.seed, "Seed for randomized checks");

  std::string slab_stem;
  bool analytic = false;
  auto* propagate = app.add_subcommand("propagate", "Evolve the kernel slab and write it");
  auto* phase = app.add_subcommand("phase", "Extract the complex phase W of a slab");
  phase->add_option("--slab", slab_stem, "Slab stem (default <out>/slab)");
  auto* check = app.add_subcommand("check-qhje", "QHJE residual of a slab's phase");
  check->add_option("--slab", slab_stem, "Slab stem (default <out>/slab)");
  check->add_flag("--analytic", analytic, "Use the closed-form kernel for the configured potential");
  auto* semi = app.add_subcommand("semiclassical", "Compare W with S - (i hbar/2) ln(-d2S/dqdQ)");
  auto* sweep = app.add_subcommand("sweep", "Semiclassical discrepancy over a V0 or hbar sweep");

  OpArgs oa;
  auto* op = app.add_subcommand("op", "Operator algebra");
  op->require_subcommand(1);
  op->add_option("--kappa", oa.kappa, "Value of [q, Q]")->capture_default_str();
  auto* wo = op->add_subcommand("wellorder", "Print the well-ordered normal form");
  wo->add_option("expr", oa.expr, "Expression in q, Q")->required();
  wo->add_option("--q", oa.q, "Evaluate the matrix element at this q");
  wo->add_option("--Q", oa.Q, "Evaluate the matrix element at this Q");
  wo->add_option("--bind", oa.bind, "Symbol values, name=value");
  auto* smallt = op->add_subcommand("smallt", "Derive dg/dt for the free small-t ansatz");
  auto* inv = op->add_subcommand("inverse-wo", "Matrix element of [1/(q - Q)]_WO");
  inv->add_option("--q", oa.q, "q")->required();
  inv->add_option("--Q", oa.Q, "Q")->required();
  auto* mom = op->add_subcommand("momenta", "Canonical momenta p = dW/dq, P = -dW/dQ");
  mom->add_option("expr", oa.expr, "Generating function W(q, Q)")->required();
  auto* rnd = op->add_subcommand("random", "Well-order random products (seeded by --seed)");
  rnd->add_option("--count", oa.count, "Number of expressions")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*propagate) return cmd_propagate(g);
    if (*phase) return cmd_phase(g, slab_stem);
    if (*check) return cmd_check_qhje(g, slab_stem, analytic);
    if (*semi) return cmd_semiclassical(g);
    if (*sweep) return cmd_sweep(g);
    if (*wo) return op_wellorder(oa);
    if (*mom) return op_momenta(oa);
    if (*rnd) return op_random(oa, g.seed);
    if (*smallt) {
      std::cout << "dg/dt = " << algebra::qhje_smallt_derivation(algebra::CommutatorSpec::free_particle()).str()
                << '\n';
      return kOk;
    }
    if (*inv) {
      const auto r = algebra::inverse_wo(*oa.q, *oa.Q);
      std::printf("%.15g\n", r.value);
      return kOk;
    }
  } catch (const ParseError& e) {
    show_parse_error(oa.expr.empty() ? oa.kappa : oa.expr, e);
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

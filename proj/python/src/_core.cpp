#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qhj/algebra/derivations.hpp"
#include "qhj/algebra/parser.hpp"
#include "qhj/errors.hpp"
#include "qhj/io.hpp"
#include "qhj/phase.hpp"

namespace py = pybind11;
using namespace qhj;

namespace {

py::array_t<cdouble> as_array(const std::vector<cdouble>& v, std::size_t nt, std::size_t nq) {
  py::array_t<cdouble> out({nt, nq});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict slab_dict(const PropagatorSlab& s) {
  py::dict d;
  d["values"] = as_array(s.values, s.nt(), s.nq());
  d["q"] = s.grid.nodes();
  d["t"] = s.times.times();
  d["source"] = s.source;
  d["method"] = s.method;
  d["momentum_cutoff"] = s.momentum_cutoff;
  d["norm_drift"] = s.norm_drift;
  return d;
}

algebra::SymbolBindings bindings_from(const std::map<std::string, std::complex<double>>& values) {
  algebra::SymbolBindings b;
  for (const auto& [name, v] : values) {
    const auto sym = algebra::symbol_from_name(name);
    if (!sym) throw InvalidArgument("unknown symbol '" + name + "'");
    b.set(*sym, v);
  }
  return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core routines of the qhj package";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<CausticError>(m, "CausticError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Potential>(m, "Potential")
      .def_static("free", &Potential::free, py::arg("mass") = 1.0)
      .def_static("harmonic", &Potential::harmonic, py::arg("mass"), py::arg("omega"))
      .def_static("linear", &Potential::linear, py::arg("mass"), py::arg("force"))
      .def_static("barrier", &Potential::barrier, py::arg("mass"), py::arg("V0"), py::arg("width"))
      .def_property_readonly("kind", &Potential::tag)
      .def_property_readonly("mass", &Potential::mass)
      .def("__call__", &Potential::value);

  py::class_<SpatialGrid>(m, "SpatialGrid")
      .def(py::init([](double lo, double hi, std::size_t n) { return SpatialGrid{lo, hi, n}; }), py::arg("q_min"),
           py::arg("q_max"), py::arg("n"))
      .def_readonly("q_min", &SpatialGrid::q_min)
      .def_readonly("q_max", &SpatialGrid::q_max)
      .def_readonly("n", &SpatialGrid::n)
      .def_property_readonly("dq", &SpatialGrid::dq)
      .def("nodes", &SpatialGrid::nodes);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init([](double lo, double hi, std::size_t steps) { return TimeGrid{lo, hi, steps}; }),
           py::arg("t_min"), py::arg("t_max"), py::arg("steps"))
      .def_readonly("t_min", &TimeGrid::t_min)
      .def_readonly("t_max", &TimeGrid::t_max)
      .def_readonly("steps", &TimeGrid::steps)
      .def("times", &TimeGrid::times);

  m.def("kernel_free", &kernel_free, py::arg("m"), py::arg("hbar"), py::arg("q"), py::arg("Q"), py::arg("t"));
  m.def("kernel_harmonic", &kernel_harmonic, py::arg("m"), py::arg("omega"), py::arg("hbar"), py::arg("q"),
        py::arg("Q"), py::arg("t"));

  m.def(
      "analytic_slab",
      [](const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times, double Q) {
        return slab_dict(analytic_slab(pot, hbar, grid, times, Q));
      },
      py::arg("potential"), py::arg("hbar"), py::arg("grid"), py::arg("times"), py::arg("Q"),
      "Closed-form kernel K(q, Q, t) sampled on the grid; values has shape (nt, nq).");

  m.def(
      "evolve_split_operator",
      [](const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times, double Q,
         std::optional<double> band_limit) {
        EvolveOptions opts;
        opts.band_limit = band_limit;
        return slab_dict(evolve_split_operator(pot, hbar, grid, times, Q, opts));
      },
      py::arg("potential"), py::arg("hbar"), py::arg("grid"), py::arg("times"), py::arg("Q"),
      py::arg("band_limit") = py::none());

  m.def(
      "extract_phase",
      [](const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times, double Q, bool analytic) {
        const auto slab = analytic ? analytic_slab(pot, hbar, grid, times, Q)
                                   : evolve_split_operator(pot, hbar, grid, times, Q);
        const auto w = extract_phase(slab);
        py::array_t<bool> mask({w.times.count(), w.grid.n});
        std::copy(w.mask.begin(), w.mask.end(), mask.mutable_data());
        py::dict d;
        d["W"] = as_array(w.values, w.times.count(), w.grid.n);
        d["mask"] = mask;
        d["residues"] = w.residues;
        return d;
      },
      py::arg("potential"), py::arg("hbar"), py::arg("grid"), py::arg("times"), py::arg("Q"),
      py::arg("analytic") = true, "W = -i hbar ln K with branch tracking; masked nodes hold NaN.");

  m.def(
      "qhje_residual",
      [](const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times, double Q, bool analytic,
         double q_lo, double q_hi) {
        const auto slab = analytic ? analytic_slab(pot, hbar, grid, times, Q)
                                   : evolve_split_operator(pot, hbar, grid, times, Q);
        QhjeOptions opts;
        opts.window = {q_lo, q_hi};
        const auto r = qhje_residual(extract_phase(slab), from_standard(pot, hbar), opts);
        py::dict d;
        d["times"] = r.times;
        d["max"] = r.max;
        d["l2"] = r.l2;
        d["rel_max"] = r.rel_max;
        d["worst_max"] = r.worst_max();
        return d;
      },
      py::arg("potential"), py::arg("hbar"), py::arg("grid"), py::arg("times"), py::arg("Q"),
      py::arg("analytic") = true, py::arg("q_lo") = -1e300, py::arg("q_hi") = 1e300);

  m.def(
      "wellorder",
      [](const std::string& expr, const std::string& kappa) {
        return algebra::wellorder(algebra::parse_expr(expr), algebra::CommutatorSpec{algebra::parse_scalar(kappa)})
            .str();
      },
      py::arg("expr"), py::arg("kappa") = "-i*hbar*t/m", "Normal form with every q to the left of every Q.");

  m.def(
      "matrix_element",
      [](const std::string& expr, std::complex<double> q, std::complex<double> Q,
         const std::map<std::string, std::complex<double>>& bindings, const std::string& kappa) {
        const auto w =
            algebra::wellorder(algebra::parse_expr(expr), algebra::CommutatorSpec{algebra::parse_scalar(kappa)});
        return algebra::matrix_element(w, q, Q, bindings_from(bindings));
      },
      py::arg("expr"), py::arg("q"), py::arg("Q"), py::arg("bindings") = std::map<std::string, std::complex<double>>{},
      py::arg("kappa") = "-i*hbar*t/m");

  m.def("smallt_derivation",
        [] { return algebra::qhje_smallt_derivation(algebra::CommutatorSpec::free_particle()).str(); });

  m.def(
      "inverse_wo",
      [](double q, double Q) {
        const auto r = algebra::inverse_wo(q, Q);
        return py::make_tuple(r.value, r.error_estimate);
      },
      py::arg("q"), py::arg("Q"), "Matrix element of [1/(q - Q)]_WO and its error estimate; needs q > Q.");

  m.def(
      "config_hash", [](const std::string& text) { return config_hash(json::parse(text)); }, py::arg("json_text"));
}

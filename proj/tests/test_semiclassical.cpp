#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qhj/errors.hpp"
#include "qhj/semiclassical.hpp"

using namespace qhj;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> axis(double lo, double h, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = lo + h * static_cast<double>(k);
  return x;
}

double harmonic_action(double m, double w, double q, double Q, double t) {
  return m * w / (2.0 * std::sin(w * t)) * ((q * q + Q * Q) * std::cos(w * t) - 2.0 * q * Q);
}

}  // namespace

TEST_CASE("free boundary-value problem") {
  const auto tr = solve_bvp(Potential::free(2.0), -1.0, 2.0, 1.5);
  CHECK(tr.action == doctest::Approx(2.0 * 9.0 / 3.0).epsilon(1e-12));
  CHECK(tr.initial_momentum() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(tr.final_momentum() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(tr.q.front() == doctest::Approx(-1.0));
  CHECK(tr.q.back() == doctest::Approx(2.0));
  CHECK(tr.boundary_residual < 1e-10);
  CHECK(tr.energy_drift < 1e-12);
}

TEST_CASE("harmonic boundary-value problem") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> x(-3.0, 3.0), tt(0.2, 2.5);
  const double m = 1.4, w = 0.9;
  const auto pot = Potential::harmonic(m, w);
  for (int n = 0; n < 20; ++n) {
    const double Q = x(rng), q = x(rng), t = tt(rng);
    const auto tr = solve_bvp(pot, Q, q, t);
    CHECK(tr.action == doctest::Approx(harmonic_action(m, w, q, Q, t)).epsilon(1e-9));
    const double p_exact = m * w * (q * std::cos(w * t) - Q) / std::sin(w * t);
    CHECK(tr.final_momentum() == doctest::Approx(p_exact).epsilon(1e-9));
    CHECK(tr.energy_drift < 1e-8);
  }
  CHECK_THROWS_AS(solve_bvp(pot, 0.0, 1.0, kPi / w), NoPathError);
  CHECK_THROWS_AS(solve_bvp(pot, 0.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("linear potential principal function") {
  const double m = 1.2, F = 0.7;
  const auto pot = Potential::linear(m, F);
  for (double t : {0.5, 1.0, 2.0}) {
    const double Q = -0.4, q = 1.3;
    const double exact = m * (q - Q) * (q - Q) / (2.0 * t) + 0.5 * F * t * (q + Q) - F * F * t * t * t / (24.0 * m);
    CHECK(principal_function(pot, Q, q, t) == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("perturbative step action") {
  CHECK(perturbative_step_action(0.01, 1.0, 1.0, -1.0, 1.0, 1.0) == doctest::Approx(1.995));
  CHECK_THROWS_AS(perturbative_step_action(0.01, 1.0, 1.0, -0.2, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(perturbative_step_action(0.01, 1.0, 1.0, -1.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("barrier action approaches the perturbative form quadratically in V0") {
  std::vector<double> v0s, err;
  for (double V0 : {0.04, 0.02, 0.01}) {
    const double s = principal_function(Potential::barrier(1.0, V0, 1.0), -2.0, 2.0, 1.0);
    v0s.push_back(V0);
    err.push_back(std::abs(s - perturbative_step_action(V0, 1.0, 1.0, -2.0, 2.0, 1.0)));
  }
  const auto fit = fit_loglog(v0s, err);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(err.back() < 1e-6);
}

TEST_CASE("dS/dq is the final momentum and S solves the Hamilton-Jacobi equation") {
  const auto pot = Potential::barrier(1.0, 0.3, 1.0);
  const double Q = -2.0, q = 2.0, t = 1.0, h = 1e-4;
  const auto tr = solve_bvp(pot, Q, q, t);
  const double dSdq = (principal_function(pot, Q, q + h, t) - principal_function(pot, Q, q - h, t)) / (2.0 * h);
  const double dSdQ = (principal_function(pot, Q + h, q, t) - principal_function(pot, Q - h, q, t)) / (2.0 * h);
  const double dSdt = (principal_function(pot, Q, q, t + h) - principal_function(pot, Q, q, t - h)) / (2.0 * h);
  CHECK(dSdq == doctest::Approx(tr.final_momentum()).epsilon(1e-6));
  CHECK(-dSdQ == doctest::Approx(tr.initial_momentum()).epsilon(1e-6));
  CHECK(std::abs(dSdt + dSdq * dSdq / 2.0 + pot.smooth_value(q)) < 1e-6);
}

TEST_CASE("action table and van Vleck determinant") {
  const auto q = axis(0.5, 0.25, 7);
  const auto Q = axis(-1.0, 0.25, 6);
  const auto free = build_action_table(Potential::free(1.5), q, Q, 0.8);
  CHECK(free.nq() == 7);
  CHECK(free.at(2, 3) == doctest::Approx(1.5 * std::pow(q[3] - Q[2], 2) / 1.6));
  const auto d = van_vleck(free);
  CHECK(d.values.size() == 5 * 4);
  CHECK(d.q_nodes.front() == doctest::Approx(q[1]));
  for (double v : d.values) CHECK(v == doctest::Approx(-1.5 / 0.8).epsilon(1e-8));

  const auto harm = build_action_table(Potential::harmonic(1.0, 1.0), q, Q, 1.0);
  for (double v : van_vleck(harm).values) CHECK(v == doctest::Approx(-1.0 / std::sin(1.0)).epsilon(1e-8));

  CHECK_THROWS_AS(build_action_table(Potential::free(1.0), axis(0.0, 1.0, 4), Q, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_action_table(Potential::free(1.0), {0.0, 1.0, 2.0, 3.5, 4.0}, Q, 1.0), InvalidArgument);
}

TEST_CASE("van Vleck differences converge at second order") {
  const double V0 = 0.2, a = 1.0, t = 1.0;
  const double x0 = 2.0, y0 = -2.0;
  const double c = V0 * a * t;
  const double exact = -1.0 + 2.0 * c / std::pow(x0 - y0, 3);
  double err[2];
  const double hs[2] = {0.2, 0.1};
  for (int j = 0; j < 2; ++j) {
    const double h = hs[j];
    const auto table = perturbative_step_table(V0, a, 1.0, axis(x0 - 2 * h, h, 5), axis(y0 - 2 * h, h, 5), t);
    const auto d = van_vleck(table);
    err[j] = std::abs(d.at(1, 1) - exact);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("perturbative step table") {
  const auto q = axis(1.0, 0.5, 5), Q = axis(-3.0, 0.5, 5);
  const auto tab = perturbative_step_table(0.1, 1.0, 2.0, q, Q, 0.7);
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 5; ++b) {
      const double d = q[b] - Q[a];
      CHECK(tab.at(a, b) == doctest::Approx(perturbative_step_action(0.1, 1.0, 2.0, Q[a], q[b], 0.7)));
      CHECK(tab.p_final[a * 5 + b] == doctest::Approx(2.0 * d / 0.7 + 0.1 * 0.7 / (d * d)));
    }
  }
}

TEST_CASE("semiclassical phase") {
  const auto q = axis(0.0, 0.5, 5), Q = axis(-1.0, 0.5, 5);
  const double hb = 0.3;
  const auto tab = build_action_table(Potential::free(1.0), q, Q, 2.0);
  const auto wsc = semiclassical_phase(tab, hb);
  CHECK(wsc.values.size() == 9);
  const std::complex<double> expect =
      tab.at(1, 1) - std::complex<double>(0.0, 0.5 * hb) * std::log(0.5);
  CHECK(std::abs(wsc.at(0, 0) - expect) < 1e-9);

  ActionTable bad = tab;
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = 0; b < 5; ++b) bad.S[a * 5 + b] = q[b] * Q[a];
  CHECK_THROWS_AS(semiclassical_phase(bad, hb), CausticError);
  CHECK_THROWS_AS(semiclassical_phase(tab, 0.0), InvalidArgument);
}

TEST_CASE("compare_semiclassical ignores constants and 2 pi hbar jumps") {
  const auto q = axis(0.0, 0.5, 6), Q = axis(-1.0, 0.5, 6);
  const double hb = 0.1;
  const auto wsc = semiclassical_phase(build_action_table(Potential::harmonic(1.0, 1.0), q, Q, 1.0), hb);
  auto w = wsc;
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    w.values[k] += std::complex<double>(0.4, -0.9) + 2.0 * kPi * hb * static_cast<double>(k % 3);
  }
  const auto d = compare_semiclassical(w, wsc, hb);
  CHECK(d.variance < 1e-24);
  CHECK(d.count == w.values.size());

  auto off = w;
  off.values[3] += std::complex<double>(1e-3, 2e-3);
  const auto d2 = compare_semiclassical(off, wsc, hb);
  CHECK(d2.max_abs_re == doctest::Approx(1e-3).epsilon(1e-6));
  CHECK(d2.max_abs_im == doctest::Approx(2e-3).epsilon(1e-6));
  CHECK(d2.variance > 0.0);

  auto shifted = w;
  shifted.q_nodes[0] += 0.1;
  CHECK_THROWS_AS(compare_semiclassical(shifted, wsc, hb), InvalidArgument);
}

TEST_CASE("gather_phase pulls W from a family") {
  const SpatialGrid g{-10.0, 10.0, 256};
  const TimeGrid t{0.9, 1.0, 10};
  const auto pot = Potential::free(1.0);
  std::vector<double> Qs = {g.node(120), g.node(124), g.node(128)};
  std::vector<PhaseField> fam;
  for (double Q : Qs) fam.push_back(extract_phase(analytic_slab(pot, 1.0, g, t, Q)));
  std::vector<double> qs = {g.node(140), g.node(144), g.node(148)};
  const auto w = gather_phase(fam, 10, qs, Qs);
  CHECK(w.values.size() == 9);
  CHECK(w.at(2, 1) == fam[2].at(10, 144));

  CHECK_THROWS_AS(gather_phase(fam, 11, qs, Qs), InvalidArgument);
  CHECK_THROWS_AS(gather_phase(fam, 10, {0.01, qs[1], qs[2]}, Qs), InvalidArgument);
  CHECK_THROWS_AS(gather_phase(fam, 10, qs, {Qs[0], Qs[1]}), InvalidArgument);
  CHECK_THROWS_AS(gather_phase(fam, 10, qs, {Qs[1], Qs[0], Qs[2]}), InvalidArgument);
  fam[1].mask[10 * g.n + 144] = 1;
  CHECK_THROWS_AS(gather_phase(fam, 10, qs, Qs), InvalidArgument);
}

TEST_CASE("log-log fit") {
  const auto f = fit_loglog({1.0, 2.0, 4.0}, {3.0, 12.0, 48.0});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS(fit_loglog({1.0}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0, -1.0}), InvalidArgument);
  CHECK_THROWS_AS(fit_loglog({1.0, 1.0}, {1.0, 2.0}), InvalidArgument);
}

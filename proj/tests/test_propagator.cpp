#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qhj/errors.hpp"
#include "qhj/propagator.hpp"

using namespace qhj;

namespace {

constexpr double kPi = std::numbers::pi;

double max_rel_error(const SpaceTimeField& a, const SpaceTimeField& b, double q_lo, double q_hi) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.nt(); ++k) {
    for (std::size_t i = 0; i < a.nq(); ++i) {
      const double q = a.grid.node(i);
      if (q < q_lo || q > q_hi) continue;
      worst = std::max(worst, std::abs(a.at(k, i) - b.at(k, i)) / std::abs(b.at(k, i)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("free kernel examples") {
  const cdouble k = kernel_free(1.0, 1.0, 0.0, 0.0, 1.0);
  const cdouble expect = std::sqrt(1.0 / (2.0 * kPi)) * std::polar(1.0, -kPi / 4.0);
  CHECK(std::abs(k - expect) < 1e-15);
  CHECK(std::abs(k) == doctest::Approx(0.3989422804014327));

  const cdouble far = kernel_free(1.0, 1.0, 1.0, 0.0, 0.5);
  CHECK(std::arg(far) == doctest::Approx(1.0 - kPi / 4.0));

  CHECK_THROWS_AS(kernel_free(1.0, 1.0, 0.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(kernel_free(1.0, 1.0, 0.0, 0.0, -1.0), DomainError);
}

TEST_CASE("free kernel modulus is sqrt(m/(2 pi hbar t))") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 3.0), x(-5.0, 5.0);
  for (int n = 0; n < 100; ++n) {
    const double m = u(rng), hb = u(rng), t = u(rng);
    const cdouble k = kernel_free(m, hb, x(rng), x(rng), t);
    CHECK(std::abs(k) == doctest::Approx(std::sqrt(m / (2.0 * kPi * hb * t))).epsilon(1e-12));
  }
}

TEST_CASE("harmonic kernel examples") {
  const cdouble k = kernel_harmonic(1.0, 1.0, 1.0, 0.0, 0.0, kPi / 2.0);
  CHECK(std::abs(k - std::sqrt(1.0 / (2.0 * kPi)) * std::polar(1.0, -kPi / 4.0)) < 1e-14);

  for (double q : {-2.0, 0.0, 0.7, 3.0}) {
    const cdouble h = kernel_harmonic(1.3, 1e-4, 0.8, q, 0.4, 0.9);
    const cdouble f = kernel_free(1.3, 0.8, q, 0.4, 0.9);
    CHECK(std::abs(h - f) / std::abs(f) < 1e-6);
  }

  CHECK_THROWS_AS(kernel_harmonic(1.0, 1.0, 1.0, 0.0, 0.0, kPi), CausticError);
  CHECK_THROWS_AS(kernel_harmonic(1.0, 1.0, 1.0, 0.0, 0.0, kPi - 0.05), CausticError);
  CHECK_THROWS_AS(kernel_harmonic(1.0, 1.0, 1.0, 0.0, 0.0, 0.0), DomainError);
}

TEST_CASE("kernels are symmetric in q and Q") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(-4.0, 4.0);
  for (int n = 0; n < 50; ++n) {
    const double q = x(rng), Q = x(rng);
    CHECK(std::abs(kernel_free(1.0, 0.5, q, Q, 0.8) - kernel_free(1.0, 0.5, Q, q, 0.8)) < 1e-14);
    CHECK(std::abs(kernel_harmonic(1.0, 1.2, 0.5, q, Q, 0.8) - kernel_harmonic(1.0, 1.2, 0.5, Q, q, 0.8)) < 1e-14);
  }
}

TEST_CASE("analytic slab rejects potentials without a closed form") {
  const SpatialGrid g{-10.0, 10.0, 256};
  const TimeGrid t{0.5, 0.6, 10};
  CHECK_THROWS_AS(analytic_slab(Potential::linear(1.0, 1.0), 1.0, g, t, 0.0), InvalidArgument);
  CHECK_NOTHROW(analytic_slab(Potential::free(1.0), 1.0, g, t, 0.0));
}

TEST_CASE("split operator matches the free kernel inside the carried band") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const TimeGrid t{0.25, 0.3, 20};
  const auto pot = Potential::free(1.0);
  const auto ev = evolve_split_operator(pot, 1.0, g, t, 0.0);
  const auto an = analytic_slab(pot, 1.0, g, t, 0.0);
  // |q| <= 4 at t = 0.3 needs |p| <= 13.3, well inside the cutoff.
  CHECK(ev.momentum_cutoff > 30.0);
  CHECK(max_rel_error(ev, an, -4.0, 4.0) < 1e-3);
  CHECK(ev.norm_drift < 1e-10);
}

TEST_CASE("split operator matches the Mehler kernel") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const TimeGrid t{1.0, 1.05, 200};
  const auto pot = Potential::harmonic(1.0, 1.0);
  const auto ev = evolve_split_operator(pot, 1.0, g, t, 0.0);
  const auto an = analytic_slab(pot, 1.0, g, t, 0.0);
  CHECK(max_rel_error(ev, an, -4.0, 4.0) < 1e-6);
  CHECK(ev.norm_drift < 1e-10);

  const auto off = evolve_split_operator(pot, 1.0, g, t, g.node(g.nearest(2.0)));
  const auto off_an = analytic_slab(pot, 1.0, g, t, g.node(g.nearest(2.0)));
  CHECK(max_rel_error(off, off_an, -3.0, 3.0) < 1e-3);
}

TEST_CASE("evolved slabs are symmetric under source exchange") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const TimeGrid t{1.0, 1.05, 10};
  const auto pot = Potential::harmonic(1.0, 1.0);
  EvolveOptions o;
  o.band_limit = 12.0;
  const std::size_t i1 = g.nearest(-1.0), i2 = g.nearest(1.5);
  const auto s1 = evolve_split_operator(pot, 1.0, g, t, g.node(i1), o);
  const auto s2 = evolve_split_operator(pot, 1.0, g, t, g.node(i2), o);
  for (std::size_t k = 0; k < t.count(); ++k) {
    CHECK(std::abs(s1.at(k, i2) - s2.at(k, i1)) < 1e-8 * std::abs(s1.at(k, i2)));
  }
}

TEST_CASE("evolving a slab further reproduces the kernel at the later time") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const auto pot = Potential::harmonic(1.0, 1.0);
  const TimeGrid t1{0.5, 0.55, 5};
  const auto s = evolve_split_operator(pot, 1.0, g, t1, 0.0);
  std::vector<cdouble> psi(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(g.n));
  const TimeGrid t2{0.5, 0.55, 5};
  const auto w = evolve_wave(pot, 1.0, g, t2, psi);
  const TimeGrid t12{1.0, 1.05, 5};
  const auto an = analytic_slab(pot, 1.0, g, t12, 0.0);
  CHECK(max_rel_error(w, an, -4.0, 4.0) < 1e-3);
}

TEST_CASE("evolve_wave keeps the harmonic ground state stationary") {
  const SpatialGrid g{-20.0, 20.0, 512};
  const TimeGrid t{0.5, 1.5, 10};
  std::vector<cdouble> psi0(g.n);
  for (std::size_t i = 0; i < g.n; ++i) psi0[i] = std::exp(-0.5 * g.node(i) * g.node(i));
  const auto w = evolve_wave(Potential::harmonic(1.0, 1.0), 1.0, g, t, psi0);
  double worst = 0.0;
  for (std::size_t k = 0; k < t.count(); ++k) {
    const cdouble ph = std::polar(1.0, -0.5 * t.time(k));
    for (std::size_t i = 0; i < g.n; ++i) worst = std::max(worst, std::abs(w.at(k, i) - ph * psi0[i]));
  }
  CHECK(worst < 1e-6);
  CHECK(w.norm_drift < 1e-10);
  CHECK_THROWS_AS(evolve_wave(Potential::free(1.0), 1.0, g, t, std::vector<cdouble>(10)), InvalidArgument);
  CHECK_THROWS_AS(evolve_wave(Potential::free(1.0), 1.0, g, t, std::vector<cdouble>(g.n)), InvalidArgument);
}

TEST_CASE("split operator error paths") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const auto free = Potential::free(1.0);
  CHECK_THROWS_AS(evolve_split_operator(free, 1.0, g, {0.25, 0.3, 5}, 0.01), InvalidArgument);
  CHECK_THROWS_AS(evolve_split_operator(free, 0.0, g, {0.25, 0.3, 5}, 0.0), InvalidArgument);
  // Free spreading reaches the edge long before t = 1 with this box.
  CHECK_THROWS_AS(evolve_split_operator(free, 1.0, g, {1.0, 1.05, 5}, 0.0), DomainTooSmallError);
  EvolveOptions wide;
  wide.band_limit = 70.0;
  CHECK_THROWS_AS(evolve_split_operator(free, 1.0, g, {0.5, 0.55, 5}, 0.0, wide), DomainTooSmallError);
  CHECK_THROWS_AS(evolve_split_operator(Potential::harmonic(1.0, 1.0), 1.0, g, {3.0, 3.1, 5}, 0.0), CausticError);
  EvolveOptions bad;
  bad.fixed_step = 0.0;
  CHECK_THROWS_AS(evolve_split_operator(free, 1.0, g, {0.25, 0.3, 5}, 0.0, bad), InvalidArgument);
}

TEST_CASE("Strang error falls by four when the step halves") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const TimeGrid t{1.0, 1.2, 20};
  const auto pot = Potential::harmonic(1.0, 1.0);
  const auto an = analytic_slab(pot, 1.0, g, t, 0.0);
  double err[2];
  const double steps[2] = {0.01, 0.005};
  for (int j = 0; j < 2; ++j) {
    EvolveOptions o;
    o.band_limit = 14.0;
    o.fixed_step = steps[j];
    err[j] = max_rel_error(evolve_split_operator(pot, 1.0, g, t, 0.0, o), an, -4.0, 4.0);
  }
  CHECK(err[0] / err[1] > 3.0);
  CHECK(err[0] / err[1] < 5.0);
}

TEST_CASE("automatic band limit") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const double nyq = kPi / g.dq();
  const double kc = auto_band_limit(Potential::free(1.0), 1.0, g, {0.25, 0.3, 5}, 0.0);
  CHECK(kc > 0.0);
  CHECK(kc <= 0.45 * nyq);
  // Later times carry less momentum.
  CHECK(auto_band_limit(Potential::free(1.0), 1.0, g, {0.5, 0.55, 5}, 0.0) < kc);
  CHECK_THROWS_AS(auto_band_limit(Potential::free(1.0), 1.0, g, {1.0, 1.05, 5}, 0.0), DomainTooSmallError);
}

TEST_CASE("convolving with a lattice delta returns the slab") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const TimeGrid t{0.25, 0.3, 5};
  const double Q = g.node(g.nearest(0.5));
  const auto s = evolve_split_operator(Potential::free(1.0), 1.0, g, t, Q);
  std::vector<cdouble> phi(g.n, 0.0);
  phi[g.nearest(Q)] = 1.0 / g.dq();
  const auto w = convolve({s}, phi);
  for (std::size_t k = 0; k < s.values.size(); ++k) CHECK(std::abs(w.values[k] - s.values[k]) <= 1e-14 * std::abs(s.values[k]) + 1e-300);
}

TEST_CASE("convolution spreads a Gaussian like the free evolution") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const TimeGrid t{0.25, 0.3, 5};
  const auto pot = Potential::free(1.0);
  std::vector<cdouble> phi(g.n);
  std::vector<double> Qs;
  double peak = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    phi[i] = std::exp(-g.node(i) * g.node(i));
    peak = std::max(peak, std::abs(phi[i]));
  }
  for (std::size_t i = 0; i < g.n; ++i)
    if (std::abs(phi[i]) > 1e-14 * peak) Qs.push_back(g.node(i));
  const auto fam = build_family(pot, 1.0, g, t, Qs);
  const auto w = convolve(fam, phi);

  double worst = 0.0, wpeak = 0.0;
  for (std::size_t k = 0; k < t.count(); ++k) {
    const double tt = t.time(k);
    const cdouble s = 1.0 + cdouble(0.0, 2.0 * tt);
    for (std::size_t i = 0; i < g.n; ++i) {
      const double q = g.node(i);
      const cdouble exact = std::exp(-q * q / s) / std::sqrt(s);
      worst = std::max(worst, std::abs(w.at(k, i) - exact));
      wpeak = std::max(wpeak, std::abs(exact));
    }
  }
  CHECK(worst / wpeak < 1e-4);

  double n0 = 0.0;
  for (const auto& z : phi) n0 += std::norm(z) * g.dq();
  for (std::size_t k = 0; k < t.count(); ++k) CHECK(std::abs(w.norm(k) - n0) < 1e-8 * n0);

  std::vector<cdouble> shifted(phi);
  shifted[g.nearest(10.0)] = 1.0;
  CHECK_THROWS_AS(convolve(fam, shifted), InvalidArgument);
  CHECK_THROWS_AS(convolve(fam, std::vector<cdouble>(7)), InvalidArgument);
  CHECK_THROWS_AS(convolve({}, phi), InvalidArgument);

  const auto streamed = convolve(pot, 1.0, g, t, phi);
  CHECK(streamed.values == w.values);
  CHECK_THROWS_AS(convolve(pot, 1.0, g, t, std::vector<cdouble>(g.n)), InvalidArgument);
}

TEST_CASE("Schrodinger residual of a plane wave") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const TimeGrid t{1.0, 1.01, 200};
  const double kw = 0.5;
  SpaceTimeField f;
  f.grid = g;
  f.times = t;
  f.values.resize(g.n * t.count());
  for (std::size_t k = 0; k < t.count(); ++k)
    for (std::size_t i = 0; i < g.n; ++i) f.at(k, i) = std::polar(1.0, kw * g.node(i) - 0.5 * kw * kw * t.time(k));
  const auto spec = from_standard(Potential::free(1.0), 1.0);
  const auto r = schrodinger_residual(f, spec);
  CHECK(r.worst_l2() < 1e-8);
  CHECK(r.times.size() == t.count() - 2);

  SpaceTimeField few = f;
  few.times = {1.0, 1.01, 3};
  few.values.resize(g.n * 4);
  CHECK_THROWS_AS(schrodinger_residual(few, spec), InvalidArgument);
}

TEST_CASE("Schrodinger residual of an evolved slab and phase invariance") {
  const SpatialGrid g{-20.0, 20.0, 1024};
  const TimeGrid t{1.0, 1.05, 200};
  const auto pot = Potential::harmonic(1.0, 1.0);
  const auto s = evolve_split_operator(pot, 1.0, g, t, 0.0);
  const auto spec = from_standard(pot, 1.0);
  const auto r = schrodinger_residual(s, spec, {-5.0, 5.0});
  CHECK(r.worst_max() < 1e-4);

  auto rot = s;
  for (auto& z : rot.values) z *= std::polar(1.0, 0.83);
  const auto rr = schrodinger_residual(rot, spec, {-5.0, 5.0});
  for (std::size_t k = 0; k < r.l2.size(); ++k) CHECK(rr.l2[k] == doctest::Approx(r.l2[k]).epsilon(1e-10));
}

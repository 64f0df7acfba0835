#include <cmath>
#include <random>

#include "doctest.h"
#include "qhj/errors.hpp"
#include "qhj/hamiltonian.hpp"

using namespace qhj;

TEST_CASE("from_standard fixes a = 1/(4m)") {
  const auto free = from_standard(Potential::free(1.0), 1.0);
  CHECK(free.a(0.3) == doctest::Approx(0.25));
  CHECK(free.b(0.3) == 0.0);
  CHECK(free.c(0.3) == 0.0);
  CHECK(free.da(1.0) == 0.0);
  CHECK(free.d2a(1.0) == 0.0);

  // m = 2, omega = 1 gives V = q^2.
  const auto quad = from_standard(Potential::harmonic(2.0, 1.0), 1.0);
  CHECK(quad.a(-4.0) == doctest::Approx(0.125));
  CHECK(quad.c(1.5) == doctest::Approx(2.25));
  CHECK(quad.c(-3.0) == doctest::Approx(9.0));

  const auto step = from_standard(Potential::barrier(1.0, 0.01, 1.0), 1.0);
  CHECK(step.c(0.0) == doctest::Approx(0.01));
  CHECK(step.c(-0.49) == doctest::Approx(0.01));
  CHECK(step.c(0.7) == 0.0);
  CHECK(step.c(-2.0) == 0.0);
}

TEST_CASE("from_standard rejects bad mass or hbar") {
  CHECK_THROWS_AS(from_standard(Potential::free(1.0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(from_standard(Potential::free(1.0), -1.0), InvalidArgument);
  CHECK_THROWS_AS(Potential::free(0.0), InvalidArgument);
  CHECK_THROWS_AS(Potential::harmonic(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("potential constructors validate parameters") {
  CHECK_THROWS_AS(Potential::harmonic(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(Potential::barrier(1.0, 0.1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(Potential::custom(1.0, {{0.0, 1.0, 0.5}, {0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}}), InvalidArgument);
  CHECK_THROWS_AS(Potential::custom(1.0, {{0.0, 1.0}, {0.0}, {0.0, 0.0}}), InvalidArgument);
  CHECK_NOTHROW(Potential::custom(1.0, {{0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}, {0.0, 2.0, 4.0}}));
}

TEST_CASE("classical_hamiltonian") {
  CHECK(classical_hamiltonian(from_standard(Potential::free(1.0), 1.0), 0.0, 1.0) == doctest::Approx(0.5));
  CHECK(classical_hamiltonian(from_standard(Potential::harmonic(2.0, 1.0), 1.0), 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(classical_hamiltonian(from_standard(Potential::free(2.0), 1.0), 3.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("classical_hamiltonian equals p^2/2m + V") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const Potential pots[] = {Potential::free(1.5), Potential::harmonic(0.7, 1.3), Potential::linear(2.0, 0.4),
                            Potential::barrier(1.0, 0.2, 1.0)};
  for (const auto& pot : pots) {
    const auto spec = from_standard(pot, 0.3);
    for (int k = 0; k < 200; ++k) {
      const double q = u(rng);
      const double p = u(rng);
      CHECK(classical_hamiltonian(spec, q, p) == doctest::Approx(p * p / (2.0 * pot.mass()) + pot.value(q)));
    }
  }
}

TEST_CASE("supplied derivatives agree with central differences") {
  std::vector<double> samples;
  for (int k = -20; k <= 20; ++k) samples.push_back(0.2 * k + 0.013);
  CHECK_NOTHROW(validate_spec(from_standard(Potential::harmonic(1.0, 2.0), 1.0), samples));
  CHECK_NOTHROW(validate_spec(from_standard(Potential::linear(1.0, 3.0), 1.0), samples));

  PotentialTable tab;
  for (int k = -40; k <= 40; ++k) {
    const double q = 0.1 * k;
    tab.q.push_back(q);
    tab.V.push_back(std::sin(q));
    tab.dV.push_back(std::cos(q));
  }
  const auto custom = Potential::custom(1.0, tab);
  for (double q : {-1.234, 0.05, 2.71}) {
    CHECK(custom.value(q) == doctest::Approx(std::sin(q)).epsilon(1e-5));
    const double h = 1e-5;
    CHECK(custom.derivative(q) == doctest::Approx((custom.value(q + h) - custom.value(q - h)) / (2 * h)).epsilon(1e-6));
  }

  HamiltonianSpec bad = from_standard(Potential::free(1.0), 1.0);
  bad.da = [](double) { return 1.0; };
  CHECK_THROWS_AS(validate_spec(bad, samples), InvalidArgument);
  bad = from_standard(Potential::free(1.0), 1.0);
  bad.a = [](double q) { return q; };
  CHECK_THROWS_AS(validate_spec(bad, samples), InvalidArgument);
}

TEST_CASE("barrier cell average and smoothing") {
  const auto pot = Potential::barrier(1.0, 2.0, 1.0);
  // a cell straddling the edge at 0.5 holds half the barrier
  CHECK(pot.cell_average(0.5, 0.1) == doctest::Approx(1.0));
  CHECK(pot.cell_average(0.0, 0.1) == doctest::Approx(2.0));
  CHECK(pot.cell_average(0.8, 0.1) == doctest::Approx(0.0));
  CHECK(pot.smooth_value(0.0) == doctest::Approx(2.0 * std::tanh(5.0)));
  CHECK(pot.smooth_value(0.5) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pot.smooth_value(3.0) == doctest::Approx(0.0));
  // force is -dV/dq of the smoothed shape
  const double h = 1e-6;
  for (double q : {-0.52, -0.3, 0.47, 0.55}) {
    CHECK(pot.smooth_force(q) ==
          doctest::Approx(-(pot.smooth_value(q + h) - pot.smooth_value(q - h)) / (2 * h)).epsilon(1e-5));
  }
}

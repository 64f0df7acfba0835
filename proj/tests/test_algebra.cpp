#include <array>
#include <cmath>
#include <random>

#include "algebra_oracles.hpp"
#include "doctest.h"
#include "qhj/algebra/derivations.hpp"
#include "qhj/algebra/operator.hpp"
#include "qhj/algebra/parser.hpp"
#include "qhj/errors.hpp"

using namespace qhj;
using namespace qhj::algebra;
using namespace qhj_test;

TEST_CASE("function-space oracle checks its own commutator") {
  const Fn f = monomial_fn(3);
  const Fn qQ = apply_q(apply_Q(f, kKappa));
  const Fn Qq = apply_Q(apply_q(f), kKappa);
  Fn diff = qQ;
  for (const auto& [key, p] : scale(Qq, SC(-1))) add_into(diff, key, p);
  normalize(diff);
  Fn expect = scale(f, kKappa);
  normalize(expect);
  CHECK(diff == expect);
}

TEST_CASE("wellorder examples") {
  const CommutatorSpec comm{kKappa};
  CHECK(wellorder(parse_expr("Q*q"), comm) == wellorder(parse_expr("q*Q - kappa"), comm));
  CHECK(wellorder(parse_expr("(q - Q)^2"), comm) == wellorder(parse_expr("q^2 - 2*q*Q + Q^2 + kappa"), comm));
  const auto bch = wellorder(parse_expr("exp(u*Q)*exp(-u*q)"), comm);
  const auto expect = wellorder(parse_expr("exp(u^2*kappa)*exp(-u*q)*exp(u*Q)"), comm);
  CHECK(bch == expect);
  CHECK(heisenberg(parse_expr("exp(u*Q)*exp(-u*q)")) == heisenberg(bch));
  CHECK(same_on_basis(parse_expr("exp(u*Q)*exp(-u*q)"), bch, kKappa, 4));
}

TEST_CASE("wellorder agrees with the function-space oracle on random expressions") {
  RandomExpr gen(20240611);
  const CommutatorSpec sym{kKappa};
  const CommutatorSpec free = CommutatorSpec::free_particle();
  int checked = 0;
  for (int n = 0; n < 1000; ++n) {
    const bool with_exp = n % 5 == 0;
    const OperatorExpr x = gen.make(with_exp);
    const CommutatorSpec& comm = n % 4 == 3 ? free : sym;
    const OperatorExpr w = wellorder(x, comm);
    REQUIRE(w.is_well_ordered());
    CHECK(same_on_basis(x, w, comm.kappa, 6));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("wellorder agrees with the Heisenberg matrix oracle") {
  RandomExpr gen(99);
  const CommutatorSpec comm{kKappa};
  for (int n = 0; n < 200; ++n) {
    const OperatorExpr x = gen.make(true, 4);
    CHECK(heisenberg(x) == heisenberg(wellorder(x, comm)));
  }
}

TEST_CASE("wellorder is idempotent, linear and multiplicative") {
  RandomExpr gen(7);
  const CommutatorSpec comm{kKappa};
  for (int n = 0; n < 100; ++n) {
    const auto a = gen.make(n % 3 == 0, 4);
    const auto b = gen.make(n % 4 == 0, 4);
    const auto wa = wellorder(a, comm);
    const auto wb = wellorder(b, comm);
    CHECK(wellorder(wa, comm) == wa);
    CHECK(wellorder(a + b, comm) == wellorder(wa + wb, comm));
    CHECK(wellorder(a * b, comm) == wellorder(wa * wb, comm));
    const SC c = gen.coeff();
    CHECK(wellorder(c * a, comm) == wellorder(c * wa, comm));
  }
}

TEST_CASE("ScalarCoeff ring axioms") {
  RandomExpr gen(31);
  for (int n = 0; n < 200; ++n) {
    const SC a = gen.rational_function(), b = gen.rational_function(), c = gen.rational_function();
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a - a == SC(0));
    CHECK(a + SC(0) == a);
    CHECK(a * SC(1) == a);
    if (!b.is_zero()) CHECK((a / b) * b == a);
    CHECK(a.pow(2) == a * a);
  }
}

TEST_CASE("ScalarCoeff derivative and evaluation") {
  const SC hb = SC::symbol(Symbol::hbar), t = SC::symbol(Symbol::t), m = SC::symbol(Symbol::m);
  const SC x = m / (SC(2) * t);
  CHECK(x.derivative(Symbol::t) == -m / (SC(2) * t * t));
  SymbolBindings bind;
  bind.set(Symbol::m, 2.0).set(Symbol::t, 4.0).set(Symbol::hbar, 1.0);
  CHECK(std::abs(x.evaluate(bind) - std::complex<double>(0.25)) < 1e-15);
  CHECK(std::abs((kI * hb / (SC(2) * t)).evaluate(bind) - std::complex<double>(0.0, 0.125)) < 1e-15);
  CHECK_THROWS_AS((x * SC::symbol(Symbol::omega)).evaluate(bind), InvalidArgument);
  CHECK((SC(6) / SC(4)).constant_value().value() == GaussianRational(mpq_class(3, 2)));
}

TEST_CASE("parser examples") {
  const auto qQ = parse_expr("Q*q");
  CHECK_FALSE(qQ.is_well_ordered());
  REQUIRE(qQ.words().size() == 1);
  REQUIRE(qQ.words()[0].factors.size() == 2);
  CHECK(qQ.words()[0].factors[0].kind == Factor::Kind::upper);
  CHECK(qQ.words()[0].factors[1].kind == Factor::Kind::lower);

  const auto ansatz = wellorder(parse_expr("(m/(2*t))*(Q^2 - 2*q*Q + q^2)"), CommutatorSpec{kKappa});
  CHECK(ansatz.terms().size() == 3);
  CHECK(ansatz == free_smallt_ansatz());

  const auto ex = parse_expr("exp(-u*q)*exp(u*Q)");
  REQUIRE(ex.words().size() == 1);
  REQUIRE(ex.words()[0].factors.size() == 2);
  CHECK(ex.words()[0].factors[0].kind == Factor::Kind::exp);
  CHECK(ex.words()[0].factors[0].exponent.lower == -SC::symbol(Symbol::u));
  CHECK(ex.words()[0].factors[1].exponent.upper == SC::symbol(Symbol::u));

  CHECK(parse_scalar("-i*hbar*t/m") == CommutatorSpec::free_particle().kappa);
  CHECK(parse_scalar("0.25") == SC::rational(1, 4));
}

TEST_CASE("parser errors carry positions") {
  auto position = [](const char* text) -> long {
    try {
      parse_expr(text);
    } catch (const ParseError& e) {
      return static_cast<long>(e.position());
    }
    return -1;
  };
  CHECK(position("2q") == 1);
  CHECK(position("q + ") == 4);
  CHECK(position("(q") == 2);
  CHECK(position("q^1.5") >= 2);
  CHECK(position("exp(q*Q)") >= 4);
  CHECK(position("q ? Q") == 2);
  CHECK(position("q/Q") >= 2);
  CHECK(position("foo") == 0);
  CHECK_THROWS_AS(parse_scalar("q"), ParseError);
  CHECK(position("q*Q") == -1);
}

TEST_CASE("printing round-trips through the parser") {
  RandomExpr gen(5);
  const CommutatorSpec comm{kKappa};
  for (int n = 0; n < 100; ++n) {
    const auto w = wellorder(gen.make(n % 3 == 0, 4), comm);
    INFO(w.str());
    CHECK(wellorder(parse_expr(w.str()), comm) == w);
  }
  CHECK(wellorder(parse_expr("Q*q"), comm).str() == "q*Q - kappa");
}

TEST_CASE("formal derivatives") {
  const CommutatorSpec comm{kKappa};
  CHECK(formal_derivative(free_smallt_ansatz(), DerivativeVariable::lower) ==
        wellorder(parse_expr("(m/t)*(q - Q)"), comm));
  CHECK(formal_derivative(wellorder(parse_expr("(m/(2*t))*q^2"), comm), DerivativeVariable::time) ==
        wellorder(parse_expr("-(m/(2*t^2))*q^2"), comm));
  CHECK(formal_derivative(wellorder(parse_expr("exp(u*Q)"), comm), DerivativeVariable::upper) ==
        wellorder(parse_expr("u*exp(u*Q)"), comm));
  CHECK(formal_derivative(wellorder(parse_expr("q^3*Q"), comm), DerivativeVariable::upper) ==
        wellorder(parse_expr("q^3"), comm));
}

TEST_CASE("matrix elements") {
  const CommutatorSpec comm{kKappa};
  SymbolBindings b;
  b.set(Symbol::m, 1.0).set(Symbol::t, 1.0);
  CHECK(std::abs(matrix_element(free_smallt_ansatz(), 2.0, 1.0, b) - 0.5) < 1e-15);

  SymbolBindings k;
  k.set(Symbol::kappa, {0.0, -1.0});
  CHECK(std::abs(matrix_element(wellorder(parse_expr("Q*q"), comm), 2.0, 3.0, k) - std::complex<double>(6.0, 1.0)) <
        1e-15);

  SymbolBindings u;
  u.set(Symbol::u, 0.5);
  const auto e = wellorder(parse_expr("(q^2 + 1)*exp(u*q)*exp(2*Q)*(Q - 3)"), comm);
  CHECK(std::abs(matrix_element(e, 1.0, 0.3, u) - 2.0 * std::exp(0.5) * std::exp(0.6) * (0.3 - 3.0)) < 1e-13);

  CHECK_THROWS_AS(matrix_element(free_smallt_ansatz(), 1.0, 0.0, SymbolBindings{}), InvalidArgument);
  CHECK(image_at(wellorder(parse_expr("q^2*Q"), comm), SC(3), SC::rational(1, 2)) == SC::rational(9, 2));
}

TEST_CASE("canonical momenta of the small-t ansatz") {
  const auto mom = canonical_momenta(free_smallt_ansatz());
  const auto expect = wellorder(parse_expr("(m/t)*(q - Q)"), CommutatorSpec{kKappa});
  CHECK(mom.p == expect);
  CHECK(mom.P == expect);

  const auto sol = solve_for_lower(mom.P);
  CHECK(sol.P_coeff == SC::symbol(Symbol::t) / SC::symbol(Symbol::m));
  CHECK(sol.Q_coeff == SC(1));
  CHECK(sol.constant.is_zero());
  CHECK_THROWS_AS(solve_for_lower(wellorder(parse_expr("q^2"), CommutatorSpec{kKappa})), DerivationFailure);

  const auto only_q = canonical_momenta(wellorder(parse_expr("q^3 + 2*q"), CommutatorSpec{kKappa}));
  CHECK(only_q.P.is_zero());

  const auto chk = verify_canonical(free_smallt_ansatz(), CommutatorSpec::free_particle());
  CHECK(chk.canonical);
  CHECK_FALSE(verify_canonical(free_smallt_ansatz(), CommutatorSpec{kKappa}).canonical);
}

TEST_CASE("commutators") {
  const CommutatorSpec sym{kKappa};
  CHECK(commutator(OperatorExpr::lower(), OperatorExpr::upper(), sym) == OperatorExpr::scalar(kKappa));
  const auto hb = SC::symbol(Symbol::hbar);
  CHECK(commutator(OperatorExpr::upper(), parse_expr("(m/t)*(q - Q)"), CommutatorSpec::free_particle()) ==
        OperatorExpr::scalar(kI * hb));
  CHECK(commutator(parse_expr("q^2"), OperatorExpr::upper(), sym) == wellorder(parse_expr("2*kappa*q"), sym));
  CHECK(heisenberg(commutator(parse_expr("q^2"), OperatorExpr::upper(), sym)) ==
        heisenberg(parse_expr("q*q*Q - Q*q*q")));
}

TEST_CASE("small-t derivation of dg/dt") {
  const SC hb = SC::symbol(Symbol::hbar), t = SC::symbol(Symbol::t), m = SC::symbol(Symbol::m);
  const SC g = qhje_smallt_derivation(CommutatorSpec::free_particle());
  CHECK(g == kI * hb / (SC(2) * t));
  CHECK(g.str() == "i*hbar/(2*t)");
  CHECK(qhje_smallt_derivation(CommutatorSpec{SC(0)}).is_zero());
  CHECK(qhje_smallt_derivation(CommutatorSpec{kKappa}) == -(m / (SC(2) * t * t)) * kKappa);
  CHECK_THROWS_AS(qhje_smallt_derivation(CommutatorSpec::free_particle(), wellorder(parse_expr("q*Q"), CommutatorSpec::free_particle())),
                  DerivationFailure);
}

TEST_CASE("disentangling the square of dW/dq") {
  const SC hb = SC::symbol(Symbol::hbar);
  const CommutatorSpec sym{kKappa};
  {
    const SC q = SC::rational(3, 2), Q = SC::rational(-2, 3);
    const auto r = disentangle_square(wellorder(parse_expr("q^2*Q"), sym), q, Q, hb);
    CHECK(r.agree);
    CHECK(r.left == SC(4) * q * q * Q * Q - SC(2) * kI * hb * Q);
    CHECK(r.left == r.right);
  }
  {
    const SC q = SC(2), Q = SC::rational(1, 3);
    const SC m = SC::symbol(Symbol::m), t = SC::symbol(Symbol::t);
    const auto r = disentangle_square(free_smallt_ansatz(), q, Q, hb);
    CHECK(r.left == (m / t).pow(2) * (q - Q).pow(2) - kI * hb * m / t);
    CHECK(r.agree);
  }
  {
    const SC q = SC::rational(-5, 7);
    const auto r = disentangle_square(wellorder(parse_expr("q^3"), sym), q, SC(4), hb);
    CHECK(r.left == SC(9) * q.pow(4) - SC(6) * kI * hb * q);
    CHECK(r.agree);
  }
  RandomExpr gen(123);
  for (int n = 0; n < 100; ++n) {
    const auto w = wellorder(gen.make(false, 4), sym);
    const SC q = SC::rational(gen.pick(-9, 9), gen.pick(1, 5));
    const SC Q = SC::rational(gen.pick(-9, 9), gen.pick(1, 5));
    const auto r = disentangle_square(w, q, Q, n % 2 ? hb : SC::rational(1, 10));
    CHECK(r.agree);
    CHECK(r.left == r.right);
  }
}

TEST_CASE("well-ordered inverse of q - Q") {
  const auto integrand = inverse_wo_integrand();
  CHECK(integrand == wellorder(parse_expr("exp(-u*q)*exp(u*Q)"), CommutatorSpec{kKappa}));
  const auto r = inverse_wo(2.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> x(-3.0, 3.0), gap(0.2, 4.0);
  for (int n = 0; n < 10; ++n) {
    const double Q = x(rng), q = Q + gap(rng);
    const auto v = inverse_wo(q, Q);
    CHECK(std::abs(v.value - 1.0 / (q - Q)) < 1e-8);
    CHECK(v.error_estimate < 1e-8);
  }
  CHECK_THROWS(inverse_wo(1.0, 2.0));
}

TEST_CASE("polynomial gcd finds shared factors and proves coprimality") {
  const Polynomial h = Polynomial::variable(Symbol::hbar), m = Polynomial::variable(Symbol::m),
                   t = Polynomial::variable(Symbol::t);
  const Polynomial shared = h * m + t * t + GaussianRational(mpq_class(1, 3), 1);
  const Polynomial a = shared * (h - t) * (m + Polynomial(2));
  const Polynomial b = shared * (h * t + m * m * m) * GaussianRational(5);
  CHECK(gcd(a, b) == shared.monic());
  CHECK(gcd(a, b * (h - t)) == (shared * (h - t)).monic());
  CHECK(gcd(h - t, m + t) == Polynomial(1));
  CHECK(gcd(h * m * m, h * h * m) == h * m);
  CHECK(exact_divide(a, shared) == (h - t) * (m + Polynomial(2)));
  CHECK_THROWS_AS(exact_divide(a, h * h), DerivationFailure);

  RandomExpr gen(77);
  for (int n = 0; n < 50; ++n) {
    const SC x = gen.rational_function(), y = gen.rational_function();
    const SC z = x * y;
    CHECK(gcd(z.numerator(), z.denominator()).is_constant());
  }
}

#include "qhj/algebra/derivations.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "qhj/algebra/parser.hpp"
#include "qhj/errors.hpp"

namespace qhj::algebra {

namespace {

ScalarCoeff i_hbar() { return ScalarCoeff::imaginary_unit() * ScalarCoeff::symbol(Symbol::hbar); }

OperatorExpr left_lower_power(int k, const OperatorExpr& e) {
  // q^k times a well-ordered expression stays well-ordered.
  OrderedTerms out;
  for (const auto& [m, c] : e.terms()) {
    OrderedMonomial r = m;
    r.lower_power += k;
    detail::accumulate(out, r, c);
  }
  return OperatorExpr::from_terms(std::move(out));
}

OperatorExpr right_upper_power(const OperatorExpr& e, int k) {
  OrderedTerms t = e.terms();
  for (int n = 0; n < k; ++n) t = detail::times_upper(t);
  return OperatorExpr::from_terms(std::move(t));
}

}  // namespace

OperatorExpr free_smallt_ansatz() {
  return wellorder(parse_expr("(m/(2*t))*(Q^2 - 2*q*Q + q^2)"), CommutatorSpec{});
}

CanonicalMomenta canonical_momenta(const OperatorExpr& w) {
  return {formal_derivative(w, DerivativeVariable::lower), -formal_derivative(w, DerivativeVariable::upper)};
}

std::string LowerSolution::str() const {
  std::string out = "q = ";
  std::string rest;
  auto add = [&rest](const ScalarCoeff& c, const std::string& name) {
    if (c.is_zero()) return;
    const bool neg = c.prints_as_product() && c.is_negative();
    const ScalarCoeff mag = neg ? -c : c;
    std::string body = mag.prints_as_product() ? mag.str() : "(" + mag.str() + ")";
    if (!name.empty()) body = mag.is_one() ? name : body + "*" + name;
    if (rest.empty()) {
      rest = neg ? "-" + body : body;
    } else {
      rest += neg ? " - " + body : " + " + body;
    }
  };
  add(Q_coeff, "Q");
  add(P_coeff, "P");
  add(constant, "");
  return out + (rest.empty() ? "0" : rest);
}

LowerSolution solve_for_lower(const OperatorExpr& P) {
  const OperatorExpr wo = P.is_well_ordered() ? P : wellorder(P, CommutatorSpec{});
  ScalarCoeff alpha, beta, gamma;
  for (const auto& [m, c] : wo.terms()) {
    if (m.has_exponential()) throw DerivationFailure("momentum expression is not linear");
    if (m.lower_power == 1 && m.upper_power == 0) {
      alpha = c;
    } else if (m.lower_power == 0 && m.upper_power == 1) {
      beta = c;
    } else if (m.lower_power == 0 && m.upper_power == 0) {
      gamma = c;
    } else {
      throw DerivationFailure("momentum expression is not linear in q and Q");
    }
  }
  if (alpha.is_zero()) throw DerivationFailure("momentum expression does not involve q");
  // P = alpha q + beta Q + gamma
  return {ScalarCoeff(1) / alpha, -beta / alpha, -gamma / alpha};
}

CanonicalCheck verify_canonical(const OperatorExpr& w, const CommutatorSpec& comm) {
  const CanonicalMomenta mom = canonical_momenta(w);
  CanonicalCheck out{commutator(OperatorExpr::lower(), mom.p, comm),
                     commutator(OperatorExpr::upper(), mom.P, comm), false};
  const OperatorExpr target = OperatorExpr::scalar(i_hbar());
  out.canonical = out.qp == target && out.QP == target;
  return out;
}

ScalarCoeff qhje_smallt_derivation(const CommutatorSpec& comm, const OperatorExpr& ansatz) {
  const OperatorExpr w = ansatz.is_well_ordered() ? ansatz : wellorder(ansatz, comm);
  const OperatorExpr p = formal_derivative(w, DerivativeVariable::lower);
  const OperatorExpr a = OperatorExpr::scalar(ScalarCoeff(1) / (ScalarCoeff(4) * ScalarCoeff::symbol(Symbol::m)));
  const OperatorExpr half = OperatorExpr::scalar(ScalarCoeff::rational(1, 2));
  const OperatorExpr h = half * a * p * p + p * a * p + half * p * p * a;
  const OperatorExpr r = wellorder(h + formal_derivative(w, DerivativeVariable::time), comm);
  auto s = r.as_scalar();
  if (!s) throw DerivationFailure("operator-valued terms survive in the small-t QHJE: " + r.str());
  return -*s;
}

ScalarCoeff qhje_smallt_derivation(const CommutatorSpec& comm) {
  return qhje_smallt_derivation(comm, free_smallt_ansatz());
}

OperatorExpr disentangled_square_operator(const OperatorExpr& w, const ScalarCoeff& hbar) {
  if (w.has_exponential()) throw InvalidArgument("disentangling is implemented for polynomial W");
  const OperatorExpr p = formal_derivative(w.is_well_ordered() ? w : wellorder(w, CommutatorSpec{}),
                                           DerivativeVariable::lower);
  // p * (c q^i Q^j) = c q^i p Q^j - i hbar c i q^{i-1} Q^j
  OperatorExpr out;
  const ScalarCoeff ih = ScalarCoeff::imaginary_unit() * hbar;
  for (const auto& [m, c] : p.terms()) {
    out = out + c * left_lower_power(m.lower_power, right_upper_power(p, m.upper_power));
    if (m.lower_power > 0) {
      OrderedMonomial d = m;
      d.lower_power -= 1;
      OrderedTerms t;
      t.emplace(d, -(ih * ScalarCoeff(m.lower_power) * c));
      out = out + OperatorExpr::from_terms(std::move(t));
    }
  }
  return out;
}

DisentangleResult disentangle_square(const OperatorExpr& w, const ScalarCoeff& q, const ScalarCoeff& Q,
                                     const ScalarCoeff& hbar) {
  const OperatorExpr wo = w.is_well_ordered() ? w : wellorder(w, CommutatorSpec{});
  DisentangleResult out;
  out.left = image_at(disentangled_square_operator(wo, hbar), q, Q);
  const OperatorExpr wq = formal_derivative(wo, DerivativeVariable::lower);
  const OperatorExpr wqq = formal_derivative(wq, DerivativeVariable::lower);
  const ScalarCoeff wq_val = image_at(wq, q, Q);
  out.right = wq_val * wq_val - ScalarCoeff::imaginary_unit() * hbar * image_at(wqq, q, Q);
  out.agree = out.left == out.right;
  if (!out.agree) {
    throw DerivationFailure("disentangling routes disagree: " + out.left.str() + " vs " + out.right.str());
  }
  return out;
}

OperatorExpr inverse_wo_integrand() { return wellorder(parse_expr("exp(-u*q)*exp(u*Q)"), CommutatorSpec{}); }

InverseWoResult inverse_wo(double q, double Q, double tolerance) {
  const double d = q - Q;
  if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("inverse-wo requires q > Q");
  const OperatorExpr integrand = inverse_wo_integrand();
  const double upper = 40.0 / d;
  auto f = [&](double u) {
    SymbolBindings b;
    b.set(Symbol::u, u);
    return matrix_element(integrand, q, Q, b).real();
  };
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, upper, 15, tolerance, &err);
  // Integrand is positive and decreasing, so the tail is at most e^{-U d}/d.
  const double tail = std::exp(-upper * d) / d;
  return {value, err + tail, upper};
}

}  // namespace qhj::algebra

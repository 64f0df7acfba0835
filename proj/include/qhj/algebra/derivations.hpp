#pragma once

#include <complex>
#include <utility>

#include "qhj/algebra/operator.hpp"

namespace qhj::algebra {

/// (m/(2t))*(Q^2 - 2*q*Q + q^2), the free-particle small-t generating function
/// without its scalar g(t).
OperatorExpr free_smallt_ansatz();

struct CanonicalMomenta {
  OperatorExpr p;  // dW/dq
  OperatorExpr P;  // -dW/dQ
};

CanonicalMomenta canonical_momenta(const OperatorExpr& w);

/// q = P_coeff*P + Q_coeff*Q + constant, obtained from a momentum expression
/// P that is linear in q and Q.
struct LowerSolution {
  ScalarCoeff P_coeff;
  ScalarCoeff Q_coeff;
  ScalarCoeff constant;

  std::string str() const;
};

/// Throws DerivationFailure when P is not of the form alpha*q + beta*Q + gamma
/// with alpha != 0.
LowerSolution solve_for_lower(const OperatorExpr& P);

struct CanonicalCheck {
  OperatorExpr qp;  // [q, p]
  OperatorExpr QP;  // [Q, P]
  bool canonical;   // both equal i*hbar exactly
};

CanonicalCheck verify_canonical(const OperatorExpr& w, const CommutatorSpec& comm);

/// Builds H(q, dW/dq) + dW/dt for the free Hamiltonian in the symmetric form
/// (1/2)a*p*p + p*a*p + (1/2)p*p*a with a = 1/(4m), well-orders it, and
/// returns dg/dt, i.e. minus the scalar remainder. Throws DerivationFailure
/// when operator-valued terms survive.
ScalarCoeff qhje_smallt_derivation(const CommutatorSpec& comm, const OperatorExpr& ansatz);
ScalarCoeff qhje_smallt_derivation(const CommutatorSpec& comm);

struct DisentangleResult {
  ScalarCoeff left;   // <q|(dW/dq)(dW/dq)|Q> via the P G(q) = G(q) P - i hbar G'(q) rule
  ScalarCoeff right;  // W_q^2 - i hbar W_qq from the c-number image
  bool agree;
};

/// Both routes at exact q, Q. hbar may be a symbol or a number.
/// Throws DerivationFailure when the routes disagree.
DisentangleResult disentangle_square(const OperatorExpr& w, const ScalarCoeff& q, const ScalarCoeff& Q,
                                     const ScalarCoeff& hbar);

/// Left route alone: the well-ordered operator for (dW/dq)(dW/dq).
OperatorExpr disentangled_square_operator(const OperatorExpr& w, const ScalarCoeff& hbar);

/// exp(-u*q)*exp(u*Q), the well-ordered integrand of [1/(q - Q)]_WO.
OperatorExpr inverse_wo_integrand();

struct InverseWoResult {
  double value;
  double error_estimate;  // quadrature estimate plus tail bound
  double upper_limit;
};

/// Integrates the integrand's matrix element over u in [0, U] with adaptive
/// Gauss-Kronrod and bounds the tail analytically. Requires q > Q.
InverseWoResult inverse_wo(double q, double Q, double tolerance = 1e-12);

}  // namespace qhj::algebra

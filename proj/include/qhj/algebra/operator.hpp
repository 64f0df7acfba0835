#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "qhj/algebra/scalar.hpp"

namespace qhj::algebra {

/// Exponent s + alpha*q + beta*Q of an exponential factor.
struct LinearExponent {
  ScalarCoeff scalar;
  ScalarCoeff lower;  // coefficient of q
  ScalarCoeff upper;  // coefficient of Q

  bool is_zero() const { return scalar.is_zero() && lower.is_zero() && upper.is_zero(); }
  friend bool operator==(const LinearExponent&, const LinearExponent&) = default;
};

/// One factor of a noncommutative word.
struct Factor {
  enum class Kind { lower, upper, exp };
  Kind kind = Kind::lower;
  LinearExponent exponent;  // meaningful for Kind::exp only

  static Factor q() { return {Kind::lower, {}}; }
  static Factor Q() { return {Kind::upper, {}}; }
  static Factor exp(LinearExponent e) { return {Kind::exp, std::move(e)}; }

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// coeff * f1 * f2 * ... with factor order preserved.
struct Word {
  ScalarCoeff coeff;
  std::vector<Factor> factors;
};

/// Shape e^{s} q^i e^{alpha q} e^{beta Q} Q^j of a well-ordered term.
struct OrderedMonomial {
  int lower_power = 0;
  int upper_power = 0;
  ScalarCoeff scalar_exp;
  ScalarCoeff lower_exp;
  ScalarCoeff upper_exp;

  bool has_exponential() const {
    return !scalar_exp.is_zero() || !lower_exp.is_zero() || !upper_exp.is_zero();
  }
  bool is_unit() const { return lower_power == 0 && upper_power == 0 && !has_exponential(); }
  friend bool operator==(const OrderedMonomial&, const OrderedMonomial&) = default;
};

/// Canonical term order: polynomial terms first, by descending total degree
/// then descending power of q; exponential terms after, keyed by exponents.
struct OrderedMonomialLess {
  bool operator()(const OrderedMonomial& a, const OrderedMonomial& b) const;
};

using OrderedTerms = std::map<OrderedMonomial, ScalarCoeff, OrderedMonomialLess>;

/// Central value kappa of [q, Q].
struct CommutatorSpec {
  ScalarCoeff kappa;

  /// kappa = -i*hbar*t/m, from q = Q + P t/m and [Q, P] = i*hbar.
  static CommutatorSpec free_particle();
};

/// Noncommutative expression in q (lower case) and Q (upper case).
///
/// A general expression is a list of words whose factor order is kept as
/// written. A well-ordered expression is the unique normal form with every
/// function of q to the left of every function of Q.
class OperatorExpr {
 public:
  OperatorExpr() = default;

  static OperatorExpr scalar(const ScalarCoeff& c);
  static OperatorExpr lower();
  static OperatorExpr upper();
  static OperatorExpr exponential(const LinearExponent& e);
  static OperatorExpr from_words(std::vector<Word> words);
  static OperatorExpr from_terms(OrderedTerms terms);

  bool is_well_ordered() const { return well_ordered_; }
  bool is_zero() const;
  /// Scalar value when the expression has no operator factors at all.
  std::optional<ScalarCoeff> as_scalar() const;

  /// General-form view; well-ordered expressions are expanded to words.
  std::vector<Word> words() const;
  /// Normal-form terms. Throws InvalidArgument on a general expression.
  const OrderedTerms& terms() const;

  int total_degree() const;
  bool has_exponential() const;

  OperatorExpr operator-() const;
  friend OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b);
  friend OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) { return a + (-b); }
  /// Noncommutative product; the result is in general form.
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);
  friend OperatorExpr operator*(const ScalarCoeff& c, const OperatorExpr& a);

  /// Structural equality: same form flag and same terms or words.
  friend bool operator==(const OperatorExpr& a, const OperatorExpr& b);

  /// Text in the parser grammar. Well-ordered output is deterministic.
  std::string str() const;

 private:
  bool well_ordered_ = true;
  OrderedTerms terms_;
  std::vector<Word> words_;
};

/// Unique well-ordered normal form under [q, Q] = kappa.
OperatorExpr wellorder(const OperatorExpr& expr, const CommutatorSpec& comm);

enum class DerivativeVariable { lower, upper, time };

/// Formal derivative of a well-ordered expression.
OperatorExpr formal_derivative(const OperatorExpr& expr, DerivativeVariable wrt);

/// c-number image W(q, Q) of a well-ordered expression at numeric q, Q, with
/// the common <q|Q> factor divided out.
std::complex<double> matrix_element(const OperatorExpr& expr, std::complex<double> q, std::complex<double> Q,
                                    const SymbolBindings& bindings);

/// Exact c-number image at scalar q, Q for a polynomial well-ordered expression.
ScalarCoeff image_at(const OperatorExpr& expr, const ScalarCoeff& q, const ScalarCoeff& Q);

/// wellorder(A B - B A).
OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b, const CommutatorSpec& comm);

namespace detail {
// Right multiplication of a normal form by a single factor.
OrderedTerms times_lower(const OrderedTerms& terms, const ScalarCoeff& kappa);
OrderedTerms times_upper(const OrderedTerms& terms);
OrderedTerms times_exp(const OrderedTerms& terms, const LinearExponent& e, const ScalarCoeff& kappa);
void accumulate(OrderedTerms& terms, const OrderedMonomial& mono, const ScalarCoeff& c);
}  // namespace detail

}  // namespace qhj::algebra

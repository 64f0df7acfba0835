#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>

#include "qhj/algebra/polynomial.hpp"

namespace qhj::algebra {

/// Numeric values for the commuting symbols; unset entries are unbound.
struct SymbolBindings {
  std::array<std::optional<std::complex<double>>, kSymbolCount> values{};

  SymbolBindings& set(Symbol s, std::complex<double> v) {
    values[static_cast<std::size_t>(s)] = v;
    return *this;
  }
};

/// Exact rational function over Q(i) in the commuting symbols.
///
/// Canonical form: numerator and denominator coprime, denominator monic in
/// the monomial order, zero represented as 0/1. Two equal values therefore
/// compare equal member-wise.
class ScalarCoeff {
 public:
  ScalarCoeff() : den_(1) {}
  ScalarCoeff(long c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  ScalarCoeff(const GaussianRational& c) : num_(c), den_(1) {}  // NOLINT
  ScalarCoeff(Polynomial num) : num_(std::move(num)), den_(1) {}  // NOLINT
  ScalarCoeff(Polynomial num, Polynomial den);

  static ScalarCoeff symbol(Symbol s) { return ScalarCoeff(Polynomial::variable(s)); }
  static ScalarCoeff imaginary_unit() { return ScalarCoeff(GaussianRational::imaginary_unit()); }
  static ScalarCoeff rational(long num, long den) { return ScalarCoeff(GaussianRational(mpq_class(num, den))); }

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return den_.is_constant() && num_ == Polynomial(1); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  std::optional<GaussianRational> constant_value() const;
  bool depends_on(Symbol s) const { return num_.depends_on(s) || den_.depends_on(s); }
  /// True when the leading numerator coefficient is negative (printing sign).
  bool is_negative() const { return !num_.is_zero() && num_.leading_coefficient().is_negative(); }

  ScalarCoeff operator-() const;
  ScalarCoeff& operator+=(const ScalarCoeff& o);
  ScalarCoeff& operator-=(const ScalarCoeff& o);
  ScalarCoeff& operator*=(const ScalarCoeff& o);
  ScalarCoeff& operator/=(const ScalarCoeff& o);

  friend ScalarCoeff operator+(ScalarCoeff a, const ScalarCoeff& b) { return a += b; }
  friend ScalarCoeff operator-(ScalarCoeff a, const ScalarCoeff& b) { return a -= b; }
  friend ScalarCoeff operator*(ScalarCoeff a, const ScalarCoeff& b) { return a *= b; }
  friend ScalarCoeff operator/(ScalarCoeff a, const ScalarCoeff& b) { return a /= b; }

  ScalarCoeff pow(int k) const;
  ScalarCoeff derivative(Symbol s) const;

  /// Throws InvalidArgument when a symbol present in the value is unbound.
  std::complex<double> evaluate(const SymbolBindings& b) const;

  friend bool operator==(const ScalarCoeff& a, const ScalarCoeff& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend int compare(const ScalarCoeff& a, const ScalarCoeff& b);
  friend bool operator<(const ScalarCoeff& a, const ScalarCoeff& b) { return compare(a, b) < 0; }

  /// Parseable text: "num", "num/den", parenthesised where precedence needs it.
  std::string str() const;
  /// False when str() must be parenthesised before it multiplies something.
  bool prints_as_product() const;

 private:
  void normalize();
  void make_den_monic();
  void multiply_reduced(const Polynomial& n, const Polynomial& d);

  Polynomial num_;
  Polynomial den_;
};

}  // namespace qhj::algebra

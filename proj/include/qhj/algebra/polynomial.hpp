#pragma once

#include <gmpxx.h>

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace qhj::algebra {

/// Commuting symbols that may appear in scalar coefficients.
enum class Symbol : std::uint8_t { hbar, m, t, omega, u, kappa };
inline constexpr std::size_t kSymbolCount = 6;

std::string_view symbol_name(Symbol s);
std::optional<Symbol> symbol_from_name(std::string_view name);

/// Exact element of Q(i).
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(mpq_class re, mpq_class im = 0);

  static GaussianRational imaginary_unit() { return {0, 1}; }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
  /// True when the first nonzero of (re, im) is negative.
  bool is_negative() const;

  GaussianRational operator-() const { return {-re_, -im_}; }
  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend int compare(const GaussianRational& a, const GaussianRational& b);

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }
  std::string str() const;

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

using Exponents = std::array<int, kSymbolCount>;

/// Graded reverse order: higher total degree first, then lexicographically
/// larger exponent vectors first. Iterating a term map yields the leading term
/// first.
struct MonomialOrder {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Sparse multivariate polynomial over Q(i) in the commuting symbols.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, GaussianRational, MonomialOrder>;

  Polynomial() = default;
  Polynomial(const GaussianRational& c);  // NOLINT(google-explicit-constructor)
  Polynomial(long c) : Polynomial(GaussianRational(c)) {}  // NOLINT

  static Polynomial variable(Symbol s, int power = 1);
  static Polynomial monomial(const Exponents& e, const GaussianRational& c);

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  std::optional<GaussianRational> constant_value() const;

  int degree(Symbol s) const;
  int total_degree() const;
  bool depends_on(Symbol s) const { return degree(s) > 0; }

  const Exponents& leading_exponents() const { return terms_.begin()->first; }
  const GaussianRational& leading_coefficient() const { return terms_.begin()->second; }

  /// Coefficient of s^k as a polynomial in the remaining symbols.
  Polynomial coefficient_in(Symbol s, int k) const;

  Polynomial derivative(Symbol s) const;
  std::complex<double> evaluate(const std::array<std::complex<double>, kSymbolCount>& values) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const GaussianRational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const GaussianRational& c) { return a *= c; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
  friend int compare(const Polynomial& a, const Polynomial& b);

  /// Divides by the leading coefficient; zero stays zero.
  Polynomial monic() const;

  std::string str() const;

 private:
  void add_term(const Exponents& e, const GaussianRational& c);

  TermMap terms_;
};

/// Exact quotient a / b; throws DerivationFailure when b does not divide a.
Polynomial exact_divide(const Polynomial& a, const Polynomial& b);

/// Monic greatest common divisor (recursive primitive remainder sequences).
Polynomial gcd(const Polynomial& a, const Polynomial& b);

/// Pseudo-remainder of a by b viewed as univariate polynomials in s.
Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, Symbol s);

}  // namespace qhj::algebra

#include "qhj/algebra/scalar.hpp"

#include <utility>

#include "qhj/errors.hpp"

namespace qhj::algebra {

namespace {

bool needs_parens(const Polynomial& p) { return p.terms().size() > 1; }

}  // namespace

ScalarCoeff::ScalarCoeff(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw InvalidArgument("zero denominator in scalar coefficient");
  normalize();
}

void ScalarCoeff::normalize() {
  if (num_.is_zero()) {
    den_ = Polynomial(1);
    return;
  }
  if (!den_.is_constant()) {
    Polynomial g = gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = exact_divide(num_, g);
      den_ = exact_divide(den_, g);
    }
  }
  make_den_monic();
}

void ScalarCoeff::make_den_monic() {
  if (num_.is_zero()) {
    den_ = Polynomial(1);
    return;
  }
  const GaussianRational lead = den_.leading_coefficient();
  if (!lead.is_one()) {
    const GaussianRational inv = GaussianRational(1) / lead;
    num_ *= inv;
    den_ *= inv;
  }
}

std::optional<GaussianRational> ScalarCoeff::constant_value() const {
  if (!is_constant()) return std::nullopt;
  return *num_.constant_value() / den_.leading_coefficient();
}

ScalarCoeff ScalarCoeff::operator-() const {
  ScalarCoeff out = *this;
  out.num_ = -out.num_;
  return out;
}

// Both operands are reduced, so only factors of the common denominator part
// can cancel (Henrici).
ScalarCoeff& ScalarCoeff::operator+=(const ScalarCoeff& o) {
  if (o.is_zero()) return *this;
  if (den_ == o.den_) {
    num_ += o.num_;
    normalize();
    return *this;
  }
  const Polynomial g = gcd(den_, o.den_);
  const Polynomial da = exact_divide(den_, g);
  const Polynomial db = exact_divide(o.den_, g);
  num_ = num_ * db + o.num_ * da;
  den_ = da * o.den_;
  if (!g.is_constant() && !num_.is_zero()) {
    const Polynomial h = gcd(num_, g);
    if (!h.is_constant()) {
      num_ = exact_divide(num_, h);
      den_ = exact_divide(den_, h);
    }
  }
  make_den_monic();
  return *this;
}

ScalarCoeff& ScalarCoeff::operator-=(const ScalarCoeff& o) { return *this += -o; }

ScalarCoeff& ScalarCoeff::operator*=(const ScalarCoeff& o) {
  if (is_zero()) return *this;
  if (o.is_zero()) {
    *this = ScalarCoeff();
    return *this;
  }
  multiply_reduced(o.num_, o.den_);
  return *this;
}

ScalarCoeff& ScalarCoeff::operator/=(const ScalarCoeff& o) {
  if (o.is_zero()) throw InvalidArgument("division by zero scalar");
  multiply_reduced(o.den_, o.num_);
  return *this;
}

// num/den times n/d with n/d reduced: cancel across the diagonals only.
void ScalarCoeff::multiply_reduced(const Polynomial& n, const Polynomial& d) {
  const Polynomial g1 = gcd(num_, d);
  const Polynomial g2 = gcd(n, den_);
  num_ = exact_divide(num_, g1) * exact_divide(n, g2);
  den_ = exact_divide(den_, g2) * exact_divide(d, g1);
  make_den_monic();
}

ScalarCoeff ScalarCoeff::pow(int k) const {
  if (k < 0) return ScalarCoeff(1) / pow(-k);
  ScalarCoeff out(1);
  ScalarCoeff base = *this;
  while (k > 0) {
    if (k & 1) out *= base;
    k >>= 1;
    if (k > 0) base *= base;
  }
  return out;
}

ScalarCoeff ScalarCoeff::derivative(Symbol s) const {
  if (!depends_on(s)) return ScalarCoeff();
  return ScalarCoeff(num_.derivative(s) * den_ - num_ * den_.derivative(s), den_ * den_);
}

std::complex<double> ScalarCoeff::evaluate(const SymbolBindings& b) const {
  std::array<std::complex<double>, kSymbolCount> values{};
  for (std::size_t k = 0; k < kSymbolCount; ++k) {
    const auto s = static_cast<Symbol>(k);
    if (!depends_on(s)) continue;
    if (!b.values[k]) throw InvalidArgument("unbound symbol '" + std::string(symbol_name(s)) + "'");
    values[k] = *b.values[k];
  }
  const std::complex<double> d = den_.evaluate(values);
  if (d == std::complex<double>(0.0, 0.0)) throw DomainError("scalar coefficient denominator vanishes");
  return num_.evaluate(values) / d;
}

int compare(const ScalarCoeff& a, const ScalarCoeff& b) {
  if (int c = compare(a.den_, b.den_); c != 0) return c;
  return compare(a.num_, b.num_);
}

namespace {

// Scales num/den by a common rational so every coefficient is an integer with
// no common integer content.
std::pair<Polynomial, Polynomial> integral_form(const Polynomial& num, const Polynomial& den) {
  mpz_class l = 1;
  for (const Polynomial* p : {&num, &den}) {
    for (const auto& [e, c] : p->terms()) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.real().get_den_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.imag().get_den_mpz_t());
    }
  }
  Polynomial n = num * GaussianRational(mpq_class(l));
  Polynomial d = den * GaussianRational(mpq_class(l));
  mpz_class g = 0;
  for (const Polynomial* p : {&n, &d}) {
    for (const auto& [e, c] : p->terms()) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.real().get_num_mpz_t());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.imag().get_num_mpz_t());
    }
  }
  if (g > 1) {
    const GaussianRational inv(mpq_class(mpz_class(1), g));
    n *= inv;
    d *= inv;
  }
  return {std::move(n), std::move(d)};
}

}  // namespace

bool ScalarCoeff::prints_as_product() const {
  if (!needs_parens(num_)) return true;
  return !(integral_form(num_, den_).second == Polynomial(1));
}

std::string ScalarCoeff::str() const {
  if (num_.is_zero()) return "0";
  auto [n, d] = integral_form(num_, den_);
  std::string ns = n.str();
  if (d == Polynomial(1)) return ns;
  if (needs_parens(n)) ns = "(" + ns + ")";
  std::string ds = d.str();
  if (needs_parens(d) || ds.find_first_of("*/^") != std::string::npos) ds = "(" + ds + ")";
  return ns + "/" + ds;
}

}  // namespace qhj::algebra

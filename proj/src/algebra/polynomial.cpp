#include "qhj/algebra/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "qhj/errors.hpp"

namespace qhj::algebra {

namespace {

constexpr std::array<std::string_view, kSymbolCount> kSymbolNames = {
    "hbar", "m", "t", "omega", "u", "kappa"};

int total(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

bool divides(const Exponents& d, const Exponents& e) {
  for (std::size_t k = 0; k < kSymbolCount; ++k) {
    if (d[k] > e[k]) return false;
  }
  return true;
}

std::string monomial_str(const Exponents& e) {
  std::string out;
  for (std::size_t k = 0; k < kSymbolCount; ++k) {
    if (e[k] == 0) continue;
    if (!out.empty()) out += '*';
    out += kSymbolNames[k];
    if (e[k] != 1) out += "^" + std::to_string(e[k]);
  }
  return out;
}

// Content with respect to s: gcd of the coefficients of every power of s.
Polynomial content_in(const Polynomial& p, Symbol s) {
  Polynomial g;
  for (int k = p.degree(s); k >= 0; --k) {
    Polynomial c = p.coefficient_in(s, k);
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

// Scaled to a monic leading coefficient so that numeric coefficients do not
// grow along a remainder sequence.
Polynomial primitive_part_in(const Polynomial& p, Symbol s) {
  if (p.is_zero()) return p;
  return exact_divide(p, content_in(p, s)).monic();
}

Polynomial monomial_gcd(const Polynomial& mono, const Polynomial& p) {
  Exponents e = mono.leading_exponents();
  for (const auto& [pe, c] : p.terms()) {
    for (std::size_t k = 0; k < kSymbolCount; ++k) e[k] = std::min(e[k], pe[k]);
  }
  return Polynomial::monomial(e, GaussianRational(1));
}

}  // namespace

std::string_view symbol_name(Symbol s) { return kSymbolNames[static_cast<std::size_t>(s)]; }

std::optional<Symbol> symbol_from_name(std::string_view name) {
  for (std::size_t k = 0; k < kSymbolCount; ++k) {
    if (kSymbolNames[k] == name) return static_cast<Symbol>(k);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// GaussianRational

GaussianRational::GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

bool GaussianRational::is_negative() const {
  if (sgn(re_) != 0) return sgn(re_) < 0;
  return sgn(im_) < 0;
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = re;
  im_ = im;
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  mpq_class norm = o.re_ * o.re_ + o.im_ * o.im_;
  if (sgn(norm) == 0) throw InvalidArgument("division by zero in Q(i)");
  mpq_class re = (re_ * o.re_ + im_ * o.im_) / norm;
  mpq_class im = (im_ * o.re_ - re_ * o.im_) / norm;
  re_ = re;
  im_ = im;
  return *this;
}

int compare(const GaussianRational& a, const GaussianRational& b) {
  if (int c = cmp(a.re_, b.re_); c != 0) return c < 0 ? -1 : 1;
  if (int c = cmp(a.im_, b.im_); c != 0) return c < 0 ? -1 : 1;
  return 0;
}

std::string GaussianRational::str() const {
  if (sgn(im_) == 0) return re_.get_str();
  std::string im_part;
  if (im_ == 1) {
    im_part = "i";
  } else if (im_ == -1) {
    im_part = "-i";
  } else {
    im_part = im_.get_str() + "*i";
  }
  if (sgn(re_) == 0) return im_part;
  std::string out = "(" + re_.get_str();
  out += (im_part.front() == '-') ? im_part : "+" + im_part;
  return out + ")";
}

// ---------------------------------------------------------------------------
// Polynomial

bool MonomialOrder::operator()(const Exponents& a, const Exponents& b) const {
  int ta = total(a);
  int tb = total(b);
  if (ta != tb) return ta > tb;
  return a > b;
}

Polynomial::Polynomial(const GaussianRational& c) {
  if (!c.is_zero()) terms_.emplace(Exponents{}, c);
}

Polynomial Polynomial::variable(Symbol s, int power) {
  Exponents e{};
  e[static_cast<std::size_t>(s)] = power;
  return monomial(e, GaussianRational(1));
}

Polynomial Polynomial::monomial(const Exponents& e, const GaussianRational& c) {
  Polynomial p;
  p.add_term(e, c);
  return p;
}

void Polynomial::add_term(const Exponents& e, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && total(terms_.begin()->first) == 0);
}

std::optional<GaussianRational> Polynomial::constant_value() const {
  if (terms_.empty()) return GaussianRational(0);
  if (is_constant()) return terms_.begin()->second;
  return std::nullopt;
}

int Polynomial::degree(Symbol s) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<std::size_t>(s)]);
  return d;
}

int Polynomial::total_degree() const { return terms_.empty() ? 0 : total(terms_.begin()->first); }

Polynomial Polynomial::coefficient_in(Symbol s, int k) const {
  const auto idx = static_cast<std::size_t>(s);
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    if (e[idx] != k) continue;
    Exponents reduced = e;
    reduced[idx] = 0;
    out.add_term(reduced, c);
  }
  return out;
}

Polynomial Polynomial::derivative(Symbol s) const {
  const auto idx = static_cast<std::size_t>(s);
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    if (e[idx] == 0) continue;
    Exponents d = e;
    d[idx] -= 1;
    out.add_term(d, c * GaussianRational(e[idx]));
  }
  return out;
}

std::complex<double> Polynomial::evaluate(const std::array<std::complex<double>, kSymbolCount>& values) const {
  std::complex<double> sum{0.0, 0.0};
  for (const auto& [e, c] : terms_) {
    std::complex<double> term = c.to_complex();
    for (std::size_t k = 0; k < kSymbolCount; ++k) {
      for (int j = 0; j < e[k]; ++j) term *= values[k];
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponents e;
      for (std::size_t k = 0; k < kSymbolCount; ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  *this = *this * o;
  return *this;
}

Polynomial& Polynomial::operator*=(const GaussianRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coef] : terms_) coef *= c;
  return *this;
}

int compare(const Polynomial& a, const Polynomial& b) {
  auto ia = a.terms_.begin();
  auto ib = b.terms_.begin();
  MonomialOrder order;
  for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return order(ia->first, ib->first) ? -1 : 1;
    if (int c = compare(ia->second, ib->second); c != 0) return c;
  }
  if (ia == a.terms_.end() && ib == b.terms_.end()) return 0;
  return ia == a.terms_.end() ? -1 : 1;
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  Polynomial out = *this;
  out *= GaussianRational(1) / leading_coefficient();
  return out;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    std::string mono = monomial_str(e);
    std::string term;
    if (mono.empty()) {
      term = c.str();
    } else if (c.is_one()) {
      term = mono;
    } else if (c == GaussianRational(-1)) {
      term = "-" + mono;
    } else {
      term = c.str() + "*" + mono;
    }
    if (first) {
      out = term;
      first = false;
    } else if (term.front() == '-') {
      out += " - " + term.substr(1);
    } else {
      out += " + " + term;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Division and gcd

Polynomial exact_divide(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw InvalidArgument("polynomial division by zero");
  if (b.is_constant()) return a * (GaussianRational(1) / b.leading_coefficient());
  Polynomial quotient;
  Polynomial rem = a;
  const Exponents& lb = b.leading_exponents();
  const GaussianRational& cb = b.leading_coefficient();
  while (!rem.is_zero()) {
    const Exponents& lr = rem.leading_exponents();
    if (!divides(lb, lr)) throw DerivationFailure("inexact polynomial division");
    Exponents e;
    for (std::size_t k = 0; k < kSymbolCount; ++k) e[k] = lr[k] - lb[k];
    Polynomial t = Polynomial::monomial(e, rem.leading_coefficient() / cb);
    quotient += t;
    rem -= t * b;
  }
  return quotient;
}

Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, Symbol s) {
  const int db = b.degree(s);
  const Polynomial lcb = b.coefficient_in(s, db);
  Polynomial r = a;
  while (!r.is_zero() && r.degree(s) >= db) {
    const int dr = r.degree(s);
    Polynomial lcr = r.coefficient_in(s, dr);
    r = lcb * r - lcr * Polynomial::variable(s, dr - db) * b;
  }
  return r;
}

namespace {

using Univariate = std::vector<GaussianRational>;  // coefficient of s^k at index k

void trim(Univariate& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

// p with every symbol except s replaced by the integers in point.
Univariate specialize(const Polynomial& p, Symbol s, const std::array<long, kSymbolCount>& point) {
  const auto idx = static_cast<std::size_t>(s);
  Univariate out(static_cast<std::size_t>(p.degree(s)) + 1);
  for (const auto& [e, c] : p.terms()) {
    GaussianRational v = c;
    for (std::size_t k = 0; k < kSymbolCount; ++k) {
      if (k == idx) continue;
      for (int j = 0; j < e[k]; ++j) v *= GaussianRational(point[k]);
    }
    out[static_cast<std::size_t>(e[idx])] += v;
  }
  trim(out);
  return out;
}

// Degree of the univariate gcd over Q(i).
std::size_t univariate_gcd_degree(Univariate a, Univariate b) {
  if (a.size() < b.size()) std::swap(a, b);
  while (!b.empty()) {
    const GaussianRational lb = b.back();
    while (a.size() >= b.size() && !a.empty()) {
      const GaussianRational f = a.back() / lb;
      const std::size_t shift = a.size() - b.size();
      for (std::size_t k = 0; k < b.size(); ++k) a[k + shift] -= f * b[k];
      a.pop_back();
      trim(a);
    }
    std::swap(a, b);
  }
  return a.empty() ? 0 : a.size() - 1;
}

// True when a and b provably share no factor that depends on s: some
// specialization of the other symbols keeps both leading coefficients
// nonzero and leaves coprime univariate images. False means "unknown".
bool coprime_in(const Polynomial& a, const Polynomial& b, Symbol s) {
  static constexpr std::array<std::array<long, kSymbolCount>, 3> kPoints = {{
      {3, 7, 5, 11, 2, 13},
      {-4, 9, 17, -6, 19, 5},
      {23, -2, 8, 29, -11, 3},
  }};
  const int da = a.degree(s), db = b.degree(s);
  for (const auto& pt : kPoints) {
    const Univariate ua = specialize(a, s, pt);
    const Univariate ub = specialize(b, s, pt);
    if (static_cast<int>(ua.size()) != da + 1 || static_cast<int>(ub.size()) != db + 1) continue;
    if (univariate_gcd_degree(ua, ub) == 0) return true;
  }
  return false;
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Polynomial(1);
  if (a.is_monomial()) return monomial_gcd(a, b);
  if (b.is_monomial()) return monomial_gcd(b, a);

  std::optional<Symbol> main;
  for (std::size_t k = 0; k < kSymbolCount && !main; ++k) {
    auto s = static_cast<Symbol>(k);
    if (a.depends_on(s) || b.depends_on(s)) main = s;
  }
  const Symbol s = *main;
  if (!a.depends_on(s)) return gcd(a, content_in(b, s));
  if (!b.depends_on(s)) return gcd(content_in(a, s), b);

  Polynomial ca = content_in(a, s);
  Polynomial cb = content_in(b, s);
  Polynomial c = gcd(ca, cb);
  Polynomial pa = exact_divide(a, ca).monic();
  Polynomial pb = exact_divide(b, cb).monic();
  if (coprime_in(pa, pb, s)) return c.monic();
  if (pa.degree(s) < pb.degree(s)) std::swap(pa, pb);

  while (true) {
    Polynomial r = pseudo_remainder(pa, pb, s);
    if (r.is_zero()) break;
    if (r.degree(s) == 0) {
      pb = Polynomial(1);
      break;
    }
    pa = std::move(pb);
    pb = primitive_part_in(r, s);
  }
  return (c * primitive_part_in(pb, s)).monic();
}

}  // namespace qhj::algebra

#include "qhj/algebra/operator.hpp"

#include <algorithm>

#include "qhj/errors.hpp"

namespace qhj::algebra {

namespace {

ScalarCoeff binomial(int n, int k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return ScalarCoeff(GaussianRational(mpq_class(b)));
}

std::vector<Factor> monomial_factors(const OrderedMonomial& m) {
  std::vector<Factor> f;
  if (!m.scalar_exp.is_zero()) f.push_back(Factor::exp({m.scalar_exp, {}, {}}));
  for (int k = 0; k < m.lower_power; ++k) f.push_back(Factor::q());
  if (!m.lower_exp.is_zero()) f.push_back(Factor::exp({{}, m.lower_exp, {}}));
  if (!m.upper_exp.is_zero()) f.push_back(Factor::exp({{}, {}, m.upper_exp}));
  for (int k = 0; k < m.upper_power; ++k) f.push_back(Factor::Q());
  return f;
}

// Joins (coefficient, operator text) summands, pulling leading minus signs
// out where the coefficient prints as a single product.
std::string join_summands(const std::vector<std::pair<ScalarCoeff, std::string>>& parts) {
  if (parts.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [c, op] : parts) {
    bool negative = c.prints_as_product() && c.is_negative();
    ScalarCoeff mag = negative ? -c : c;
    std::string body;
    if (op.empty()) {
      body = mag.prints_as_product() ? mag.str() : "(" + mag.str() + ")";
    } else if (mag.is_one()) {
      body = op;
    } else {
      body = (mag.prints_as_product() ? mag.str() : "(" + mag.str() + ")") + "*" + op;
    }
    if (first) {
      out = negative ? "-" + body : body;
      first = false;
    } else {
      out += negative ? " - " + body : " + " + body;
    }
  }
  return out;
}

std::string power_text(const char* name, int k) {
  if (k == 1) return name;
  return std::string(name) + "^" + std::to_string(k);
}

std::string exponent_text(const LinearExponent& e) {
  std::vector<std::pair<ScalarCoeff, std::string>> parts;
  if (!e.lower.is_zero()) parts.emplace_back(e.lower, "q");
  if (!e.upper.is_zero()) parts.emplace_back(e.upper, "Q");
  if (!e.scalar.is_zero()) parts.emplace_back(e.scalar, "");
  return "exp(" + join_summands(parts) + ")";
}

std::string factors_text(const std::vector<Factor>& factors) {
  std::string out;
  auto append = [&out](const std::string& s) {
    if (!out.empty()) out += '*';
    out += s;
  };
  for (std::size_t k = 0; k < factors.size();) {
    const Factor& f = factors[k];
    if (f.kind == Factor::Kind::exp) {
      append(exponent_text(f.exponent));
      ++k;
      continue;
    }
    std::size_t run = 1;
    while (k + run < factors.size() && factors[k + run].kind == f.kind) ++run;
    append(power_text(f.kind == Factor::Kind::lower ? "q" : "Q", static_cast<int>(run)));
    k += run;
  }
  return out;
}

OrderedTerms unit_terms(const ScalarCoeff& c) {
  OrderedTerms t;
  detail::accumulate(t, OrderedMonomial{}, c);
  return t;
}

}  // namespace

bool OrderedMonomialLess::operator()(const OrderedMonomial& a, const OrderedMonomial& b) const {
  const bool ea = a.has_exponential();
  const bool eb = b.has_exponential();
  if (ea != eb) return !ea;
  if (ea) {
    if (int c = compare(a.lower_exp, b.lower_exp); c != 0) return c < 0;
    if (int c = compare(a.upper_exp, b.upper_exp); c != 0) return c < 0;
    if (int c = compare(a.scalar_exp, b.scalar_exp); c != 0) return c < 0;
  }
  const int da = a.lower_power + a.upper_power;
  const int db = b.lower_power + b.upper_power;
  if (da != db) return da > db;
  return a.lower_power > b.lower_power;
}

CommutatorSpec CommutatorSpec::free_particle() {
  using S = Symbol;
  return {-ScalarCoeff::imaginary_unit() * ScalarCoeff::symbol(S::hbar) * ScalarCoeff::symbol(S::t) /
          ScalarCoeff::symbol(S::m)};
}

// ---------------------------------------------------------------------------
// OperatorExpr

OperatorExpr OperatorExpr::scalar(const ScalarCoeff& c) { return from_terms(unit_terms(c)); }

OperatorExpr OperatorExpr::lower() {
  OrderedMonomial m;
  m.lower_power = 1;
  OrderedTerms t;
  t.emplace(m, ScalarCoeff(1));
  return from_terms(std::move(t));
}

OperatorExpr OperatorExpr::upper() {
  OrderedMonomial m;
  m.upper_power = 1;
  OrderedTerms t;
  t.emplace(m, ScalarCoeff(1));
  return from_terms(std::move(t));
}

OperatorExpr OperatorExpr::exponential(const LinearExponent& e) {
  return from_words({Word{ScalarCoeff(1), {Factor::exp(e)}}});
}

OperatorExpr OperatorExpr::from_words(std::vector<Word> words) {
  OperatorExpr out;
  out.well_ordered_ = false;
  for (auto& w : words) {
    if (!w.coeff.is_zero()) out.words_.push_back(std::move(w));
  }
  return out;
}

OperatorExpr OperatorExpr::from_terms(OrderedTerms terms) {
  OperatorExpr out;
  for (auto it = terms.begin(); it != terms.end();) {
    it = it->second.is_zero() ? terms.erase(it) : std::next(it);
  }
  out.terms_ = std::move(terms);
  return out;
}

bool OperatorExpr::is_zero() const { return well_ordered_ ? terms_.empty() : words_.empty(); }

std::optional<ScalarCoeff> OperatorExpr::as_scalar() const {
  ScalarCoeff sum;
  for (const Word& w : words()) {
    if (!w.factors.empty()) return std::nullopt;
    sum += w.coeff;
  }
  return sum;
}

std::vector<Word> OperatorExpr::words() const {
  if (!well_ordered_) return words_;
  std::vector<Word> out;
  out.reserve(terms_.size());
  for (const auto& [m, c] : terms_) out.push_back({c, monomial_factors(m)});
  return out;
}

const OrderedTerms& OperatorExpr::terms() const {
  if (!well_ordered_) throw InvalidArgument("expression is not well-ordered");
  return terms_;
}

int OperatorExpr::total_degree() const {
  int d = 0;
  for (const Word& w : words()) {
    int n = 0;
    for (const Factor& f : w.factors) n += (f.kind == Factor::Kind::exp) ? 0 : 1;
    d = std::max(d, n);
  }
  return d;
}

bool OperatorExpr::has_exponential() const {
  for (const Word& w : words()) {
    for (const Factor& f : w.factors) {
      if (f.kind == Factor::Kind::exp) return true;
    }
  }
  return false;
}

OperatorExpr OperatorExpr::operator-() const { return ScalarCoeff(-1) * *this; }

OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) {
  if (a.well_ordered_ && b.well_ordered_) {
    OrderedTerms t = a.terms_;
    for (const auto& [m, c] : b.terms_) detail::accumulate(t, m, c);
    return OperatorExpr::from_terms(std::move(t));
  }
  std::vector<Word> w = a.words();
  std::vector<Word> wb = b.words();
  w.insert(w.end(), std::make_move_iterator(wb.begin()), std::make_move_iterator(wb.end()));
  return OperatorExpr::from_words(std::move(w));
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  std::vector<Word> out;
  const auto wa = a.words();
  const auto wb = b.words();
  out.reserve(wa.size() * wb.size());
  for (const Word& x : wa) {
    for (const Word& y : wb) {
      Word w{x.coeff * y.coeff, x.factors};
      w.factors.insert(w.factors.end(), y.factors.begin(), y.factors.end());
      out.push_back(std::move(w));
    }
  }
  return OperatorExpr::from_words(std::move(out));
}

OperatorExpr operator*(const ScalarCoeff& c, const OperatorExpr& a) {
  if (a.well_ordered_) {
    OrderedTerms t;
    if (!c.is_zero()) {
      for (const auto& [m, coeff] : a.terms_) t.emplace(m, c * coeff);
    }
    return OperatorExpr::from_terms(std::move(t));
  }
  std::vector<Word> w = a.words_;
  for (Word& x : w) x.coeff = c * x.coeff;
  return OperatorExpr::from_words(std::move(w));
}

bool operator==(const OperatorExpr& a, const OperatorExpr& b) {
  if (a.well_ordered_ != b.well_ordered_) return false;
  if (a.well_ordered_) return a.terms_ == b.terms_;
  if (a.words_.size() != b.words_.size()) return false;
  for (std::size_t k = 0; k < a.words_.size(); ++k) {
    if (!(a.words_[k].coeff == b.words_[k].coeff) || a.words_[k].factors != b.words_[k].factors) return false;
  }
  return true;
}

std::string OperatorExpr::str() const {
  std::vector<std::pair<ScalarCoeff, std::string>> parts;
  for (const Word& w : words()) parts.emplace_back(w.coeff, factors_text(w.factors));
  return join_summands(parts);
}

// ---------------------------------------------------------------------------
// Normal ordering

namespace detail {

void accumulate(OrderedTerms& terms, const OrderedMonomial& mono, const ScalarCoeff& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms.emplace(mono, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms.erase(it);
  }
}

// (c e^s q^i e^{aq} e^{bQ} Q^j) q
//   = c e^s q^{i+1} ... - b kappa c (same) - j kappa c e^s q^i e^{aq} e^{bQ} Q^{j-1}
OrderedTerms times_lower(const OrderedTerms& terms, const ScalarCoeff& kappa) {
  OrderedTerms out;
  for (const auto& [m, c] : terms) {
    OrderedMonomial raised = m;
    raised.lower_power += 1;
    accumulate(out, raised, c);
    if (!m.upper_exp.is_zero()) accumulate(out, m, -(m.upper_exp * kappa * c));
    if (m.upper_power > 0) {
      OrderedMonomial lowered = m;
      lowered.upper_power -= 1;
      accumulate(out, lowered, -(ScalarCoeff(m.upper_power) * kappa * c));
    }
  }
  return out;
}

OrderedTerms times_upper(const OrderedTerms& terms) {
  OrderedTerms out;
  for (const auto& [m, c] : terms) {
    OrderedMonomial raised = m;
    raised.upper_power += 1;
    accumulate(out, raised, c);
  }
  return out;
}

// exp(s' + a'q + b'Q) = e^{s' - a'b' kappa/2} e^{a'q} e^{b'Q}; moving e^{a'q}
// left through e^{bQ} Q^j gives e^{-a' b kappa} and (Q - a' kappa)^j.
OrderedTerms times_exp(const OrderedTerms& terms, const LinearExponent& e, const ScalarCoeff& kappa) {
  OrderedTerms out;
  const ScalarCoeff own_shift = e.scalar - e.lower * e.upper * kappa / ScalarCoeff(2);
  const ScalarCoeff shift = -(e.lower * kappa);
  for (const auto& [m, c] : terms) {
    OrderedMonomial base = m;
    base.scalar_exp = m.scalar_exp + own_shift - e.lower * m.upper_exp * kappa;
    base.lower_exp = m.lower_exp + e.lower;
    base.upper_exp = m.upper_exp + e.upper;
    if (e.lower.is_zero()) {
      accumulate(out, base, c);
      continue;
    }
    const int j = m.upper_power;
    for (int k = 0; k <= j; ++k) {
      OrderedMonomial mk = base;
      mk.upper_power = k;
      accumulate(out, mk, c * binomial(j, k) * shift.pow(j - k));
    }
  }
  return out;
}

}  // namespace detail

OperatorExpr wellorder(const OperatorExpr& expr, const CommutatorSpec& comm) {
  if (expr.is_well_ordered()) return expr;
  OrderedTerms result;
  for (const Word& w : expr.words()) {
    OrderedTerms acc = unit_terms(w.coeff);
    for (const Factor& f : w.factors) {
      switch (f.kind) {
        case Factor::Kind::lower:
          acc = detail::times_lower(acc, comm.kappa);
          break;
        case Factor::Kind::upper:
          acc = detail::times_upper(acc);
          break;
        case Factor::Kind::exp:
          acc = detail::times_exp(acc, f.exponent, comm.kappa);
          break;
      }
      if (acc.empty()) break;
    }
    for (const auto& [m, c] : acc) detail::accumulate(result, m, c);
  }
  return OperatorExpr::from_terms(std::move(result));
}

OperatorExpr formal_derivative(const OperatorExpr& expr, DerivativeVariable wrt) {
  const OrderedTerms& terms = expr.terms();
  OrderedTerms out;
  for (const auto& [m, c] : terms) {
    switch (wrt) {
      case DerivativeVariable::lower: {
        if (m.lower_power > 0) {
          OrderedMonomial d = m;
          d.lower_power -= 1;
          detail::accumulate(out, d, ScalarCoeff(m.lower_power) * c);
        }
        if (!m.lower_exp.is_zero()) detail::accumulate(out, m, m.lower_exp * c);
        break;
      }
      case DerivativeVariable::upper: {
        if (m.upper_power > 0) {
          OrderedMonomial d = m;
          d.upper_power -= 1;
          detail::accumulate(out, d, ScalarCoeff(m.upper_power) * c);
        }
        if (!m.upper_exp.is_zero()) detail::accumulate(out, m, m.upper_exp * c);
        break;
      }
      case DerivativeVariable::time: {
        constexpr Symbol t = Symbol::t;
        detail::accumulate(out, m, c.derivative(t));
        if (m.scalar_exp.depends_on(t)) detail::accumulate(out, m, c * m.scalar_exp.derivative(t));
        if (m.lower_exp.depends_on(t)) {
          OrderedMonomial d = m;
          d.lower_power += 1;
          detail::accumulate(out, d, c * m.lower_exp.derivative(t));
        }
        if (m.upper_exp.depends_on(t)) {
          OrderedMonomial d = m;
          d.upper_power += 1;
          detail::accumulate(out, d, c * m.upper_exp.derivative(t));
        }
        break;
      }
    }
  }
  return OperatorExpr::from_terms(std::move(out));
}

std::complex<double> matrix_element(const OperatorExpr& expr, std::complex<double> q, std::complex<double> Q,
                                    const SymbolBindings& bindings) {
  std::complex<double> sum{0.0, 0.0};
  for (const auto& [m, c] : expr.terms()) {
    std::complex<double> v = c.evaluate(bindings) * std::pow(q, m.lower_power) * std::pow(Q, m.upper_power);
    if (m.has_exponential()) {
      v *= std::exp(m.scalar_exp.evaluate(bindings) + m.lower_exp.evaluate(bindings) * q +
                    m.upper_exp.evaluate(bindings) * Q);
    }
    sum += v;
  }
  return sum;
}

ScalarCoeff image_at(const OperatorExpr& expr, const ScalarCoeff& q, const ScalarCoeff& Q) {
  ScalarCoeff sum;
  for (const auto& [m, c] : expr.terms()) {
    if (m.has_exponential()) throw InvalidArgument("exact image requires a polynomial expression");
    sum += c * q.pow(m.lower_power) * Q.pow(m.upper_power);
  }
  return sum;
}

OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b, const CommutatorSpec& comm) {
  return wellorder(a * b - b * a, comm);
}

}  // namespace qhj::algebra

#include "qhj/algebra/parser.hpp"

#include <cctype>
#include <string>

#include "qhj/errors.hpp"

namespace qhj::algebra {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  OperatorExpr parse() {
    OperatorExpr e = expression();
    skip_space();
    if (pos_ < text_.size()) {
      if (starts_operand()) fail("juxtaposition is not allowed; use '*'");
      fail(std::string("unexpected '") + text_[pos_] + "'");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  bool starts_operand() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const auto ch = static_cast<unsigned char>(text_[pos_]);
    return std::isalnum(ch) || ch == '_' || ch == '(' || ch == '.';
  }

  OperatorExpr expression() {
    OperatorExpr e = term();
    for (;;) {
      if (accept('+')) {
        e = e + term();
      } else if (accept('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  OperatorExpr term() {
    OperatorExpr e = unary();
    for (;;) {
      if (accept('*')) {
        e = e * unary();
      } else if (peek('/')) {
        ++pos_;
        skip_space();
        const std::size_t at = pos_;
        OperatorExpr d = unary();
        auto s = d.as_scalar();
        if (!s) fail_at("division by an operator-valued expression", at);
        if (s->is_zero()) fail_at("division by zero", at);
        e = (ScalarCoeff(1) / *s) * e;
      } else {
        if (starts_operand()) fail("juxtaposition is not allowed; use '*'");
        return e;
      }
    }
  }

  OperatorExpr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  OperatorExpr power() {
    OperatorExpr base = primary();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t at = pos_;
    const long k = integer_exponent();
    if (k < 0) {
      auto s = base.as_scalar();
      if (!s) fail_at("negative power of an operator", at);
      if (s->is_zero()) fail_at("division by zero", at);
      return OperatorExpr::scalar(s->pow(static_cast<int>(k)));
    }
    if (auto s = base.as_scalar()) return OperatorExpr::scalar(s->pow(static_cast<int>(k)));
    OperatorExpr out = OperatorExpr::scalar(ScalarCoeff(1));
    for (long n = 0; n < k; ++n) out = out * base;
    return out;
  }

  long integer_exponent() {
    bool paren = accept('(');
    bool negative = false;
    if (accept('-')) negative = true;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("exponent must be an integer literal");
    if (pos_ < text_.size() && text_[pos_] == '.') {
      fail_at("non-integer exponent", start);
    }
    if (pos_ - start > 6) fail_at("exponent too large", start);
    long k = std::stol(std::string(text_.substr(start, pos_ - start)));
    if (paren) {
      if (peek('/') || peek('.')) fail_at("non-integer exponent", start);
      expect(')');
    }
    return negative ? -k : k;
  }

  OperatorExpr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char ch = text_[pos_];
    if (ch == '(') {
      ++pos_;
      OperatorExpr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return OperatorExpr::scalar(number());
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') return identifier();
    fail(std::string("unexpected '") + ch + "'");
  }

  ScalarCoeff number() {
    const std::size_t start = pos_;
    std::string digits;
    int decimals = 0;
    bool seen_point = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits += c;
        if (seen_point) ++decimals;
      } else if (c == '.' && !seen_point) {
        seen_point = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (digits.empty()) fail_at("malformed number", start);
    long exp10 = -decimals;
    if (pos_ + 1 < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      bool neg = false;
      if (text_[p] == '+' || text_[p] == '-') {
        neg = text_[p] == '-';
        ++p;
      }
      const std::size_t es = p;
      while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
      if (p > es) {
        if (p - es > 4) fail_at("number exponent too large", es);
        const long e = std::stol(std::string(text_.substr(es, p - es)));
        exp10 += neg ? -e : e;
        pos_ = p;
      }
    }
    mpz_class value(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    mpq_class r = exp10 < 0 ? mpq_class(value, scale) : mpq_class(value * scale);
    r.canonicalize();
    return ScalarCoeff(GaussianRational(r));
  }

  OperatorExpr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "q") return OperatorExpr::lower();
    if (name == "Q") return OperatorExpr::upper();
    if (name == "i") return OperatorExpr::scalar(ScalarCoeff::imaginary_unit());
    if (name == "exp") return exponential();
    if (auto s = symbol_from_name(name)) return OperatorExpr::scalar(ScalarCoeff::symbol(*s));
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  OperatorExpr exponential() {
    if (!peek('(')) fail("expected '(' after exp");
    ++pos_;
    const std::size_t arg_start = pos_;
    OperatorExpr arg = expression();
    expect(')');
    LinearExponent e;
    for (const Word& w : arg.words()) {
      if (w.factors.empty()) {
        e.scalar += w.coeff;
      } else if (w.factors.size() == 1 && w.factors[0].kind == Factor::Kind::lower) {
        e.lower += w.coeff;
      } else if (w.factors.size() == 1 && w.factors[0].kind == Factor::Kind::upper) {
        e.upper += w.coeff;
      } else {
        fail_at("argument of exp must be linear in q and Q", arg_start);
      }
    }
    if (e.is_zero()) return OperatorExpr::scalar(ScalarCoeff(1));
    return OperatorExpr::exponential(e);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

OperatorExpr parse_expr(std::string_view text) { return Parser(text).parse(); }

ScalarCoeff parse_scalar(std::string_view text) {
  OperatorExpr e = parse_expr(text);
  auto s = e.as_scalar();
  if (!s) throw ParseError("expected a scalar expression", 0);
  return *s;
}

}  // namespace qhj::algebra

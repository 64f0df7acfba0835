#pragma once

#include <string_view>

#include "qhj/algebra/operator.hpp"

namespace qhj::algebra {

/// Parses operator text into a general-form expression with factor order kept.
///
/// Atoms: q, Q, hbar, m, t, omega, u, kappa, i, integers and decimals (read as
/// exact rationals). Operators: + - * / ^ and parentheses; * is
/// noncommutative, / needs a scalar right operand, ^ takes an integer literal
/// and binds tightest. exp(...) accepts a linear form in q and Q.
/// Juxtaposition ("2q") is rejected. Errors raise ParseError with a position.
OperatorExpr parse_expr(std::string_view text);

/// Parses text that must reduce to a scalar (for kappa bindings and the like).
ScalarCoeff parse_scalar(std::string_view text);

}  // namespace qhj::algebra

#pragma once

#include <map>
#include <string>

#include "centerfocus/rational.hpp"

namespace cf {

using ParamMap = std::map<std::string, Rational>;

// Evaluates a coefficient expression over exact rationals.
//
// Grammar: rational/decimal literals, parameter names, binary + - * /,
// unary -, parentheses.  No exponentiation operator.  All failures throw
// InputError and carry the character position of the offending token.
Rational parse_coefficient_expression(const std::string& src, const ParamMap& params);

}  // namespace cf

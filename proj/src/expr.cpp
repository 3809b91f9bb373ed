#include "centerfocus/expr.hpp"

#include <cctype>

namespace cf {
namespace {

struct Parser {
  const std::string& s;
  const ParamMap& params;
  size_t pos = 0;

  [[noreturn]] void fail(size_t at, const std::string& what) const {
    throw InputError("expression error at position " + std::to_string(at) + ": " + what +
                     " (in '" + s + "')");
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  Rational expr() {
    Rational v = term();
    for (;;) {
      if (eat('+'))
        v += term();
      else if (eat('-'))
        v -= term();
      else
        return v;
    }
  }

  Rational term() {
    Rational v = unary();
    for (;;) {
      skip_ws();
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        size_t at = pos - 1;
        Rational d = unary();
        if (d.is_zero()) fail(at, "division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  Rational unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return primary();
  }

  Rational primary() {
    skip_ws();
    if (pos >= s.size()) fail(pos, "unexpected end of expression");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      Rational v = expr();
      if (!eat(')')) fail(pos, "expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
        ++pos;
      return rational_from_string(s.substr(start, pos - start));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      std::string name = s.substr(start, pos - start);
      auto it = params.find(name);
      if (it == params.end()) fail(start, "unknown parameter '" + name + "'");
      return it->second;
    }
    if (c == '^') fail(pos, "'^' is not supported; write repeated products");
    fail(pos, std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Rational parse_coefficient_expression(const std::string& src, const ParamMap& params) {
  Parser p{src, params};
  Rational v = p.expr();
  p.skip_ws();
  if (p.pos != src.size()) p.fail(p.pos, "trailing input");
  return v;
}

}  // namespace cf

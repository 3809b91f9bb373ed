#include "centerfocus/bipoly.hpp"

#include <cstdio>

namespace cf {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {
std::string coeff_str(const Rational& q) { return to_string(q); }
std::string coeff_str(const GaussianRational& z) { return "(" + to_string(z) + ")"; }
std::string coeff_str(double v) { return format_double(v); }
}  // namespace

template <class K>
std::string poly_to_string(const BiPoly<K>& p, const char* xv, const char* yv) {
  if (p.empty()) return "0";
  std::string out;
  for (auto& [k, v] : p.terms()) {
    if (!out.empty()) out += " + ";
    out += coeff_str(v);
    if (k.first > 0) out += std::string("*") + xv + (k.first > 1 ? "^" + std::to_string(k.first) : "");
    if (k.second > 0) out += std::string("*") + yv + (k.second > 1 ? "^" + std::to_string(k.second) : "");
  }
  return out;
}

template std::string poly_to_string(const BiPoly<Rational>&, const char*, const char*);
template std::string poly_to_string(const BiPoly<GaussianRational>&, const char*, const char*);
template std::string poly_to_string(const BiPoly<double>&, const char*, const char*);

}  // namespace cf

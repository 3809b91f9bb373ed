#include "centerfocus/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace cf {

Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw InputError("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
    if (ns.empty() || ds.empty()) throw InputError("malformed rational literal '" + s + "'");
    Rational n = rational_from_string(ns), d = rational_from_string(ds);
    if (d.is_zero()) throw InputError("zero denominator in '" + s + "'");
    return n / d;
  }
  auto dot = s.find('.');
  try {
    if (dot == std::string::npos) return Rational(BigInt(s));
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (fp.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("malformed numeric literal '" + s + "'");
    bool neg = !ip.empty() && ip[0] == '-';
    BigInt whole = ip.empty() || ip == "-" || ip == "+" ? BigInt(0) : BigInt(ip);
    BigInt scale = 1;
    for (size_t k = 0; k < fp.size(); ++k) scale *= 10;
    BigInt frac = fp.empty() ? BigInt(0) : BigInt(fp);
    BigInt n = abs(whole) * scale + frac;
    if (neg || whole < 0) n = -n;
    return Rational(n, scale);
  } catch (const std::exception& e) {
    throw InputError("malformed numeric literal '" + s + "'");
  }
}

std::string to_string(const Rational& q) {
  if (den(q) == 1) return num(q).str();
  return num(q).str() + "/" + den(q).str();
}

std::string to_string(const GaussianRational& z) {
  if (z.im.is_zero()) return to_string(z.re);
  return to_string(z.re) + (z.im > 0 ? "+" : "") + to_string(z.im) + "i";
}

std::optional<Rational> rationalize(double x, long long max_den, double tol) {
  if (!std::isfinite(x)) return std::nullopt;
  double scale = std::max(1.0, std::abs(x));
  // Continued fraction convergents h_k/k_k of x.
  double v = x;
  BigInt h0 = 0, k0 = 1;  // h_{-2}/k_{-2}
  BigInt h1 = 1, k1 = 0;  // h_{-1}/k_{-1}
  for (int it = 0; it < 64; ++it) {
    double fa = std::floor(v);
    if (fa > 9.0e17 || fa < -9.0e17) break;
    BigInt a(static_cast<long long>(fa));
    BigInt h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    k0 = k1;
    h1 = h2;
    k1 = k2;
    if (k1 > 0 &&
        std::abs(x - h1.convert_to<double>() / k1.convert_to<double>()) <= tol * scale)
      return make_rational(h1, k1);
    double rem = v - fa;
    if (rem < 1e-18) break;
    v = 1.0 / rem;
  }
  return std::nullopt;
}

Rational pow_rational(const Rational& base, int e) {
  if (e < 0) {
    if (base.is_zero()) throw InputError("zero to negative power");
    return 1 / pow_rational(base, -e);
  }
  Rational r = 1, b = base;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

}  // namespace cf

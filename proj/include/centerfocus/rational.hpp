#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <optional>
#include <string>

#include "centerfocus/errors.hpp"

namespace cf {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational arithmetic.  cpp_rational keeps values normalized
// (gcd(num,den) = 1, den > 0, zero stored as 0/1), which is the invariant
// the rest of the library relies on.
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(BigInt n, BigInt d) {
  if (d.is_zero()) throw InputError("rational with zero denominator");
  // Divide instead of using the (num, den) constructor: division normalizes
  // sign and gcd for any inputs.
  return Rational(std::move(n)) / Rational(std::move(d));
}

inline Rational rat(long long n, long long d = 1) { return make_rational(BigInt(n), BigInt(d)); }

inline BigInt num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline bool is_zero(const Rational& q) { return q.is_zero(); }
inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const std::complex<double>& z) { return z == std::complex<double>(0.0); }

// "p/q", "p", or a decimal literal; exact in all cases.
Rational rational_from_string(const std::string& s);

std::string to_string(const Rational& q);

// Nearest small rational via continued fractions.  Returns a value only when
// a convergent with denominator <= max_den lands within tol*max(1,|x|).
std::optional<Rational> rationalize(double x, long long max_den, double tol);

Rational pow_rational(const Rational& base, int e);

// Element of Q(i).  Closed under field operations; exact.
struct GaussianRational {
  Rational re, im;

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussianRational(long long r) : re(rat(r)) {}

  bool operator==(const GaussianRational&) const = default;

  GaussianRational operator-() const { return {-re, -im}; }
  GaussianRational& operator+=(const GaussianRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational n = b.re * b.re + b.im * b.im;
    if (n.is_zero()) throw InputError("division by zero in Q(i)");
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  GaussianRational& operator/=(const GaussianRational& o) { return *this = *this / o; }

  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }
};

inline GaussianRational conj_of(const GaussianRational& z) { return {z.re, -z.im}; }
inline std::complex<double> conj_of(const std::complex<double>& z) { return std::conj(z); }
inline double conj_of(double x) { return x; }
inline Rational conj_of(const Rational& q) { return q; }

inline bool is_zero(const GaussianRational& z) { return z.re.is_zero() && z.im.is_zero(); }

// Magnitude proxy used by tolerance checks in code generic over the
// coefficient field; exact fields report the magnitude of the double image.
inline double abs_value(double x) { return std::abs(x); }
inline double abs_value(const std::complex<double>& z) { return std::abs(z); }
inline double abs_value(const Rational& q) { return std::abs(to_double(q)); }
inline double abs_value(const GaussianRational& z) { return std::abs(z.to_complex()); }

std::string to_string(const GaussianRational& z);

}  // namespace cf

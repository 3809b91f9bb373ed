#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "centerfocus/rational.hpp"

namespace cf {

// Sparse bivariate polynomial with exponent pairs (i,j) for x^i y^j.
// Zero coefficients are never stored.  K is any field the library uses
// (Rational, GaussianRational, double, complex<double>).
template <class K>
class BiPoly {
 public:
  using Key = std::pair<int, int>;
  using Map = std::map<Key, K>;

  BiPoly() = default;

  static BiPoly term(int i, int j, K c) {
    BiPoly p;
    p.add_term(i, j, std::move(c));
    return p;
  }

  void add_term(int i, int j, K c) {
    if (is_zero(c)) return;
    auto [it, fresh] = c_.try_emplace({i, j}, c);
    if (!fresh) {
      it->second += c;
      if (is_zero(it->second)) c_.erase(it);
    }
  }

  const Map& terms() const { return c_; }
  bool empty() const { return c_.empty(); }
  size_t size() const { return c_.size(); }

  K coeff(int i, int j) const {
    auto it = c_.find({i, j});
    return it == c_.end() ? K(0) : it->second;
  }

  BiPoly operator-() const {
    BiPoly r;
    for (auto& [k, v] : c_) r.c_.emplace(k, -v);
    return r;
  }
  BiPoly& operator+=(const BiPoly& o) {
    for (auto& [k, v] : o.c_) add_term(k.first, k.second, v);
    return *this;
  }
  BiPoly& operator-=(const BiPoly& o) {
    for (auto& [k, v] : o.c_) add_term(k.first, k.second, -v);
    return *this;
  }
  friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
  friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }

  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    BiPoly r;
    for (auto& [ka, va] : a.c_)
      for (auto& [kb, vb] : b.c_)
        r.add_term(ka.first + kb.first, ka.second + kb.second, va * vb);
    return r;
  }
  BiPoly& operator*=(const BiPoly& o) { return *this = *this * o; }

  BiPoly scaled(const K& s) const {
    BiPoly r;
    if (is_zero(s)) return r;
    for (auto& [k, v] : c_) {
      K sv = v * s;
      if (!is_zero(sv)) r.c_.emplace(k, sv);
    }
    return r;
  }

  BiPoly dx() const {
    BiPoly r;
    for (auto& [k, v] : c_)
      if (k.first > 0) r.add_term(k.first - 1, k.second, v * K(k.first));
    return r;
  }
  BiPoly dy() const {
    BiPoly r;
    for (auto& [k, v] : c_)
      if (k.second > 0) r.add_term(k.first, k.second - 1, v * K(k.second));
    return r;
  }

  // Horner-free evaluation; V is the value field, conv lifts K into V.
  template <class V, class Conv>
  V eval(const V& x, const V& y, Conv conv) const {
    V acc(0);
    for (auto& [k, v] : c_) {
      V m = conv(v);
      for (int a = 0; a < k.first; ++a) m *= x;
      for (int b = 0; b < k.second; ++b) m *= y;
      acc += m;
    }
    return acc;
  }

  int max_total_degree() const {
    int d = 0;
    for (auto& [k, v] : c_) d = std::max(d, k.first + k.second);
    return d;
  }

  bool operator==(const BiPoly&) const = default;

 private:
  Map c_;
};

using BiPolyQ = BiPoly<Rational>;
using BiPolyD = BiPoly<double>;

inline double eval_double(const BiPolyQ& p, double x, double y) {
  return p.eval(x, y, [](const Rational& q) { return to_double(q); });
}
inline double eval_double(const BiPolyD& p, double x, double y) {
  return p.eval(x, y, [](double c) { return c; });
}

inline BiPolyD to_double_poly(const BiPolyQ& p) {
  BiPolyD r;
  for (auto& [k, v] : p.terms()) r.add_term(k.first, k.second, to_double(v));
  return r;
}

template <class K>
std::string poly_to_string(const BiPoly<K>& p, const char* xv = "x", const char* yv = "y");

std::string format_double(double v);

}  // namespace cf

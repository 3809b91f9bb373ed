#pragma once

#include <numeric>
#include <vector>

#include "centerfocus/errors.hpp"
#include "centerfocus/rational.hpp"

namespace cf {

// Truncated power series in t = x^{1/base_den}.  Coefficients with exponent
// 0..order are meaningful; everything above `order` is unknown, not zero.
// Every operation computes the largest order the result is entitled to.
template <class K>
struct Series {
  int base_den = 1;
  int order = -1;          // -1: no trustworthy coefficients at all
  std::vector<K> c;        // size order+1 once order >= 0

  static Series zero(int ord, int den = 1) {
    Series s;
    s.base_den = den;
    s.order = ord;
    s.c.assign(static_cast<size_t>(ord + 1), K(0));
    return s;
  }

  static Series monomial(int exp, K v, int ord, int den = 1) {
    Series s = zero(ord, den);
    if (exp <= ord) s.c[static_cast<size_t>(exp)] = std::move(v);
    return s;
  }

  K coeff(int k) const {
    CF_CHECK(k >= 0 && k <= order, "series coefficient beyond truncation order");
    return c[static_cast<size_t>(k)];
  }

  // Exponent of the first structurally nonzero coefficient; order+1 when all
  // stored coefficients vanish (the true valuation is at least that).
  int valuation() const {
    for (int k = 0; k <= order; ++k)
      if (!is_zero(c[static_cast<size_t>(k)])) return k;
    return order + 1;
  }

  Series truncated(int new_order) const {
    Series s = *this;
    if (new_order < s.order) {
      s.order = new_order;
      s.c.resize(static_cast<size_t>(std::max(new_order + 1, 0)));
    }
    return s;
  }
};

template <class K>
Series<K> series_align(const Series<K>& a, int den) {
  CF_CHECK(den % a.base_den == 0, "series base denominator not refinable");
  int f = den / a.base_den;
  if (f == 1) return a;
  Series<K> r;
  r.base_den = den;
  r.order = a.order * f + (f - 1);
  r.c.assign(static_cast<size_t>(r.order + 1), K(0));
  for (int k = 0; k <= a.order; ++k) r.c[static_cast<size_t>(k * f)] = a.c[static_cast<size_t>(k)];
  return r;
}

template <class K>
Series<K> operator+(const Series<K>& a0, const Series<K>& b0) {
  int den = std::lcm(a0.base_den, b0.base_den);
  Series<K> a = series_align(a0, den), b = series_align(b0, den);
  Series<K> r = Series<K>::zero(std::min(a.order, b.order), den);
  for (int k = 0; k <= r.order; ++k)
    r.c[static_cast<size_t>(k)] = a.c[static_cast<size_t>(k)] + b.c[static_cast<size_t>(k)];
  return r;
}

template <class K>
Series<K> operator-(const Series<K>& a0, const Series<K>& b0) {
  int den = std::lcm(a0.base_den, b0.base_den);
  Series<K> a = series_align(a0, den), b = series_align(b0, den);
  Series<K> r = Series<K>::zero(std::min(a.order, b.order), den);
  for (int k = 0; k <= r.order; ++k)
    r.c[static_cast<size_t>(k)] = a.c[static_cast<size_t>(k)] - b.c[static_cast<size_t>(k)];
  return r;
}

// Truncated product.  Unknown tails enter at a.order + val(b) + 1 and
// b.order + val(a) + 1, so the result is exact below the smaller of the two.
template <class K>
Series<K> operator*(const Series<K>& a0, const Series<K>& b0) {
  int den = std::lcm(a0.base_den, b0.base_den);
  Series<K> a = series_align(a0, den), b = series_align(b0, den);
  int ord = std::min(a.order + b.valuation(), b.order + a.valuation());
  Series<K> r = Series<K>::zero(ord, den);
  for (int i = 0; i <= a.order; ++i) {
    if (is_zero(a.c[static_cast<size_t>(i)])) continue;
    for (int j = 0; j <= b.order && i + j <= ord; ++j) {
      if (is_zero(b.c[static_cast<size_t>(j)])) continue;
      r.c[static_cast<size_t>(i + j)] += a.c[static_cast<size_t>(i)] * b.c[static_cast<size_t>(j)];
    }
  }
  return r;
}

template <class K>
Series<K> series_scale(Series<K> a, const K& s) {
  for (auto& v : a.c) v *= s;
  return a;
}

// Quotient a/b with val(a) >= val(b); coefficient k of the quotient needs
// a and b through exponent k + val(b), hence the order bound.
template <class K>
Series<K> series_div(const Series<K>& a0, const Series<K>& b0) {
  int den = std::lcm(a0.base_den, b0.base_den);
  Series<K> a = series_align(a0, den), b = series_align(b0, den);
  int vb = b.valuation();
  CF_CHECK(vb <= b.order, "series division by zero series");
  if (a.valuation() < vb)
    throw NumericError("series division would produce negative valuation");
  int ord = std::min(a.order, b.order) - vb;
  Series<K> q = Series<K>::zero(ord, den);
  const K& lead = b.c[static_cast<size_t>(vb)];
  for (int k = 0; k <= ord; ++k) {
    K acc = a.c[static_cast<size_t>(k + vb)];
    for (int l = 0; l < k; ++l) {
      int bi = k - l + vb;
      if (bi <= b.order) acc -= q.c[static_cast<size_t>(l)] * b.c[static_cast<size_t>(bi)];
    }
    q.c[static_cast<size_t>(k)] = acc / lead;
  }
  return q;
}

template <class K>
Series<K> series_derivative(const Series<K>& a) {
  Series<K> r = Series<K>::zero(std::max(a.order - 1, -1), a.base_den);
  for (int k = 1; k <= a.order; ++k)
    r.c[static_cast<size_t>(k - 1)] = a.c[static_cast<size_t>(k)] * K(k);
  return r;
}

// Composition a(b(t)); requires val(b) >= 1.  The k-th unknown coefficient of
// a enters at exponent k*val(b), and each power of b is only known through
// b.order, giving the stated order bound.
template <class K>
Series<K> series_compose(const Series<K>& a, const Series<K>& b) {
  CF_CHECK(a.base_den == 1, "composition outer series must be integer-exponent");
  int vb = b.valuation();
  if (vb < 1) throw NumericError("series composition needs positive valuation");
  int ord = std::min(b.order, (a.order + 1) * vb - 1);
  Series<K> r = Series<K>::zero(ord, b.base_den);
  Series<K> bp = Series<K>::monomial(0, K(1), ord, b.base_den);  // b^k
  for (int k = 0; k <= a.order; ++k) {
    if (!is_zero(a.c[static_cast<size_t>(k)])) {
      Series<K> term = series_scale(bp, a.c[static_cast<size_t>(k)]);
      for (int m = 0; m <= std::min(ord, term.order); ++m)
        r.c[static_cast<size_t>(m)] += term.c[static_cast<size_t>(m)];
    }
    if (k < a.order) bp = (bp * b).truncated(ord);
  }
  return r;
}

template <class K>
Series<K> series_pow(const Series<K>& a, int e, int ord) {
  Series<K> r = Series<K>::monomial(0, K(1), ord, a.base_den);
  for (int k = 0; k < e; ++k) r = (r * a).truncated(ord);
  return r;
}

}  // namespace cf

#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "centerfocus/errors.hpp"
#include "centerfocus/rational.hpp"

namespace cf {

// Dense univariate polynomial, coefficient of degree k at index k.
// Trailing zeros are tolerated on input; functions trim internally.
template <class K>
using UniPoly = std::vector<K>;

template <class K>
void uni_trim(UniPoly<K>& p) {
  while (!p.empty() && is_zero(p.back())) p.pop_back();
}

template <class K>
int uni_degree(const UniPoly<K>& p) {
  for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k)
    if (!is_zero(p[static_cast<size_t>(k)])) return k;
  return -1;
}

template <class K>
UniPoly<K> uni_derivative(const UniPoly<K>& p) {
  UniPoly<K> d;
  for (size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * K(static_cast<long long>(k)));
  uni_trim(d);
  return d;
}

template <class K>
UniPoly<K> uni_mul(const UniPoly<K>& a, const UniPoly<K>& b) {
  int da = uni_degree(a), db = uni_degree(b);
  if (da < 0 || db < 0) return {};
  UniPoly<K> r(static_cast<size_t>(da + db + 1), K(0));
  for (int i = 0; i <= da; ++i)
    for (int j = 0; j <= db; ++j) r[static_cast<size_t>(i + j)] += a[i] * b[j];
  uni_trim(r);
  return r;
}

template <class K>
UniPoly<K> uni_add(UniPoly<K> a, const UniPoly<K>& b) {
  if (a.size() < b.size()) a.resize(b.size(), K(0));
  for (size_t k = 0; k < b.size(); ++k) a[k] += b[k];
  uni_trim(a);
  return a;
}

template <class K>
UniPoly<K> uni_scale(UniPoly<K> a, const K& s) {
  for (auto& c : a) c *= s;
  uni_trim(a);
  return a;
}

// Euclidean division over a field: a = q*b + r, deg r < deg b.
template <class K>
std::pair<UniPoly<K>, UniPoly<K>> uni_divrem(UniPoly<K> a, const UniPoly<K>& b) {
  int db = uni_degree(b);
  CF_CHECK(db >= 0, "univariate division by zero polynomial");
  int da = uni_degree(a);
  if (da < db) {
    uni_trim(a);
    return {{}, std::move(a)};
  }
  UniPoly<K> q(static_cast<size_t>(da - db + 1), K(0));
  const K& lead = b[static_cast<size_t>(db)];
  for (int k = da; k >= db; --k) {
    K c = a[static_cast<size_t>(k)];
    if (is_zero(c)) continue;
    K f = c / lead;
    q[static_cast<size_t>(k - db)] = f;
    for (int j = 0; j <= db; ++j) a[static_cast<size_t>(k - db + j)] -= f * b[static_cast<size_t>(j)];
  }
  uni_trim(a);
  uni_trim(q);
  return {std::move(q), std::move(a)};
}

template <class K>
UniPoly<K> uni_monic(UniPoly<K> p) {
  int d = uni_degree(p);
  if (d < 0) return p;
  K lead = p[static_cast<size_t>(d)];
  for (auto& c : p) c /= lead;
  uni_trim(p);
  return p;
}

// Monic gcd via Euclid; exact over exact fields.
template <class K>
UniPoly<K> uni_gcd(UniPoly<K> a, UniPoly<K> b) {
  uni_trim(a);
  uni_trim(b);
  while (uni_degree(b) >= 0) {
    auto [q, r] = uni_divrem(a, b);
    a = std::move(b);
    b = uni_monic(std::move(r));
  }
  return uni_monic(std::move(a));
}

// Yun square-free decomposition: p ~ prod factors[m-1]^m (up to a constant).
// Requires characteristic zero, which all our fields satisfy.
template <class K>
std::vector<UniPoly<K>> uni_squarefree(UniPoly<K> p) {
  std::vector<UniPoly<K>> out;
  p = uni_monic(std::move(p));
  if (uni_degree(p) <= 0) return out;
  UniPoly<K> dp = uni_derivative(p);
  UniPoly<K> u = uni_gcd(p, dp);
  UniPoly<K> v = uni_divrem(p, u).first;
  UniPoly<K> w = uni_divrem(dp, u).first;
  while (uni_degree(v) > 0) {
    UniPoly<K> z = uni_add(w, uni_scale(uni_derivative(v), K(-1)));
    UniPoly<K> h = uni_gcd(v, z);
    out.push_back(h);
    v = uni_divrem(v, h).first;
    w = uni_divrem(z, h).first;
  }
  return out;
}

template <class K, class V, class Conv>
V uni_eval(const UniPoly<K>& p, const V& x, Conv conv) {
  V acc(0);
  for (int k = uni_degree(p); k >= 0; --k) acc = acc * x + conv(p[static_cast<size_t>(k)]);
  return acc;
}

inline std::complex<double> uni_eval_c(const UniPoly<GaussianRational>& p,
                                       std::complex<double> z) {
  return uni_eval(p, z, [](const GaussianRational& c) { return c.to_complex(); });
}
inline std::complex<double> uni_eval_c(const UniPoly<Rational>& p, std::complex<double> z) {
  return uni_eval(p, z, [](const Rational& c) { return std::complex<double>(to_double(c)); });
}
inline std::complex<double> uni_eval_c(const UniPoly<std::complex<double>>& p,
                                       std::complex<double> z) {
  return uni_eval(p, z, [](const std::complex<double>& c) { return c; });
}

inline UniPoly<std::complex<double>> uni_to_complex(const UniPoly<GaussianRational>& p) {
  UniPoly<std::complex<double>> r;
  r.reserve(p.size());
  for (auto& c : p) r.push_back(c.to_complex());
  return r;
}
inline UniPoly<std::complex<double>> uni_to_complex(const UniPoly<Rational>& p) {
  UniPoly<std::complex<double>> r;
  r.reserve(p.size());
  for (auto& c : p) r.push_back(std::complex<double>(to_double(c)));
  return r;
}

// All complex roots of p via the balanced companion matrix, polished with a
// few Newton steps on p itself.  Degree 0 (or the zero polynomial) gives {}.
std::vector<std::complex<double>> uni_roots(const UniPoly<std::complex<double>>& p);

}  // namespace cf

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

namespace cf {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evals = 0;
  bool converged = false;
};

namespace detail {

// Gauss 7 / Kronrod 15 pair on [-1, 1].
inline constexpr double kKronrodNode[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeight[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussWeight[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod(const F& f, double a, double b) {
  double h = 0.5 * (b - a);
  double c = 0.5 * (a + b);
  double fc = f(c);
  double gk = kKronrodWeight[7] * fc;
  double gg = kGaussWeight[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double v = f(c - h * kKronrodNode[i]) + f(c + h * kKronrodNode[i]);
    gk += kKronrodWeight[i] * v;
    if (i % 2 == 1) gg += kGaussWeight[i / 2] * v;
  }
  double diff = std::abs(gk - gg) * std::abs(h);
  // QUADPACK-style sharpened error estimate
  double err = diff > 0.0 ? std::pow(200.0 * diff, 1.5) : 0.0;
  if (err > diff) err = diff;
  return {a, b, gk * h, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod quadrature; worst panel is bisected until
// the summed error estimate meets the tolerances or the panel budget runs out.
inline QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                     double abs_tol = 1e-12, double rel_tol = 1e-12,
                                     int max_panels = 4000) {
  QuadResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::priority_queue<detail::Panel> heap;
  detail::Panel p0 = detail::gauss_kronrod(f, a, b);
  res.evals = 15;
  double total = p0.value, toterr = p0.error;
  heap.push(p0);
  int panels = 1;
  while (panels < max_panels) {
    if (toterr <= abs_tol || toterr <= rel_tol * std::abs(total)) break;
    detail::Panel worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) break;  // interval exhausted in double precision
    detail::Panel l = detail::gauss_kronrod(f, worst.a, mid);
    detail::Panel r = detail::gauss_kronrod(f, mid, worst.b);
    res.evals += 30;
    total += l.value + r.value - worst.value;
    toterr += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  res.value = total;
  res.error = toterr;
  res.converged = toterr <= std::max(abs_tol, rel_tol * std::abs(total));
  return res;
}

}  // namespace cf

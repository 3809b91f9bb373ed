#include "centerfocus/fourier.hpp"

#include <algorithm>
#include <cmath>

#include "centerfocus/unipoly.hpp"

namespace cf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

FourierPoly FourierPoly::cosine() {
  FourierPoly f;
  f.add_term(1, GaussianRational(rat(1, 2)));
  f.add_term(-1, GaussianRational(rat(1, 2)));
  return f;
}

FourierPoly FourierPoly::sine() {
  FourierPoly f;
  f.add_term(1, GaussianRational(rat(0), rat(-1, 2)));
  f.add_term(-1, GaussianRational(rat(0), rat(1, 2)));
  return f;
}

int FourierPoly::degree() const {
  int d = -1;
  for (auto& [k, v] : c_) d = std::max(d, std::abs(k));
  return d;
}

bool FourierPoly::is_real() const {
  for (auto& [k, v] : c_)
    if (!(coeff(-k) == conj_of(v))) return false;
  return true;
}

FourierPoly FourierPoly::operator-() const {
  FourierPoly r;
  for (auto& [k, v] : c_) r.c_.emplace(k, -v);
  return r;
}

FourierPoly operator+(const FourierPoly& a, const FourierPoly& b) {
  FourierPoly r = a;
  for (auto& [k, v] : b.c_) r.add_term(k, v);
  return r;
}

FourierPoly operator-(const FourierPoly& a, const FourierPoly& b) {
  FourierPoly r = a;
  for (auto& [k, v] : b.c_) r.add_term(k, -v);
  return r;
}

FourierPoly operator*(const FourierPoly& a, const FourierPoly& b) {
  FourierPoly r;
  for (auto& [ka, va] : a.c_)
    for (auto& [kb, vb] : b.c_) r.add_term(ka + kb, va * vb);
  return r;
}

FourierPoly FourierPoly::scaled(const GaussianRational& s) const {
  FourierPoly r;
  if (is_zero(s)) return r;
  for (auto& [k, v] : c_) r.add_term(k, v * s);
  return r;
}

FourierPoly FourierPoly::derivative() const {
  FourierPoly r;
  GaussianRational i_unit(rat(0), rat(1));
  for (auto& [k, v] : c_)
    if (k != 0) r.add_term(k, v * i_unit * GaussianRational(rat(k)));
  return r;
}

FourierPoly FourierPoly::shifted_by_pi() const {
  FourierPoly r;
  for (auto& [k, v] : c_) r.add_term(k, (k % 2 == 0) ? v : -v);
  return r;
}

std::complex<double> FourierPoly::eval_complex(double phi) const {
  std::complex<double> acc(0.0);
  for (auto& [k, v] : c_)
    acc += v.to_complex() * std::polar(1.0, k * phi);
  return acc;
}

double FourierPoly::eval(double phi) const { return eval_complex(phi).real(); }

FourierPoly trig_substitute(const BiPolyQ& f) {
  FourierPoly cosph = FourierPoly::cosine(), sinph = FourierPoly::sine();
  FourierPoly out;
  // Cache powers; supports are small.
  std::vector<FourierPoly> cpow{FourierPoly::constant(rat(1))}, spow = cpow;
  auto power = [](std::vector<FourierPoly>& cache, const FourierPoly& base, int e) {
    while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * base);
    return cache[static_cast<size_t>(e)];
  };
  for (auto& [k, v] : f.terms()) {
    FourierPoly term = power(cpow, cosph, k.first) * power(spow, sinph, k.second);
    out = out + term.scaled(GaussianRational(v));
  }
  return out;
}

FourierEval::FourierEval(const FourierPoly& f) {
  CF_CHECK(f.is_real(), "FourierEval needs a real trig polynomial");
  int n = std::max(f.degree(), 0);
  a.assign(static_cast<size_t>(n + 1), 0.0);
  b.assign(static_cast<size_t>(n + 1), 0.0);
  a[0] = to_double(f.coeff(0).re);
  for (int k = 1; k <= n; ++k) {
    auto c = f.coeff(k).to_complex();
    a[static_cast<size_t>(k)] = 2.0 * c.real();
    b[static_cast<size_t>(k)] = -2.0 * c.imag();
  }
}

double FourierEval::operator()(double phi) const {
  double acc = a.empty() ? 0.0 : a[0];
  double ck = std::cos(phi), sk = std::sin(phi);
  double c = 1.0, s = 0.0;  // cos/sin of k*phi, updated by rotation
  for (size_t k = 1; k < a.size(); ++k) {
    double cn = c * ck - s * sk;
    double sn = s * ck + c * sk;
    c = cn;
    s = sn;
    acc += a[k] * c + b[k] * s;
  }
  return acc;
}

namespace {

// Laurent-cleared z-polynomial of f(phi) = sum c_k z^k, z = e^{i phi}.
UniPoly<GaussianRational> to_z_poly(const FourierPoly& f) {
  int kmin = f.terms().begin()->first;
  int kmax = f.terms().rbegin()->first;
  UniPoly<GaussianRational> p(static_cast<size_t>(kmax - kmin + 1), GaussianRational());
  for (auto& [k, v] : f.terms()) p[static_cast<size_t>(k - kmin)] = v;
  return p;
}

double wrap_angle(double phi) {
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0) phi += kTwoPi;
  if (phi >= kTwoPi) phi -= kTwoPi;  // guard against fmod rounding at 2 pi
  return phi;
}

}  // namespace

std::vector<CircleRoot> circle_roots(const FourierPoly& f, double tol) {
  if (f.is_zero_poly()) throw InputError("circle_roots: polynomial vanishes identically");
  CF_CHECK(f.is_real(), "circle_roots needs a real trig polynomial");

  UniPoly<GaussianRational> p = to_z_poly(f);
  // Drop the power of z dividing p; those roots sit at the origin.
  size_t val = 0;
  while (val < p.size() && is_zero(p[val])) ++val;
  p.erase(p.begin(), p.begin() + static_cast<long>(val));
  uni_trim(p);

  std::vector<CircleRoot> out;
  if (uni_degree(p) <= 0) return out;

  std::vector<UniPoly<GaussianRational>> factors = uni_squarefree(p);
  for (size_t m = 0; m < factors.size(); ++m) {
    if (uni_degree(factors[m]) <= 0) continue;
    auto roots = uni_roots(uni_to_complex(factors[m]));
    for (auto z : roots) {
      if (std::abs(std::abs(z) - 1.0) > tol) continue;
      out.push_back({wrap_angle(std::arg(z)), static_cast<int>(m + 1)});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CircleRoot& a, const CircleRoot& b) { return a.angle < b.angle; });

  // Polish odd-multiplicity roots: f changes sign there, so bisect on f.
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i].multiplicity % 2 == 0) continue;
    double gap = kTwoPi;
    if (out.size() > 1) {
      double prev = out[(i + out.size() - 1) % out.size()].angle;
      double next = out[(i + 1) % out.size()].angle;
      gap = std::min(wrap_angle(out[i].angle - prev), wrap_angle(next - out[i].angle));
      if (gap <= 0) gap = kTwoPi;
    }
    double h = std::min(0.45 * gap, 1e-4);
    double lo = out[i].angle - h, hi = out[i].angle + h;
    double flo = f.eval(lo), fhi = f.eval(hi);
    if (flo == 0.0 || fhi == 0.0 || (flo < 0) == (fhi < 0)) continue;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = f.eval(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0) == (flo < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    out[i].angle = wrap_angle(0.5 * (lo + hi));
  }
  std::sort(out.begin(), out.end(),
            [](const CircleRoot& a, const CircleRoot& b) { return a.angle < b.angle; });
  return out;
}

CircleSign circle_sign(const FourierPoly& f, double tol) {
  CircleSign cs;
  if (f.is_zero_poly()) {
    cs.kind = CircleSignKind::identically_zero;
    return cs;
  }
  cs.roots = circle_roots(f, tol);
  cs.strict = cs.roots.empty();
  bool has_odd = false;
  for (auto& r : cs.roots) has_odd = has_odd || (r.multiplicity % 2 == 1);
  // Sample midpoints between consecutive zeros (or anywhere if none).
  std::vector<double> samples;
  if (cs.roots.empty()) {
    samples.push_back(0.7);
  } else {
    for (size_t i = 0; i < cs.roots.size(); ++i) {
      double a = cs.roots[i].angle;
      double b = (i + 1 < cs.roots.size()) ? cs.roots[i + 1].angle : cs.roots[0].angle + kTwoPi;
      if (b - a > 1e-12) samples.push_back(0.5 * (a + b));
    }
    if (samples.empty()) samples.push_back(cs.roots[0].angle + 3.1);
  }
  bool pos = false, neg = false;
  for (double phi : samples) {
    double v = f.eval(phi);
    if (v > 0) pos = true;
    if (v < 0) neg = true;
  }
  if (has_odd || (pos && neg))
    cs.kind = CircleSignKind::mixed;
  else if (pos)
    cs.kind = CircleSignKind::positive;
  else if (neg)
    cs.kind = CircleSignKind::negative;
  else
    cs.kind = CircleSignKind::identically_zero;  // unreachable for nonzero f
  return cs;
}

}  // namespace cf

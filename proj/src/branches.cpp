#include "centerfocus/branches.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <type_traits>

#include "centerfocus/errors.hpp"
#include "centerfocus/fourier.hpp"
#include "centerfocus/series.hpp"

namespace cf {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

template <class K>
K from_rat(const Rational& c) {
  if constexpr (std::is_same_v<K, GaussianRational>)
    return GaussianRational(c);
  else if constexpr (std::is_same_v<K, std::complex<double>>)
    return std::complex<double>(to_double(c), 0.0);
  else
    return K(c);
}

// Collapse a quasihomogeneous component at x = 1.  Within one weighted degree
// the y-exponent determines the x-exponent, so no terms merge.
UniPoly<Rational> eta_collapse_q(const BiPolyQ* f) {
  UniPoly<Rational> out;
  if (!f) return out;
  for (auto& [k, v] : f->terms()) {
    size_t b = static_cast<size_t>(k.second);
    if (out.size() <= b) out.resize(b + 1, Rational(0));
    out[b] += v;
  }
  uni_trim(out);
  return out;
}

template <class K>
UniPoly<K> eta_collapse(const BiPoly<K>& f) {
  UniPoly<K> out;
  for (auto& [k, v] : f.terms()) {
    size_t b = static_cast<size_t>(k.second);
    if (out.size() <= b) out.resize(b + 1, K(0));
    out[b] += v;
  }
  uni_trim(out);
  return out;
}

template <class K>
BiPoly<K> convert_poly(const BiPolyQ& f) {
  BiPoly<K> r;
  for (auto& [k, v] : f.terms()) r.add_term(k.first, k.second, from_rat<K>(v));
  return r;
}

GaussianRational eval_gauss(const UniPoly<Rational>& p, const GaussianRational& z) {
  return uni_eval(p, z, [](const Rational& c) { return GaussianRational(c); });
}

DeterminingPolynomial strip_valuation(DeterminingPolynomial det) {
  if (uni_degree(det.coeffs) < 0) {
    det.degenerate = true;
    return det;
  }
  size_t v = 0;
  while (is_zero(det.coeffs[v])) ++v;
  det.valuation = static_cast<int>(v);
  det.nonzero_part.assign(det.coeffs.begin() + static_cast<long>(v), det.coeffs.end());
  return det;
}

double max_abs_coeff(const BiPolyD& f) {
  double m = 0.0;
  for (auto& [k, v] : f.terms()) m = std::max(m, std::abs(v));
  return m;
}

template <class K>
double max_abs_series(const Series<K>& s) {
  double m = 0.0;
  for (auto& v : s.c) m = std::max(m, abs_value(v));
  return m;
}

// t^e * s, meaningful through min(cap, s.order + e).
template <class K>
Series<K> series_shift(const Series<K>& s, int e, int cap) {
  Series<K> r = Series<K>::zero(std::min(cap, s.order + e), s.base_den);
  for (int k = 0; k <= s.order && k + e <= r.order; ++k)
    r.c[static_cast<size_t>(k + e)] = s.c[static_cast<size_t>(k)];
  return r;
}

// E(t) = P(t^p, y(t)) y'(t) - p t^{p-1} Q(t^p, y(t)), the obstruction to
// y(t) parametrizing an orbit of the field on the chart x = t^p.
template <class K>
Series<K> invariance_residual(const BiPoly<K>& P, const BiPoly<K>& Q, int p, const Series<K>& y,
                              int N, double* scale_out = nullptr) {
  int maxb = 0;
  for (auto& [k, v] : P.terms()) maxb = std::max(maxb, k.second);
  for (auto& [k, v] : Q.terms()) maxb = std::max(maxb, k.second);
  std::vector<Series<K>> yp;
  yp.push_back(Series<K>::monomial(0, K(1), N));
  for (int b = 1; b <= maxb; ++b) yp.push_back((yp.back() * y).truncated(N));

  auto compose = [&](const BiPoly<K>& f) {
    Series<K> acc = Series<K>::zero(N);
    for (auto& [k, v] : f.terms())
      acc = acc + series_scale(series_shift(yp[static_cast<size_t>(k.second)], p * k.first, N), v);
    return acc;
  };

  Series<K> CP = compose(P);
  Series<K> CQ = compose(Q);
  Series<K> dy = series_derivative(y);
  if (scale_out) {
    *scale_out = std::max(
        {1.0, max_abs_series(CP) * max_abs_series(dy), p * max_abs_series(CQ)});
  }
  return CP * dy - series_shift(series_scale(CQ, K(p)), p - 1, N);
}

template <class K>
bool coeff_negligible(const K& v, double scale) {
  if constexpr (std::is_same_v<K, GaussianRational>) {
    (void)scale;
    return is_zero(v);
  } else {
    return abs_value(v) <= scale;
  }
}

template <class K>
Branch extend_engine(const VectorField& X, const QHDecomposition& d, const K& alpha0, int M) {
  constexpr bool exact = std::is_same_v<K, GaussianRational>;
  const int p = d.w.p, q = d.w.q, r = d.r;
  CF_CHECK(M >= 0, "branch order must be nonnegative");
  if (is_zero(alpha0)) throw InputError("branch leading coefficient must be nonzero");

  DeterminingPolynomial det = q_polynomial(d);
  if (!det.degenerate) {
    if constexpr (exact) {
      if (!is_zero(eval_gauss(det.coeffs, alpha0)))
        throw InputError("alpha0 is not a root of the determining polynomial");
    } else {
      double az = std::abs(alpha0);
      double scale = 0.0, pw = 1.0;
      for (auto& c : det.coeffs) {
        scale += std::abs(to_double(c)) * pw;
        pw *= std::max(1.0, az);
      }
      if (std::abs(uni_eval_c(det.coeffs, alpha0)) > 1e-8 * std::max(1.0, scale))
        throw InputError("alpha0 is not a root of the determining polynomial");
    }
  }

  UniPoly<Rational> Pe = eta_collapse_q(d.P_at(r));
  UniPoly<Rational> Qe = eta_collapse_q(d.Q_at(r));
  K Pv = uni_eval(Pe, alpha0, from_rat<K>);
  K dPv = uni_eval(uni_derivative(Pe), alpha0, from_rat<K>);
  K dQv = uni_eval(uni_derivative(Qe), alpha0, from_rat<K>);
  // Linear coefficient of the order-m step: B_m = m Pv + Bc.
  K Bc = K(q) * Pv + K(q) * alpha0 * dPv - K(p) * dQv;

  const int N = p + q + r + M + 1;
  BiPoly<K> PK = convert_poly<K>(X.P);
  BiPoly<K> QK = convert_poly<K>(X.Q);

  Series<K> y = Series<K>::zero(N);
  y.c[static_cast<size_t>(q)] = alpha0;
  std::vector<K> alf(static_cast<size_t>(M) + 1, K(0));
  alf[0] = alpha0;

  double bscale = 1e-10 * (1.0 + M * abs_value(Pv) + abs_value(Bc));
  for (int m = 1; m <= M; ++m) {
    Series<K> E = invariance_residual(PK, QK, p, y, N);
    int nu = p + q + r - 1 + m;
    CF_CHECK(E.order >= nu, "residual series lost the order needed for this step");
    K A = E.coeff(nu);
    K B = K(m) * Pv + Bc;
    if (coeff_negligible(B, bscale)) {
      double escale = 1e-9 * std::max(1.0, max_abs_series(E));
      if (coeff_negligible(A, escale)) continue;  // free coefficient, take 0
      std::ostringstream os;
      os << "branch extension obstructed at order " << m
         << ": the step's linear coefficient vanishes (resonant index)";
      throw NumericError(os.str());
    }
    alf[static_cast<size_t>(m)] = -(A / B);
    y.c[static_cast<size_t>(q + m)] = alf[static_cast<size_t>(m)];
  }

  if constexpr (exact) {
    Series<K> E = invariance_residual(PK, QK, p, y, N);
    for (int k = 0; k <= p + q + r - 1 + M; ++k)
      CF_CHECK(is_zero(E.coeff(k)), "exact branch extension left a nonzero residual");
  }

  Branch b;
  b.w = d.w;
  b.r = r;
  b.n = p;
  b.M = M;
  b.exact = exact;
  b.alpha.reserve(alf.size());
  for (auto& a : alf) {
    if constexpr (exact)
      b.alpha.push_back(a.to_complex());
    else
      b.alpha.push_back(a);
  }
  if constexpr (exact) b.alpha_exact = std::move(alf);
  return b;
}

}  // namespace

DeterminingPolynomial q_polynomial(const QHDecomposition& d) {
  DeterminingPolynomial det;
  det.w = d.w;
  det.order = d.r;
  det.provenance = DetProvenance::from_field;
  UniPoly<Rational> Pe = eta_collapse_q(d.P_at(d.r));
  UniPoly<Rational> Qe = eta_collapse_q(d.Q_at(d.r));
  UniPoly<Rational> etaP;
  if (uni_degree(Pe) >= 0) {
    etaP.assign(Pe.size() + 1, Rational(0));
    for (size_t k = 0; k < Pe.size(); ++k) etaP[k + 1] = Pe[k];
  }
  det.coeffs =
      uni_add(uni_scale(std::move(etaP), rat(d.w.q, d.w.p)), uni_scale(Qe, rat(-1)));
  return strip_valuation(std::move(det));
}

DeterminingPolynomial p_polynomial_from_curve(const BiPolyQ& F, Weight w) {
  if (F.empty()) throw InputError("cannot take the leading form of the zero polynomial");
  int s = std::numeric_limits<int>::max();
  for (auto& [k, v] : F.terms()) s = std::min(s, w.p * k.first + w.q * k.second);
  BiPolyQ Fs;
  for (auto& [k, v] : F.terms())
    if (w.p * k.first + w.q * k.second == s) Fs.add_term(k.first, k.second, v);
  if (Fs.terms().size() < 2)
    throw InputError("weights do not select an edge of the curve's polygon: "
                     "the leading form is a single monomial");
  DeterminingPolynomial det;
  det.w = w;
  det.order = s;
  det.provenance = DetProvenance::from_curve;
  det.coeffs = eta_collapse_q(&Fs);
  return strip_valuation(std::move(det));
}

const char* fuchs_verdict_name(FuchsVerdict v) {
  switch (v) {
    case FuchsVerdict::n_equals_p:
      return "n_equals_p";
    case FuchsVerdict::general_theory_needed:
      return "general_theory_needed";
    case FuchsVerdict::degenerate:
      return "degenerate";
  }
  return "?";
}

FuchsIndex fuchs_index(const QHDecomposition& d, std::complex<double> alpha0) {
  FuchsIndex fi;
  UniPoly<Rational> Pe = eta_collapse_q(d.P_at(d.r));
  UniPoly<Rational> Qe = eta_collapse_q(d.Q_at(d.r));
  std::complex<double> Pv = uni_eval_c(Pe, alpha0);
  std::complex<double> dPv = uni_eval_c(uni_derivative(Pe), alpha0);
  std::complex<double> dQv = uni_eval_c(uni_derivative(Qe), alpha0);
  double qp = static_cast<double>(d.w.q) / static_cast<double>(d.w.p);
  fi.slope = Pv;
  fi.offset = qp * (alpha0 * dPv + Pv) - dQv;

  double scale = 1.0 + std::abs(fi.offset) + std::abs(alpha0 * dPv) + std::abs(dQv);
  if (std::abs(fi.slope) <= 1e-10 * scale) {
    if (std::abs(fi.offset) <= 1e-10 * scale) {
      fi.verdict = FuchsVerdict::degenerate;
      fi.note = "linearized step coefficient vanishes identically at this direction";
    } else {
      fi.verdict = FuchsVerdict::n_equals_p;
      fi.note = "linearized step coefficient is a nonzero constant; no resonant order";
    }
    return fi;
  }

  std::complex<double> j = -fi.offset / fi.slope;
  fi.index = j;
  if (std::abs(j.imag()) > 1e-9 * (1.0 + std::abs(j))) {
    fi.verdict = FuchsVerdict::n_equals_p;
    fi.note = "index is not real";
    return fi;
  }
  double x = j.real();
  if (x <= 1e-12 * (1.0 + std::abs(x))) {
    fi.verdict = FuchsVerdict::n_equals_p;
    fi.note = "index is not positive";
    return fi;
  }
  std::optional<Rational> v = rationalize(x, 64, 1e-10);
  if (!v) {
    fi.verdict = FuchsVerdict::n_equals_p;
    fi.note = "index has no small rational approximation; treated as irrational";
    return fi;
  }
  if (den(*v) == 1) {
    fi.verdict = FuchsVerdict::n_equals_p;
    std::ostringstream os;
    os << "index is the integer " << *v << "; the extension can only stall at order "
       << (*v * d.w.p) << " and stays on the same exponent grid";
    fi.note = os.str();
    return fi;
  }
  fi.verdict = FuchsVerdict::general_theory_needed;
  {
    std::ostringstream os;
    os << "index is the positive non-integer rational " << *v;
    fi.note = os.str();
  }
  return fi;
}

Branch extend_branch(const VectorField& X, const QHDecomposition& d, std::complex<double> alpha0,
                     int M) {
  // Prefer the exact engine whenever alpha0 is recognizably a Gaussian
  // rational root of the determining polynomial.
  std::optional<Rational> re = rationalize(alpha0.real(), 4096, 1e-9);
  std::optional<Rational> im = rationalize(alpha0.imag(), 4096, 1e-9);
  if (re && im) {
    GaussianRational a0(*re, *im);
    if (!is_zero(a0)) {
      DeterminingPolynomial det = q_polynomial(d);
      if (det.degenerate || is_zero(eval_gauss(det.coeffs, a0)))
        return extend_engine<GaussianRational>(X, d, a0, M);
    }
  }
  return extend_engine<std::complex<double>>(X, d, alpha0, M);
}

Branch extend_branch(const VectorField& X, const QHDecomposition& d,
                     const GaussianRational& alpha0, int M) {
  return extend_engine<GaussianRational>(X, d, alpha0, M);
}

Branch conjugate_branch(const Branch& b) {
  Branch c = b;
  for (auto& a : c.alpha) a = std::conj(a);
  for (auto& a : c.alpha_exact) a = conj_of(a);
  return c;
}

std::vector<double> branch_residual(const VectorField& X, const Branch& b) {
  const int p = b.w.p, q = b.w.q;
  const int N = p + q + b.r + b.M + 1;
  BiPoly<std::complex<double>> Pc = convert_poly<std::complex<double>>(X.P);
  BiPoly<std::complex<double>> Qc = convert_poly<std::complex<double>>(X.Q);
  Series<std::complex<double>> y = Series<std::complex<double>>::zero(N);
  for (int m = 0; m <= b.M; ++m)
    y.c[static_cast<size_t>(q + m)] = b.alpha[static_cast<size_t>(m)];
  double scale = 1.0;
  Series<std::complex<double>> E = invariance_residual(Pc, Qc, p, y, N, &scale);
  int top = std::min(E.order, p + q + b.r - 1 + b.M);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(top) + 1);
  for (int k = 0; k <= top; ++k) out.push_back(std::abs(E.coeff(k)) / scale);
  return out;
}

namespace {

template <class K>
std::vector<Series<K>> branch_product(const std::vector<std::pair<Branch, int>>& branches,
                                      int q) {
  int max_m = 0, mu = 0;
  for (auto& [b, mult] : branches) {
    max_m = std::max(max_m, b.M);
    mu += mult;
  }
  int big = q * mu + max_m + 8;  // never the binding truncation bound
  std::vector<Series<K>> C;
  C.push_back(Series<K>::monomial(0, K(1), big));
  for (auto& [b, mult] : branches) {
    Series<K> yb = Series<K>::zero(q + b.M);
    for (int m = 0; m <= b.M; ++m) {
      if constexpr (std::is_same_v<K, GaussianRational>)
        yb.c[static_cast<size_t>(q + m)] = b.alpha_exact[static_cast<size_t>(m)];
      else
        yb.c[static_cast<size_t>(q + m)] = b.alpha[static_cast<size_t>(m)];
    }
    for (int t = 0; t < mult; ++t) {
      std::vector<Series<K>> Cn;
      Cn.reserve(C.size() + 1);
      for (size_t k = 0; k <= C.size(); ++k) {
        if (k == 0)
          Cn.push_back(series_scale(yb * C[0], K(-1)));
        else if (k == C.size())
          Cn.push_back(C[k - 1]);
        else
          Cn.push_back(C[k - 1] - yb * C[k]);
      }
      C = std::move(Cn);
    }
  }
  return C;
}

template <class K>
CurveCandidate assemble_impl(const std::vector<std::pair<Branch, int>>& branches,
                             const AssembleOptions& opt) {
  constexpr bool exact = std::is_same_v<K, GaussianRational>;
  const Branch& b0 = branches.front().first;
  const int p = b0.w.p, q = b0.w.q;
  int mu = 0;
  for (auto& [b, mult] : branches) mu += mult;

  std::vector<Series<K>> C = branch_product<K>(branches, q);
  int valid_to = std::numeric_limits<int>::max();
  for (size_t k = 0; k < C.size(); ++k)
    valid_to = std::min(valid_to, C[k].order + q * static_cast<int>(k));

  CurveCandidate cc;
  cc.w = b0.w;
  cc.s = q * mu;
  cc.valid_to = valid_to;

  double scale = 1.0;
  for (auto& s : C) scale = std::max(scale, max_abs_series(s));

  BiPolyD F;
  BiPolyQ Fq;
  for (size_t k = 0; k < C.size(); ++k) {
    for (int e = 0; e <= C[k].order; ++e) {
      K z = C[k].c[static_cast<size_t>(e)];
      if (is_zero(z)) continue;
      if (e + q * static_cast<int>(k) > valid_to) continue;  // other y-degrees are blind here
      bool on_grid = (e % p == 0);
      if constexpr (exact) {
        CF_CHECK(z.im.is_zero(), "conjugation-closed branches produced a nonreal coefficient");
        if (!on_grid)
          throw InputError(
              "assembled curve keeps a fractional power of x; the branch list is not closed "
              "under the sheets of x^(1/p)");
        Fq.add_term(e / p, static_cast<int>(k), z.re);
      } else {
        double re = z.real(), im = z.imag();
        if (std::abs(im) > opt.drop_tol * scale)
          throw InputError(
              "assembled curve keeps a nonreal coefficient; the branch list is not closed "
              "under complex conjugation");
        if (!on_grid) {
          if (std::abs(re) > opt.drop_tol * scale)
            throw InputError(
                "assembled curve keeps a fractional power of x; the branch list is not closed "
                "under the sheets of x^(1/p)");
          continue;
        }
        if (re != 0.0) F.add_term(e / p, static_cast<int>(k), re);
      }
    }
  }
  if constexpr (exact) F = to_double_poly(Fq);
  CF_CHECK(!F.empty(), "assembled curve vanished");

  double fscale = max_abs_coeff(F);
  int dstar = cc.s;
  if constexpr (exact) {
    for (auto& [kk, v] : Fq.terms()) dstar = std::max(dstar, p * kk.first + q * kk.second);
  } else {
    for (auto& [kk, v] : F.terms())
      if (std::abs(v) > opt.termination_tol * fscale)
        dstar = std::max(dstar, p * kk.first + q * kk.second);
  }
  cc.exact_polynomial = (valid_to - dstar >= opt.termination_window);

  if constexpr (exact) {
    cc.F_exact = Fq;
  } else if (cc.exact_polynomial) {
    BiPolyD pruned;
    for (auto& [kk, v] : F.terms())
      if (p * kk.first + q * kk.second <= dstar) pruned.add_term(kk.first, kk.second, v);
    F = std::move(pruned);
    BiPolyQ cand;
    bool ok = true;
    for (auto& [kk, v] : F.terms()) {
      std::optional<Rational> rq = rationalize(v, opt.rational_max_den, 1e-9);
      if (!rq) {
        ok = false;
        break;
      }
      if (!is_zero(*rq)) cand.add_term(kk.first, kk.second, *rq);
    }
    if (ok && !cand.empty()) {
      cc.F_exact = cand;
      F = to_double_poly(cand);
    }
  }
  cc.F = F;

  for (auto& [kk, v] : cc.F.terms())
    if (p * kk.first + q * kk.second == cc.s) cc.leading_form.add_term(kk.first, kk.second, v);
  if (cc.F_exact) {
    BiPolyQ lf;
    for (auto& [kk, v] : cc.F_exact->terms())
      if (p * kk.first + q * kk.second == cc.s) lf.add_term(kk.first, kk.second, v);
    cc.leading_form_exact = std::move(lf);
  } else {
    BiPolyQ lf;
    bool ok = true;
    for (auto& [kk, v] : cc.leading_form.terms()) {
      std::optional<Rational> rq = rationalize(v, 10000, 1e-9);
      if (!rq) {
        ok = false;
        break;
      }
      if (!is_zero(*rq)) lf.add_term(kk.first, kk.second, *rq);
    }
    if (ok && !lf.empty()) cc.leading_form_exact = std::move(lf);
  }

  // The curve can only feed the logarithmic integral identity if its leading
  // form is sign definite on the circle; a zero marks a real branch direction.
  if (cc.leading_form_exact) {
    CircleSign sg = circle_sign(trig_substitute(*cc.leading_form_exact));
    CF_CHECK(sg.kind != CircleSignKind::identically_zero,
             "nonzero leading form vanished under the circle substitution");
    if (!sg.roots.empty()) {
      cc.rejection = "leading form vanishes on the circle: the curve meets a real direction";
      for (auto& rt : sg.roots) cc.circle_zero_angles.push_back(rt.angle);
    }
  } else {
    const int grid = 2048;
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0, arg_mn = 0.0;
    for (int i = 0; i < grid; ++i) {
      double phi = kTau * i / grid;
      double val = std::abs(eval_double(cc.leading_form, std::cos(phi), std::sin(phi)));
      if (val < mn) {
        mn = val;
        arg_mn = phi;
      }
      mx = std::max(mx, val);
    }
    if (mn <= 1e-6 * mx) {
      cc.rejection = "leading form vanishes on the circle: the curve meets a real direction";
      cc.circle_zero_angles.push_back(arg_mn);
    }
  }
  return cc;
}

}  // namespace

CurveCandidate assemble_curve(const std::vector<std::pair<Branch, int>>& branches,
                              const AssembleOptions& opt) {
  if (branches.empty()) throw InputError("curve assembly needs at least one branch");
  const Branch& b0 = branches.front().first;
  bool all_exact = true;
  for (auto& [b, mult] : branches) {
    if (!(b.w == b0.w)) throw InputError("branches carry different weights");
    if (b.n != b0.n) throw InputError("branches live on different exponent grids");
    if (mult <= 0) throw InputError("branch multiplicity must be positive");
    if (b.alpha.empty()) throw InputError("branch has no coefficients");
    all_exact = all_exact && b.exact && b.alpha_exact.size() == b.alpha.size();
  }

  if (all_exact) {
    auto msum = [&](const std::vector<GaussianRational>& v) {
      long long t = 0;
      for (auto& [b, mult] : branches)
        if (b.alpha_exact == v) t += mult;
      return t;
    };
    for (auto& [b, mult] : branches) {
      std::vector<GaussianRational> cv;
      cv.reserve(b.alpha_exact.size());
      for (auto& a : b.alpha_exact) cv.push_back(conj_of(a));
      if (msum(cv) != msum(b.alpha_exact))
        throw InputError("branch list is not closed under complex conjugation");
    }
    return assemble_impl<GaussianRational>(branches, opt);
  }

  double amax = 0.0;
  for (auto& [b, mult] : branches)
    for (auto& a : b.alpha) amax = std::max(amax, std::abs(a));
  double ctol = 1e-8 * (1.0 + amax);
  auto close = [&](const std::vector<std::complex<double>>& a,
                   const std::vector<std::complex<double>>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > ctol) return false;
    return true;
  };
  auto msum = [&](const std::vector<std::complex<double>>& v) {
    long long t = 0;
    for (auto& [b, mult] : branches)
      if (close(b.alpha, v)) t += mult;
    return t;
  };
  for (auto& [b, mult] : branches) {
    std::vector<std::complex<double>> cv;
    cv.reserve(b.alpha.size());
    for (auto& a : b.alpha) cv.push_back(std::conj(a));
    if (msum(cv) != msum(b.alpha))
      throw InputError("branch list is not closed under complex conjugation");
  }
  return assemble_impl<std::complex<double>>(branches, opt);
}

namespace {

template <class K>
std::map<int, BiPoly<K>> grade_by_weight(const BiPoly<K>& f, Weight w, int cap) {
  std::map<int, BiPoly<K>> out;
  for (auto& [k, v] : f.terms()) {
    int d = w.p * k.first + w.q * k.second;
    if (d <= cap) out[d].add_term(k.first, k.second, v);
  }
  return out;
}

template <class K>
double max_abs_uni(const UniPoly<K>& u) {
  double m = 0.0;
  for (auto& c : u) m = std::max(m, abs_value(c));
  return m;
}

// Solve X(F) = K F degree by degree in the weighted grading, working on the
// eta-collapsed components (injective within one degree) and lifting every
// quotient back to (x, y).
template <class K>
std::map<int, BiPoly<K>> graded_cofactor(const std::map<int, BiPoly<K>>& Fc, int s,
                                         const std::map<int, BiPoly<K>>& XFc, int r,
                                         int kappa_max, Weight w, double tol) {
  constexpr bool exact = std::is_same_v<K, Rational>;
  auto fit0 = Fc.find(s);
  CF_CHECK(fit0 != Fc.end(), "curve lost its leading form");
  const UniPoly<K> fs = eta_collapse(fit0->second);
  std::map<int, UniPoly<K>> keta;
  std::map<int, BiPoly<K>> out;
  for (int kap = r; kap <= kappa_max; ++kap) {
    UniPoly<K> ncol;
    if (auto xit = XFc.find(s + kap); xit != XFc.end()) ncol = eta_collapse(xit->second);
    for (auto& [kp, ke] : keta) {
      auto fit = Fc.find(s + kap - kp);
      if (fit == Fc.end()) continue;
      ncol = uni_add(std::move(ncol), uni_scale(uni_mul(ke, eta_collapse(fit->second)), K(-1)));
    }
    if (uni_degree(ncol) < 0) continue;
    double nscale = max_abs_uni(ncol);
    auto [quot, rem] = uni_divrem(ncol, fs);
    bool rem_ok;
    if constexpr (exact)
      rem_ok = uni_degree(rem) < 0;
    else
      rem_ok = max_abs_uni(rem) <= tol * std::max(1.0, nscale);
    if (!rem_ok)
      throw NumericError("curve is not invariant at weighted order " + std::to_string(s + kap) +
                         ": cofactor division leaves a remainder");
    BiPoly<K> lifted;
    double wscale = max_abs_uni(quot);
    for (size_t b = 0; b < quot.size(); ++b) {
      const K& c = quot[b];
      if (is_zero(c)) continue;
      long long e = static_cast<long long>(kap) - static_cast<long long>(w.q) * b;
      if (e < 0 || e % w.p != 0) {
        if constexpr (!exact)
          if (abs_value(c) <= tol * std::max(1.0, wscale)) continue;
        throw NumericError("cofactor component at weighted order " + std::to_string(kap) +
                           " does not lift to a polynomial");
      }
      lifted.add_term(static_cast<int>(e / w.p), static_cast<int>(b), c);
    }
    if (lifted.empty()) continue;
    keta[kap] = eta_collapse(lifted);
    out[kap] = std::move(lifted);
  }
  return out;
}

}  // namespace

Cofactor extract_cofactor(const VectorField& X, const CurveCandidate& curve, double division_tol) {
  CF_CHECK(!curve.F.empty(), "cofactor extraction needs a nonzero curve");
  Cofactor co;
  co.w = curve.w;
  QHDecomposition d = qh_decompose(X, curve.w);
  const int r = d.r;
  const int kappa_max = curve.valid_to - curve.s + r;
  co.valid_to = kappa_max;

  if (curve.F_exact && curve.exact_polynomial) {
    const BiPolyQ& F = *curve.F_exact;
    BiPolyQ XF = X.P * F.dx() + X.Q * F.dy();
    if (XF.empty()) {
      // first integral: the cofactor vanishes identically
      co.K_exact = BiPolyQ();
      co.exact_polynomial = true;
      return co;
    }
    if (std::optional<BiPolyQ> Kq = bipoly_exact_divide(XF, F)) {
      CF_CHECK((XF - *Kq * F).empty(), "exact cofactor fails its multiply-back check");
      co.K_exact = *Kq;
      co.K = to_double_poly(*Kq);
      co.exact_polynomial = true;
      auto comps = grade_by_weight(*Kq, curve.w, std::numeric_limits<int>::max() / 2);
      co.rbar = comps.begin()->first;
      co.valid_to = std::max(kappa_max, comps.rbegin()->first);
      for (auto& [kap, c] : comps) co.components[kap] = to_double_poly(c);
      co.leading_form_exact = comps.begin()->second;
      co.leading_form = to_double_poly(comps.begin()->second);
      return co;
    }
    // The recognized polynomial is not exactly invariant; treat it as a jet.
  }

  if (curve.F_exact) {
    const BiPolyQ& F = *curve.F_exact;
    BiPolyQ XF = X.P * F.dx() + X.Q * F.dy();
    auto Fc = grade_by_weight(F, curve.w, curve.valid_to);
    auto XFc = grade_by_weight(XF, curve.w, curve.s + kappa_max);
    auto comps = graded_cofactor<Rational>(Fc, curve.s, XFc, r, kappa_max, curve.w, division_tol);
    if (comps.empty()) return co;
    BiPolyQ ksum;
    for (auto& [kap, c] : comps) {
      ksum += c;
      co.components[kap] = to_double_poly(c);
    }
    co.K_exact = ksum;
    co.K = to_double_poly(ksum);
    co.rbar = comps.begin()->first;
    co.leading_form_exact = comps.begin()->second;
    co.leading_form = to_double_poly(comps.begin()->second);
    return co;
  }

  BiPolyD Fd = curve.F;
  BiPolyD XFd = to_double_poly(X.P) * Fd.dx() + to_double_poly(X.Q) * Fd.dy();
  auto Fc = grade_by_weight(Fd, curve.w, curve.valid_to);
  auto XFc = grade_by_weight(XFd, curve.w, curve.s + kappa_max);
  auto comps = graded_cofactor<double>(Fc, curve.s, XFc, r, kappa_max, curve.w, division_tol);
  double global = 0.0;
  for (auto& [kap, c] : comps) global = std::max(global, max_abs_coeff(c));
  if (global <= division_tol * std::max(1.0, max_abs_coeff(XFd)))
    return co;  // no resolvable cofactor content through valid_to
  for (auto& [kap, c] : comps) {
    if (max_abs_coeff(c) <= division_tol * global) continue;  // noise component
    co.components[kap] = c;
  }
  if (co.components.empty()) return co;
  co.rbar = co.components.begin()->first;
  co.leading_form = co.components.begin()->second;
  BiPolyD ksum;
  for (auto& [kap, c] : co.components) ksum += c;
  co.K = ksum;
  return co;
}

}  // namespace cf

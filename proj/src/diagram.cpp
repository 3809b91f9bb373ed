#include "centerfocus/diagram.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "centerfocus/unipoly.hpp"

namespace cf {

std::vector<GridPoint> vector_support(const VectorField& X) {
  std::set<GridPoint> pts;
  for (auto& [k, v] : X.P.terms()) pts.insert({k.first, k.second + 1});
  for (auto& [k, v] : X.Q.terms()) pts.insert({k.first + 1, k.second});
  if (pts.empty()) throw InputError("zero vector field has no support");
  return {pts.begin(), pts.end()};
}

NewtonDiagram newton_diagram(const VectorField& X) {
  NewtonDiagram nd;
  nd.support = vector_support(X);

  // Pareto-minimal points: nothing weakly below-left of them.
  std::vector<GridPoint> minimal;
  for (auto& p : nd.support) {
    bool dominated = false;
    for (auto& q : nd.support)
      if (q != p && q.first <= p.first && q.second <= p.second) {
        dominated = true;
        break;
      }
    if (!dominated) minimal.push_back(p);
  }
  std::sort(minimal.begin(), minimal.end());  // i ascending, j strictly descending

  // Lower-left convex chain; colinear points stay edge members, not vertices.
  std::vector<GridPoint> hull;
  for (auto& c : minimal) {
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull[hull.size() - 1];
      long cross = static_cast<long>(b.first - a.first) * (c.second - b.second) -
                   static_cast<long>(b.second - a.second) * (c.first - b.first);
      if (cross <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(c);
  }
  nd.vertices = hull;
  nd.vertical_ray_in_diagram = hull.front().first > 0;
  nd.horizontal_ray_in_diagram = hull.back().second > 0;

  for (size_t k = 0; k + 1 < hull.size(); ++k) {
    DiagramEdge e;
    e.from = hull[k];
    e.to = hull[k + 1];
    int di = e.to.first - e.from.first;
    int dj = e.from.second - e.to.second;
    CF_CHECK(di > 0 && dj > 0, "diagram edge not strictly decreasing");
    int g = std::gcd(di, dj);
    e.w = Weight{dj / g, di / g};  // q/p = di/dj reduced
    e.ell = e.w.p * e.from.first + e.w.q * e.from.second;
    e.r = e.ell - e.w.p - e.w.q;
    for (auto& s : nd.support)
      if (e.w.p * s.first + e.w.q * s.second == e.ell && s.first >= e.from.first &&
          s.first <= e.to.first)
        e.points.push_back(s);
    if (e.r < 1)
      nd.warnings.push_back("edge (" + std::to_string(e.from.first) + "," +
                            std::to_string(e.from.second) + ")-(" + std::to_string(e.to.first) +
                            "," + std::to_string(e.to.second) + ") has leading degree r = " +
                            std::to_string(e.r) + (e.r < 0 ? " (origin not singular)" : ""));
    nd.edges.push_back(std::move(e));
  }
  if (nd.edges.empty())
    nd.warnings.push_back("diagram degenerates to a single vertex; no admissible weights");
  return nd;
}

QHDecomposition qh_decompose(const VectorField& X, Weight w) {
  CF_CHECK(w.p >= 1 && w.q >= 1 && std::gcd(w.p, w.q) == 1, "weights must be coprime positive");
  QHDecomposition d;
  d.w = w;
  for (auto& [k, v] : X.P.terms()) {
    int j = w.p * k.first + w.q * k.second - w.p;
    d.comps[j].first.add_term(k.first, k.second, v);
  }
  for (auto& [k, v] : X.Q.terms()) {
    int j = w.p * k.first + w.q * k.second - w.q;
    d.comps[j].second.add_term(k.first, k.second, v);
  }
  CF_CHECK(!d.comps.empty(), "empty decomposition of a nonzero field");
  d.r = d.comps.begin()->first;
  return d;
}

BiPolyQ inverse_integrating_factor(const QHDecomposition& d) {
  const BiPolyQ* Pr = d.P_at(d.r);
  const BiPolyQ* Qr = d.Q_at(d.r);
  BiPolyQ V;
  if (Qr) V += BiPolyQ::term(1, 0, rat(d.w.p)) * *Qr;
  if (Pr) V -= BiPolyQ::term(0, 1, rat(d.w.q)) * *Pr;
  return V;
}

template <class K>
std::optional<BiPoly<K>> bipoly_exact_divide(BiPoly<K> f, const BiPoly<K>& g) {
  if (g.empty()) return std::nullopt;
  BiPoly<K> q;
  // Leading term in the (i,j) lex order used by the term map (largest key).
  auto lead = *g.terms().rbegin();
  while (!f.empty()) {
    auto lt = *f.terms().rbegin();
    int di = lt.first.first - lead.first.first;
    int dj = lt.first.second - lead.first.second;
    if (di < 0 || dj < 0) return std::nullopt;
    K c = lt.second / lead.second;
    q.add_term(di, dj, c);
    f -= g * BiPoly<K>::term(di, dj, c);
  }
  return q;
}

template std::optional<BiPoly<Rational>> bipoly_exact_divide(BiPoly<Rational>,
                                                             const BiPoly<Rational>&);
template std::optional<BiPoly<GaussianRational>> bipoly_exact_divide(
    BiPoly<GaussianRational>, const BiPoly<GaussianRational>&);

namespace {

// Bivariate polynomials as univariate in y with Q[x] coefficients.
using XPoly = UniPoly<Rational>;
using YXPoly = std::vector<XPoly>;  // index = y degree

YXPoly to_yx(const BiPolyQ& f) {
  YXPoly r;
  for (auto& [k, v] : f.terms()) {
    if (static_cast<int>(r.size()) <= k.second) r.resize(static_cast<size_t>(k.second + 1));
    auto& cx = r[static_cast<size_t>(k.second)];
    if (static_cast<int>(cx.size()) <= k.first) cx.resize(static_cast<size_t>(k.first + 1), rat(0));
    cx[static_cast<size_t>(k.first)] = v;
  }
  return r;
}

BiPolyQ from_yx(const YXPoly& f) {
  BiPolyQ r;
  for (size_t j = 0; j < f.size(); ++j)
    for (size_t i = 0; i < f[j].size(); ++i)
      r.add_term(static_cast<int>(i), static_cast<int>(j), f[j][i]);
  return r;
}

int ydeg(const YXPoly& f) {
  for (int j = static_cast<int>(f.size()) - 1; j >= 0; --j)
    if (uni_degree(f[static_cast<size_t>(j)]) >= 0) return j;
  return -1;
}

// Content in Q[x]: monic gcd of the y-coefficients.
XPoly yx_content(const YXPoly& f) {
  XPoly c;
  for (auto& cx : f) {
    if (uni_degree(cx) < 0) continue;
    c = c.empty() ? uni_monic(cx) : uni_gcd(c, cx);
    if (uni_degree(c) == 0) break;
  }
  return c;
}

YXPoly yx_divide_content(const YXPoly& f, const XPoly& c) {
  YXPoly r = f;
  for (auto& cx : r) {
    if (uni_degree(cx) < 0) continue;
    auto [q, rem] = uni_divrem(cx, c);
    CF_CHECK(uni_degree(rem) < 0, "content division not exact");
    cx = q;
  }
  return r;
}

// Primitive-PRS Euclid in y over Q[x].
YXPoly yx_prim_gcd(YXPoly a, YXPoly b) {
  if (ydeg(a) < ydeg(b)) std::swap(a, b);
  while (ydeg(b) >= 0) {
    // Pseudo-remainder of a by b in y.
    int da = ydeg(a), db = ydeg(b);
    XPoly lc = b[static_cast<size_t>(db)];
    YXPoly r = a;
    for (int k = da; k >= db; --k) {
      int dr = ydeg(r);
      if (dr < k) continue;
      if (dr < db) break;
      // r <- lc * r - r_lead * y^{dr-db} * b
      XPoly rl = r[static_cast<size_t>(dr)];
      YXPoly nr(static_cast<size_t>(dr + 1));
      for (int j = 0; j <= dr; ++j) {
        XPoly t = j < static_cast<int>(r.size()) ? uni_mul(r[static_cast<size_t>(j)], lc) : XPoly{};
        int bj = j - (dr - db);
        if (bj >= 0 && bj <= db) {
          XPoly s = uni_mul(b[static_cast<size_t>(bj)], rl);
          t = uni_add(t, uni_scale(s, rat(-1)));
        }
        nr[static_cast<size_t>(j)] = t;
      }
      r = std::move(nr);
    }
    // Primitive part keeps growth bounded.
    XPoly c = yx_content(r);
    if (uni_degree(c) > 0) r = yx_divide_content(r, c);
    a = std::move(b);
    b = std::move(r);
  }
  XPoly c = yx_content(a);
  if (uni_degree(c) > 0) a = yx_divide_content(a, c);
  return a;
}

BiPolyQ normalize_factor(BiPolyQ f) {
  if (f.empty()) return f;
  Rational lead = f.terms().rbegin()->second;
  return f.scaled(1 / lead);
}

}  // namespace

std::optional<BiPolyQ> common_factor(const BiPolyQ& P, const BiPolyQ& Q) {
  if (P.empty() || Q.empty()) return std::nullopt;
  YXPoly a = to_yx(P), b = to_yx(Q);
  XPoly ca = yx_content(a), cb = yx_content(b);
  XPoly cg = uni_gcd(ca, cb);
  YXPoly pa = yx_divide_content(a, ca), pb = yx_divide_content(b, cb);
  YXPoly g = yx_prim_gcd(pa, pb);
  // Assemble content gcd (in x) times primitive gcd (in y over Q[x]).
  BiPolyQ gx;
  for (size_t i = 0; i < cg.size(); ++i) gx.add_term(static_cast<int>(i), 0, cg[i]);
  BiPolyQ result = normalize_factor(gx * from_yx(g));
  if (result.size() == 1 && result.terms().begin()->first == std::pair(0, 0))
    return std::nullopt;  // constant gcd
  CF_CHECK(bipoly_exact_divide(P, result).has_value(), "gcd does not divide P");
  CF_CHECK(bipoly_exact_divide(Q, result).has_value(), "gcd does not divide Q");
  return result;
}

}  // namespace cf

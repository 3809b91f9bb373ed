#include "centerfocus/blowup.hpp"

#include <algorithm>
#include <cmath>

namespace cf {

const char* orientation_name(Orientation o) {
  switch (o) {
    case Orientation::counterclockwise:
      return "counterclockwise";
    case Orientation::clockwise:
      return "clockwise";
    case Orientation::mixed:
      return "mixed";
  }
  return "?";
}

namespace {
const FourierPoly kZeroPoly{};
}

const FourierPoly& PolarSystem::F_at(int j) const {
  int k = j - r;
  if (k < 0 || k >= static_cast<int>(F.size())) return kZeroPoly;
  return F[static_cast<size_t>(k)];
}

const FourierPoly& PolarSystem::G_at(int j) const {
  int k = j - r;
  if (k < 0 || k >= static_cast<int>(G.size())) return kZeroPoly;
  return G[static_cast<size_t>(k)];
}

double PolarSystem::radial(double phi, double rho) const {
  double acc = 0.0, pw = rho;
  for (auto& f : Fe) {
    acc += pw * f(phi);
    pw *= rho;
  }
  return acc;
}

double PolarSystem::angular(double phi, double rho) const {
  double acc = 0.0, pw = 1.0;
  for (auto& g : Ge) {
    acc += pw * g(phi);
    pw *= rho;
  }
  return acc;
}

PolarSystem polar_components(const VectorField& X, Weight w, bool allow_any_weight) {
  if (!allow_any_weight) {
    auto nd = newton_diagram(X);
    bool found = false;
    for (auto& e : nd.edges) found = found || e.w == w;
    if (!found)
      throw InputError("weights (" + std::to_string(w.p) + "," + std::to_string(w.q) +
                       ") do not belong to an edge of the Newton diagram");
  }

  auto d = qh_decompose(X, w);
  PolarSystem ps;
  ps.w = w;
  ps.r = d.r;
  ps.max_degree = d.comps.rbegin()->first;

  FourierPoly c = FourierPoly::cosine(), s = FourierPoly::sine();
  ps.D = c * c.scaled(GaussianRational(rat(w.p))) + s * s.scaled(GaussianRational(rat(w.q)));

  size_t n = static_cast<size_t>(ps.max_degree - ps.r + 1);
  ps.F.assign(n, {});
  ps.G.assign(n, {});
  for (auto& [j, comp] : d.comps) {
    FourierPoly tp = trig_substitute(comp.first);
    FourierPoly tq = trig_substitute(comp.second);
    size_t k = static_cast<size_t>(j - ps.r);
    ps.F[k] = tp * c + tq * s;
    ps.G[k] = (tq * c).scaled(GaussianRational(rat(w.p))) -
              (tp * s).scaled(GaussianRational(rat(w.q)));
  }

  if (ps.G[0].is_zero_poly())
    throw InputError("leading angular component vanishes identically for weights (" +
                     std::to_string(w.p) + "," + std::to_string(w.q) + ")");

  auto sign = circle_sign(ps.G[0]);
  switch (sign.kind) {
    case CircleSignKind::positive:
      ps.orientation = Orientation::counterclockwise;
      break;
    case CircleSignKind::negative:
      ps.orientation = Orientation::clockwise;
      ps.time_reversed = true;
      for (auto& f : ps.F) f = -f;
      for (auto& g : ps.G) g = -g;
      break;
    case CircleSignKind::mixed:
      ps.orientation = Orientation::mixed;
      break;
    case CircleSignKind::identically_zero:
      CF_CHECK(false, "sign classification of a nonzero polynomial");
  }
  ps.omega = sign.roots;

  ps.De = FourierEval(ps.D);
  ps.Fe.reserve(n);
  ps.Ge.reserve(n);
  for (auto& f : ps.F) ps.Fe.emplace_back(f);
  for (auto& g : ps.G) ps.Ge.emplace_back(g);
  return ps;
}

const std::vector<CircleRoot>& characteristic_directions(const PolarSystem& ps) {
  return ps.omega;
}

MoClass mo_class_test(const PolarSystem& ps) {
  MoClass m;
  m.in_mo = ps.omega.empty();
  if (!m.in_mo) m.witness = ps.omega.front().angle;
  return m;
}

void chart_to_cartesian(Weight w, double phi, double rho, double& x, double& y) {
  x = std::pow(rho, w.p) * std::cos(phi);
  y = std::pow(rho, w.q) * std::sin(phi);
}

ChartPoint cartesian_to_chart(Weight w, double x, double y) {
  constexpr double pi = 3.14159265358979323846264338328;
  if (x == 0.0 && y == 0.0)
    throw InputError("chart coordinates are undefined at the origin");
  if (y == 0.0) return {x > 0.0 ? 0.0 : pi, std::pow(std::abs(x), 1.0 / w.p)};
  if (x == 0.0) return {y > 0.0 ? 0.5 * pi : 1.5 * pi, std::pow(std::abs(y), 1.0 / w.q)};

  const double ax = std::abs(x), ay = std::abs(y);
  double rho;
  if (w.p == w.q) {
    rho = std::pow(std::hypot(ax, ay), 1.0 / w.p);
  } else {
    // rho solves (ax / rho^p)^2 + (ay / rho^q)^2 = 1.  In lam = log rho the
    // left side is convex and strictly decreasing, so Newton started where
    // the dominant term alone equals one converges monotonically.  Solving
    // for rho first keeps the result accurate when the point hugs an axis;
    // any angle-first parametrization loses digits there because the small
    // coordinate is recovered through a cosine evaluated near its root.
    const double la = std::log(ax), lb = std::log(ay);
    double lam = std::max(la / w.p, lb / w.q);
    for (int it = 0; it < 120; ++it) {
      const double u = std::exp(la - w.p * lam);
      const double v = std::exp(lb - w.q * lam);
      const double h = u * u + v * v - 1.0;
      const double dh = -2.0 * (w.p * u * u + w.q * v * v);
      const double step = h / dh;
      lam -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(lam))) break;
    }
    rho = std::exp(lam);
  }
  const double cu = ax / std::pow(rho, w.p);
  const double sv = ay / std::pow(rho, w.q);
  double psi = std::atan2(sv, cu);
  double phi = psi;
  if (x < 0.0) phi = y > 0.0 ? pi - psi : pi + psi;
  else if (y < 0.0) phi = 2.0 * pi - psi;
  return {phi, rho};
}

}  // namespace cf

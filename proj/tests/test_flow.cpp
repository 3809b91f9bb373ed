#include "centerfocus/flow.hpp"

#include <cmath>

#include "centerfocus/blowup.hpp"
#include "centerfocus/diagram.hpp"
#include "centerfocus/errors.hpp"
#include "doctest.h"

using namespace cf;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;
constexpr double kPi = kTau / 2.0;

BiPolyQ poly(std::initializer_list<std::tuple<int, int, Rational>> terms) {
  BiPolyQ p;
  for (auto& [i, j, c] : terms) p.add_term(i, j, c);
  return p;
}

VectorField linear_field(Rational lam) {
  VectorField X;
  X.P = poly({{1, 0, lam}, {0, 1, rat(-1)}});
  X.Q = poly({{1, 0, rat(1)}, {0, 1, lam}});
  return X;
}

VectorField andreev_field(Rational A, Rational B, Rational Cc, Rational Pc, Rational kap,
                          Rational L) {
  VectorField X;
  X.P = poly({{0, 1, rat(1)}, {2, 1, A}, {1, 2, B}, {0, 3, Cc}});
  X.Q = poly({{3, 0, rat(-1)}, {2, 1, Pc}, {1, 2, kap}, {0, 3, L}});
  return X;
}

VectorField algaba_field(Rational a, Rational al, Rational be) {
  VectorField X;
  X.P = poly({{0, 3, rat(1)}, {3, 1, 2 * a}, {5, 0, 2 * al}, {2, 2, 2 * be}});
  X.Q = poly({{5, 0, rat(-1)}, {2, 2, -3 * a}, {4, 1, 3 * al}, {1, 3, 3 * be}});
  return X;
}

VectorField quasihom_field(Rational A, Rational B, Rational Cc, Rational D) {
  VectorField X;
  X.P = poly({{3, 0, A}, {0, 1, B}});
  X.Q = poly({{5, 0, Cc}, {2, 1, D}});
  return X;
}

VectorField manyosa1_field(Rational a) {
  VectorField X;
  X.P = poly({{1, 2, rat(1)}, {0, 3, rat(-1)}, {5, 0, a}});
  X.Q = poly({{7, 0, rat(2)}, {4, 1, rat(-1)}, {1, 2, rat(4)}, {0, 3, rat(1)}});
  return X;
}

VectorField manyosa2_field(Rational a) {
  VectorField X;
  X.P = poly({{2, 1, rat(1)}, {0, 3, rat(-1)}, {5, 0, a}, {11, 0, rat(-1)}});
  X.Q = poly({{1, 2, rat(4)}, {7, 0, rat(9)}});
  return X;
}

VectorField armengol_field(Rational a, Rational b) {
  VectorField X;
  X.P = poly({{2, 1, b}, {1, 2, a}, {0, 3, -b}, {4, 0, rat(-1)}});
  X.Q = poly({{1, 2, 4 * b}, {0, 3, a}, {5, 0, rat(2)}});
  return X;
}

VectorField negate(const VectorField& X) {
  VectorField Y;
  Y.P = BiPolyQ() - X.P;
  Y.Q = BiPolyQ() - X.Q;
  return Y;
}

double slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= xs.size();
  my /= xs.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

}  // namespace

TEST_CASE("one turn of the linear rotation has the closed-form return") {
  auto ps = polar_components(linear_field(rat(1, 10)), Weight{1, 1});

  SUBCASE("return value, angle span and clock") {
    Trajectory tr = integrate_turn(ps, 0.1);
    CHECK(tr.status == TurnStatus::completed);
    CHECK(tr.rho_end == doctest::Approx(0.1 * std::exp(0.2 * kPi)).epsilon(1e-9));
    CHECK(tr.phi_end == doctest::Approx(kTau).epsilon(1e-12));
    // the angular speed is exactly 1, so rescaled time equals the angle
    CHECK(tr.tau_end == doctest::Approx(kTau).epsilon(1e-9));
    CHECK(tr.phi_monotone());
    CHECK(tr.nodes.size() > 4);
    CHECK(tr.rho_at_phi(kPi) == doctest::Approx(0.1 * std::exp(0.1 * kPi)).epsilon(1e-8));
  }
  SUBCASE("accumulated functionals ride along") {
    std::vector<ExtraIntegrand> gs;
    gs.push_back([](double, double) { return 1.0; });
    gs.push_back([&](double phi, double rho) { return ps.angular(phi, rho); });
    Trajectory tr = integrate_turn(ps, 0.1, {}, gs);
    REQUIRE(tr.extras.size() == 2);
    CHECK(tr.extras[0] == doctest::Approx(tr.tau_end).epsilon(1e-10));
    CHECK(tr.extras[1] == doctest::Approx(kTau).epsilon(1e-9));
  }
  SUBCASE("two turns compose") {
    FlowOptions two;
    two.turns = 2;
    Trajectory tr = integrate_turn(ps, 0.1, two);
    CHECK(tr.status == TurnStatus::completed);
    CHECK(tr.phi_end == doctest::Approx(2 * kTau).epsilon(1e-12));
    ReturnMapSample once = poincare_map(ps, 0.1);
    ReturnMapSample twice = poincare_map(ps, once.rho1);
    CHECK(tr.rho_end == doctest::Approx(twice.rho1).epsilon(1e-9));
  }
  SUBCASE("zero damping returns exactly") {
    auto center = polar_components(linear_field(rat(0)), Weight{1, 1});
    ReturnMapSample s = poincare_map(center, 0.1);
    CHECK(s.status == TurnStatus::completed);
    CHECK(std::abs(s.diff) < 1e-12);
  }
  SUBCASE("negating the field renormalizes to the same turn") {
    auto psn = polar_components(negate(linear_field(rat(1, 10))), Weight{1, 1});
    CHECK(psn.time_reversed);
    ReturnMapSample s = poincare_map(psn, 0.1);
    CHECK(s.rho1 == doctest::Approx(0.1 * std::exp(0.2 * kPi)).epsilon(1e-9));
  }
  SUBCASE("bad start radius is rejected") {
    CHECK_THROWS_AS(integrate_turn(ps, 0.0), InputError);
    CHECK_THROWS_AS(integrate_turn(ps, -0.1), InputError);
  }
}

TEST_CASE("mirror image field inverts the return map") {
  // (x, y) -> (x, -y) conjugates the flow to the time reversal, so the mirror
  // field's return map is the inverse of the original one.
  auto X = andreev_field(rat(1), rat(-3), rat(0), rat(1), rat(-1), rat(1));
  auto Xm = andreev_field(rat(1), rat(3), rat(0), rat(-1), rat(-1), rat(-1));
  auto ps = polar_components(X, Weight{1, 2});
  auto psm = polar_components(Xm, Weight{1, 2});
  double rho0 = 0.05;
  ReturnMapSample fwd = poincare_map(ps, rho0);
  REQUIRE(fwd.status == TurnStatus::completed);
  ReturnMapSample back = poincare_map(psm, fwd.rho1);
  REQUIRE(back.status == TurnStatus::completed);
  CHECK(back.rho1 == doctest::Approx(rho0).epsilon(1e-8));
  // The turn is genuinely nonlinear, otherwise the check above is vacuous.
  CHECK(std::abs(fwd.diff) > 1e-5);
}

TEST_CASE("quasihomogeneous leading parts give exactly linear return maps") {
  SUBCASE("cubic Hamiltonian center") {
    VectorField X;
    X.P = poly({{0, 1, rat(1)}});
    X.Q = poly({{3, 0, rat(-1)}});
    auto ps = polar_components(X, Weight{1, 2});
    for (double rho0 : {0.05, 0.1, 0.2}) {
      ReturnMapSample s = poincare_map(ps, rho0);
      CHECK(s.status == TurnStatus::completed);
      CHECK(std::abs(s.diff) < 1e-10);
    }
  }
  SUBCASE("homogeneous-in-rho focus") {
    auto ps = polar_components(quasihom_field(rat(1), rat(1), rat(-1), rat(0)), Weight{1, 3});
    double eta1 = a1_closed_quadrature(ps);
    for (double rho0 : {0.02, 0.05, 0.1}) {
      ReturnMapSample s = poincare_map(ps, rho0);
      REQUIRE(s.status == TurnStatus::completed);
      CHECK(s.rho1 / s.rho0 == doctest::Approx(eta1).epsilon(1e-8));
    }
    Eta1Estimate est = eta1_estimate(ps, geometric_grid(0.01, 0.1, 6));
    CHECK(est.conclusive);
    CHECK(est.value == doctest::Approx(eta1).epsilon(1e-6));
  }
}

TEST_CASE("turn verdicts for escaping and collapsing radii") {
  SUBCASE("fast outward spiral escapes the trust region") {
    auto ps = polar_components(linear_field(rat(2)), Weight{1, 1});
    ReturnMapSample s = poincare_map(ps, 0.4);
    CHECK(s.status == TurnStatus::escaped);
    CHECK_FALSE(s.diagnostic.empty());
  }
  SUBCASE("fast inward spiral hits the radius floor") {
    auto ps = polar_components(linear_field(rat(-5)), Weight{1, 1});
    FlowOptions opt;
    opt.rho_floor = 1e-12;
    ReturnMapSample s = poincare_map(ps, 1e-10, opt);
    CHECK(s.status == TurnStatus::stalled);
    CHECK_FALSE(s.diagnostic.empty());
  }
  SUBCASE("eta1 grid reports failures") {
    auto ps = polar_components(linear_field(rat(2)), Weight{1, 1});
    Eta1Estimate est = eta1_estimate(ps, {0.45, 0.4, 0.35});
    CHECK_FALSE(est.conclusive);
    CHECK_FALSE(est.note.empty());
  }
}

TEST_CASE("return map coefficients of the linear rotation") {
  auto ps = polar_components(linear_field(rat(1, 10)), Weight{1, 1});
  BautinCoefficients bc = bautin_coefficients(ps, 4, 1024);
  REQUIRE(bc.eta.size() == 4);
  CHECK(bc.eta[0] == doctest::Approx(std::exp(0.2 * kPi)).epsilon(1e-10));
  CHECK(std::abs(bc.eta[1]) < 1e-12);
  CHECK(std::abs(bc.eta[2]) < 1e-12);
  CHECK(std::abs(bc.eta[3]) < 1e-12);
  CHECK(bc.a_at(1, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bc.a_at(2, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(bc.a_at(1, kPi) == doctest::Approx(std::exp(0.1 * kPi)).epsilon(1e-10));
  CHECK(bc.a_at(1, kTau) == doctest::Approx(bc.eta[0]).epsilon(1e-12));
}

TEST_CASE("first return coefficient matches its quadrature closed forms") {
  SUBCASE("nilpotent cubic") {
    auto ps = polar_components(andreev_field(rat(1), rat(-3), rat(0), rat(1), rat(-1), rat(1)),
                               Weight{1, 2});
    BautinCoefficients bc = bautin_coefficients(ps, 2, 4096);
    for (int j = 0; j <= 32; ++j) {
      double phi = kTau * j / 32;
      double closed =
          std::pow(2.0, 0.75) / std::pow(11.0 - 4 * std::cos(2 * phi) + std::cos(4 * phi), 0.25);
      CHECK(bc.a_at(1, phi) == doctest::Approx(closed).epsilon(1e-9));
      CHECK(a1_closed_at(ps, phi) == doctest::Approx(closed).epsilon(1e-10));
    }
    CHECK(bc.eta[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a1_closed_quadrature(ps) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("quintic-cubic field on weights (2,3)") {
    auto ps = polar_components(algaba_field(rat(1, 5), rat(1), rat(1)), Weight{2, 3});
    BautinCoefficients bc = bautin_coefficients(ps, 2, 4096);
    for (int j = 0; j <= 32; ++j) {
      double phi = kTau * j / 32;
      // after orientation normalization the leading angular speed is the
      // positive quantity whose -1/12 power scales the coefficient
      double closed = std::pow(2.0, 1.0 / 12.0) / std::pow(ps.angular_leading(phi), 1.0 / 12.0);
      CHECK(bc.a_at(1, phi) == doctest::Approx(closed).epsilon(1e-8));
      CHECK(a1_closed_at(ps, phi) == doctest::Approx(closed).epsilon(1e-9));
    }
    CHECK(bc.eta[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a1_closed_quadrature(ps) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("second return coefficient vanishes with the designated parameter") {
  // the quadratic coefficient of the nilpotent cubic family is proportional
  // to the x^2 y coefficient of the second component
  auto off = polar_components(andreev_field(rat(1), rat(-3), rat(0), rat(0), rat(-1), rat(1)),
                              Weight{1, 2});
  BautinCoefficients bco = bautin_coefficients(off, 3, 4096);
  double worst = 0.0;
  for (int j = 0; j <= 64; ++j)
    worst = std::max(worst, std::abs(bco.a_at(2, kTau * j / 64)));
  CHECK(worst < 1e-9);
  CHECK(std::abs(bco.eta[1]) < 1e-9);
  CHECK(std::abs(bco.eta[2]) < 1e-8);

  auto on = polar_components(andreev_field(rat(1), rat(-3), rat(0), rat(1), rat(-1), rat(1)),
                             Weight{1, 2});
  BautinCoefficients bcn = bautin_coefficients(on, 2, 4096);
  CHECK(std::abs(bcn.eta[1]) > 1e-3);
}

TEST_CASE("return map expansion truncates with the right error order") {
  auto ps = polar_components(andreev_field(rat(1), rat(-3), rat(0), rat(1), rat(-1), rat(1)),
                             Weight{1, 2});
  const int k = 3;
  BautinCoefficients bc = bautin_coefficients(ps, k, 4096);
  std::vector<double> lx, ly;
  for (double rho0 : geometric_grid(0.01, 0.08, 6)) {
    ReturnMapSample s = poincare_map(ps, rho0);
    REQUIRE(s.status == TurnStatus::completed);
    double pred = 0.0;
    for (int i = k; i >= 1; --i) pred = (pred + bc.eta[i - 1]) * rho0;
    double res = std::abs(s.rho1 - pred);
    REQUIRE(res > 1e-12);  // stay above integrator noise, else the fit is void
    lx.push_back(std::log(rho0));
    ly.push_back(std::log(res));
  }
  CHECK(slope_fit(lx, ly) >= k + 0.7);
}

TEST_CASE("expansion consistency between quadrature and direct integration") {
  std::vector<PolarSystem> systems;
  systems.push_back(polar_components(linear_field(rat(1, 10)), Weight{1, 1}));
  systems.push_back(polar_components(
      andreev_field(rat(1), rat(-3), rat(0), rat(1), rat(-1), rat(1)), Weight{1, 2}));
  systems.push_back(polar_components(algaba_field(rat(1, 5), rat(1), rat(1)), Weight{2, 3}));
  systems.push_back(
      polar_components(quasihom_field(rat(1), rat(1), rat(-1), rat(0)), Weight{1, 3}));
  systems.push_back(
      polar_components(quasihom_field(rat(0), rat(1), rat(-1), rat(0)), Weight{1, 3}));
  for (const auto& ps : systems) {
    BautinCoefficients bc = bautin_coefficients(ps, 1, 4096);
    CHECK(a1_closed_quadrature(ps) == doctest::Approx(bc.eta[0]).epsilon(1e-9));
  }
}

TEST_CASE("expansion refuses systems with characteristic directions") {
  auto ps = polar_components(manyosa1_field(rat(1)), Weight{1, 1});
  CHECK_FALSE(mo_class_test(ps).in_mo);
  CHECK_THROWS_AS(bautin_coefficients(ps, 2, 1024), InputError);
  CHECK_THROWS_AS(a1_closed_quadrature(ps), InputError);
}

TEST_CASE("slope of the return map for flows that brush characteristic directions") {
  // these weights carry angular zeros of the leading term, so the slope at 0
  // is only reachable by direct integration and extrapolation; turns swing
  // far out before returning, hence the wide trust window
  Eta1Options opt;
  opt.flow.trust_radius = 1e6;
  opt.flow.max_tau = 1e13;
  opt.flow.abs_tol = 1e-13;
  opt.flow.rel_tol = 1e-11;
  SUBCASE("monodromic family I at the parameter with closed-form slope") {
    for (int a : {0, 1}) {
      auto ps = polar_components(manyosa1_field(rat(a)), Weight{1, 1});
      double delta = 32.0 - (1.0 + 3 * a) * (1.0 + 3 * a);
      double expected = std::exp(kPi + 4 * kPi * a / std::sqrt(delta));
      Eta1Estimate est = eta1_estimate(ps, geometric_grid(1e-3, 3e-2, 6), opt);
      REQUIRE(est.samples.size() >= 4);
      CHECK(est.value == doctest::Approx(expected).epsilon(1e-3));
    }
  }
  SUBCASE("monodromic family I at the slope-one parameter") {
    auto ps = polar_components(manyosa1_field(rat(-31, 25)), Weight{1, 1});
    Eta1Estimate est = eta1_estimate(ps, geometric_grid(1e-3, 3e-2, 6), opt);
    REQUIRE(est.samples.size() >= 4);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("monodromic family II crosses saddle corners through partner charts") {
    // a single chart cannot carry a turn past the corner directions here: the
    // orbit clings to an axis at radii far below double precision resolution
    // when seen from the starting chart, so the estimate must hand the orbit
    // across the diagram's other chart and back
    VectorField X = manyosa2_field(rat(1));
    auto ps = polar_components(X, Weight{1, 1});
    double expected = std::exp(10 * kPi / (9 * std::sqrt(3.0)));
    Eta1Estimate est = eta1_estimate(ps, X, geometric_grid(1e-3, 3e-2, 8), opt);
    REQUIRE(est.samples.size() >= 4);
    CHECK(est.conclusive);
    CHECK(est.value == doctest::Approx(expected).epsilon(1e-3));
  }
  SUBCASE("family with a pole of the slope at every characteristic direction") {
    VectorField X = armengol_field(rat(1), rat(1));
    auto ps = polar_components(X, Weight{1, 1});
    double expected = std::exp(2.0 * kPi / std::sqrt(3.0));
    Eta1Estimate est = eta1_estimate(ps, X, geometric_grid(3e-5, 3e-3, 8), opt);
    REQUIRE(est.samples.size() >= 4);
    CHECK(est.value == doctest::Approx(expected).epsilon(1e-2));
  }
}

TEST_CASE("sections are placed away from slope poles") {
  SUBCASE("double zeros of the angular term with slower radial vanishing are poles") {
    VectorField X = manyosa2_field(rat(1));
    auto ps11 = polar_components(X, Weight{1, 1});
    auto poles11 = section_poles(ps11);
    REQUIRE(poles11.size() == 2);
    CHECK(poles11[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(poles11[1] == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(transverse_section(ps11) == doctest::Approx(kPi / 2).epsilon(1e-6));

    auto ps13 = polar_components(X, Weight{1, 3});
    auto poles13 = section_poles(ps13);
    REQUIRE(poles13.size() == 2);
    CHECK(poles13[0] == doctest::Approx(kPi / 2).epsilon(1e-9));
    CHECK(poles13[1] == doctest::Approx(3 * kPi / 2).epsilon(1e-9));
    CHECK(std::abs(std::remainder(transverse_section(ps13), kPi)) < 1e-6);
  }
  SUBCASE("characteristic directions the radial term also kills are not poles") {
    auto ps = polar_components(manyosa1_field(rat(1)), Weight{1, 1});
    REQUIRE_FALSE(ps.omega.empty());
    CHECK(section_poles(ps).empty());
    CHECK(transverse_section(ps) == 0.0);
  }
}

TEST_CASE("return ratios on different sections obey the corner conjugation power") {
  // crossing a corner between charts of weights (1,1) and (1,3) conjugates
  // the return map by a cube root, so the slope measured on the x axis is
  // the cube of the slope measured on a transverse ray
  VectorField X = manyosa2_field(rat(1));
  NewtonDiagram nd = newton_diagram(X);
  std::vector<PolarSystem> charts;
  std::size_t sec11 = 0, sec13 = 0;
  for (const auto& e : nd.edges) {
    if (e.w == Weight{1, 1}) sec11 = charts.size();
    if (e.w == Weight{1, 3}) sec13 = charts.size();
    charts.push_back(polar_components(X, e.w));
  }
  REQUIRE(charts.size() == 2);

  double transverse = std::exp(10 * kPi / (9 * std::sqrt(3.0)));
  FlowOptions fo;
  fo.phi_start = transverse_section(charts[sec11]);
  AtlasTurn turn = integrate_turn_atlas(charts, sec11, 1e-3, fo);
  REQUIRE(turn.status == TurnStatus::completed);
  CHECK(turn.handoffs >= 2);
  CHECK(turn.rho_return / 1e-3 == doctest::Approx(transverse).epsilon(2e-3));

  // on the x axis the ratio is still climbing toward its limit at any radius
  // double precision can start from, so bracket it instead
  double cube = transverse * transverse * transverse;
  FlowOptions fx;
  fx.phi_start = transverse_section(charts[sec13]);
  double prev = 0.0;
  for (double r0 : {3e-4, 1e-4, 3e-5}) {
    AtlasTurn s = integrate_turn_atlas(charts, sec13, r0, fx);
    REQUIRE(s.status == TurnStatus::completed);
    double ratio = s.rho_return / r0;
    CHECK(ratio > prev);
    CHECK(ratio < cube * 1.001);
    prev = ratio;
  }
  CHECK(prev > 0.8 * cube);
}

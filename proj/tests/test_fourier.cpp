#include <cmath>
#include <random>

#include "doctest.h"

#include "centerfocus/fourier.hpp"

using namespace cf;

namespace {
constexpr double kPi = 3.14159265358979323846;

BiPolyQ random_poly(std::mt19937& rng, int max_deg, int terms) {
  std::uniform_int_distribution<int> ed(0, max_deg), cd(-5, 5), dd(1, 3);
  BiPolyQ p;
  for (int t = 0; t < terms; ++t) p.add_term(ed(rng), ed(rng), rat(cd(rng), dd(rng)));
  return p;
}
}  // namespace

TEST_CASE("trig substitution of x^2 + 3 y^2") {
  BiPolyQ f = BiPolyQ::term(2, 0, rat(1)) + BiPolyQ::term(0, 2, rat(3));
  FourierPoly tf = trig_substitute(f);
  // cos^2 + 3 sin^2 = 2 - cos(2 phi)
  CHECK(tf.coeff(0) == GaussianRational(rat(2)));
  CHECK(tf.coeff(2) == GaussianRational(rat(-1, 2)));
  CHECK(tf.coeff(-2) == GaussianRational(rat(-1, 2)));
  CHECK(tf.coeff(1) == GaussianRational());
  CHECK(tf.is_real());
  CHECK(tf.degree() == 2);
}

TEST_CASE("trig substitution is a ring homomorphism") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 8; ++trial) {
    BiPolyQ f = random_poly(rng, 3, 4), g = random_poly(rng, 3, 4);
    CHECK(trig_substitute(f * g) == trig_substitute(f) * trig_substitute(g));
    CHECK(trig_substitute(f + g) == trig_substitute(f) + trig_substitute(g));
    // and matches direct evaluation on the circle
    FourierPoly tf = trig_substitute(f);
    for (int s = 0; s < 16; ++s) {
      double phi = 2 * kPi * s / 16.0 + 0.05;
      CHECK(tf.eval(phi) ==
            doctest::Approx(eval_double(f, std::cos(phi), std::sin(phi))).epsilon(1e-12));
    }
  }
}

TEST_CASE("fourier eval compiled form matches exact evaluation") {
  std::mt19937 rng(17);
  BiPolyQ f = random_poly(rng, 5, 7);
  FourierPoly tf = trig_substitute(f);
  FourierEval fe(tf);
  for (int s = 0; s < 64; ++s) {
    double phi = 2 * kPi * s / 64.0;
    CHECK(fe(phi) == doctest::Approx(tf.eval(phi)).epsilon(1e-12));
  }
}

TEST_CASE("derivative in the fourier basis") {
  FourierPoly c = FourierPoly::cosine();
  FourierPoly minus_sin = c.derivative();
  CHECK(minus_sin == -FourierPoly::sine());
  for (double phi : {0.3, 1.7, 4.4})
    CHECK(minus_sin.eval(phi) == doctest::Approx(-std::sin(phi)).epsilon(1e-14));
}

TEST_CASE("circle roots: simple and multiple zeros") {
  // sin phi: zeros 0 and pi, both simple
  FourierPoly s = FourierPoly::sine();
  auto roots = circle_roots(s);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].angle == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(roots[0].multiplicity == 1);
  CHECK(roots[1].angle == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(roots[1].multiplicity == 1);

  // y^2 (4 x^2 + y^2) on the circle: double zeros at 0 and pi
  BiPolyQ g = BiPolyQ::term(2, 2, rat(4)) + BiPolyQ::term(0, 4, rat(1));
  auto roots2 = circle_roots(trig_substitute(g));
  REQUIRE(roots2.size() == 2);
  CHECK(roots2[0].angle == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(roots2[0].multiplicity == 2);
  CHECK(roots2[1].angle == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(roots2[1].multiplicity == 2);

  // 2 - cos(2 phi) never vanishes
  BiPolyQ pd = BiPolyQ::term(2, 0, rat(1)) + BiPolyQ::term(0, 2, rat(3));
  CHECK(circle_roots(trig_substitute(pd)).empty());

  CHECK_THROWS_AS(circle_roots(FourierPoly()), InputError);
}

TEST_CASE("circle roots: sign consistency on a 720 grid") {
  // f = sin(phi) * (2 - cos 2 phi) * (1 - cos(phi))  -- simple zeros at 0(x2... )
  // Build as polynomial image: y (x^2+3y^2) has zeros at 0, pi with odd mult.
  BiPolyQ f = BiPolyQ::term(2, 1, rat(1)) + BiPolyQ::term(0, 3, rat(3));
  FourierPoly tf = trig_substitute(f);
  auto roots = circle_roots(tf);
  REQUIRE(roots.size() == 2);
  int sign_changes = 0;
  double prev = tf.eval(2 * kPi * 0.5 / 720.0);
  for (int s = 1; s <= 720; ++s) {
    double phi = 2 * kPi * (s + 0.5) / 720.0;
    double v = tf.eval(phi);
    double mind = 1e9;
    for (auto& r : roots)
      for (int w = -1; w <= 1; ++w) mind = std::min(mind, std::abs(phi - r.angle - 2 * kPi * w));
    if (mind > 1e-2) CHECK(std::abs(v) > 1e-10);
    if ((v < 0) != (prev < 0)) ++sign_changes;
    prev = v;
  }
  CHECK(sign_changes == 2);  // one per odd-multiplicity root
}

TEST_CASE("circle sign classification") {
  BiPolyQ pos = BiPolyQ::term(2, 0, rat(1)) + BiPolyQ::term(0, 2, rat(3));
  auto cs = circle_sign(trig_substitute(pos));
  CHECK(cs.kind == CircleSignKind::positive);
  CHECK(cs.strict);

  // y^2(4x^2+y^2): nonnegative with double zeros
  BiPolyQ semi = BiPolyQ::term(2, 2, rat(4)) + BiPolyQ::term(0, 4, rat(1));
  cs = circle_sign(trig_substitute(semi));
  CHECK(cs.kind == CircleSignKind::positive);
  CHECK_FALSE(cs.strict);
  CHECK(cs.roots.size() == 2);

  cs = circle_sign(-trig_substitute(semi));
  CHECK(cs.kind == CircleSignKind::negative);

  cs = circle_sign(FourierPoly::sine());
  CHECK(cs.kind == CircleSignKind::mixed);
}

TEST_CASE("root set is invariant under the angle convention shift") {
  BiPolyQ g = BiPolyQ::term(2, 2, rat(4)) + BiPolyQ::term(0, 4, rat(1));
  FourierPoly tf = trig_substitute(g);
  auto base = circle_roots(tf);
  auto shifted = circle_roots(tf.shifted_by_pi());
  REQUIRE(base.size() == shifted.size());
  // phi* is a root of f(phi + pi) iff phi* + pi is a root of f.
  for (auto& r : shifted) {
    double mapped = std::fmod(r.angle + kPi, 2 * kPi);
    bool found = false;
    for (auto& b : base)
      found = found || std::abs(b.angle - mapped) < 1e-9 ||
              std::abs(std::abs(b.angle - mapped) - 2 * kPi) < 1e-9;
    CHECK(found);
  }
}

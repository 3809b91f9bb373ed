#include <random>

#include "doctest.h"

#include "centerfocus/bipoly.hpp"
#include "centerfocus/series.hpp"

using namespace cf;

namespace {

BiPolyQ random_poly(std::mt19937& rng, int max_deg, int terms) {
  std::uniform_int_distribution<int> ed(0, max_deg), cd(-6, 6), dd(1, 4);
  BiPolyQ p;
  for (int t = 0; t < terms; ++t) p.add_term(ed(rng), ed(rng), rat(cd(rng), dd(rng)));
  return p;
}

Series<Rational> random_series(std::mt19937& rng, int order, bool unit_lead) {
  std::uniform_int_distribution<int> cd(-5, 5), dd(1, 3);
  auto s = Series<Rational>::zero(order);
  for (int k = 0; k <= order; ++k) s.c[static_cast<size_t>(k)] = rat(cd(rng), dd(rng));
  if (unit_lead && s.c[0].is_zero()) s.c[0] = rat(1);
  return s;
}

}  // namespace

TEST_CASE("bipoly arithmetic and calculus") {
  // f = x^2 y - 3/2 y^3
  BiPolyQ f = BiPolyQ::term(2, 1, rat(1)) + BiPolyQ::term(0, 3, rat(-3, 2));
  CHECK(f.coeff(2, 1) == rat(1));
  CHECK(f.dx() == BiPolyQ::term(1, 1, rat(2)));
  CHECK(f.dy() == BiPolyQ::term(2, 0, rat(1)) + BiPolyQ::term(0, 2, rat(-9, 2)));
  BiPolyQ g = f - f;
  CHECK(g.empty());
  CHECK(eval_double(f, 2.0, 1.0) == doctest::Approx(4.0 - 1.5));

  // product against a hand expansion: (x+y)(x-y) = x^2 - y^2
  BiPolyQ xpy = BiPolyQ::term(1, 0, rat(1)) + BiPolyQ::term(0, 1, rat(1));
  BiPolyQ xmy = BiPolyQ::term(1, 0, rat(1)) + BiPolyQ::term(0, 1, rat(-1));
  CHECK(xpy * xmy == BiPolyQ::term(2, 0, rat(1)) + BiPolyQ::term(0, 2, rat(-1)));
}

TEST_CASE("series division example and order bookkeeping") {
  // (t^2 + t^3)/t^2 = 1 + t
  auto a = Series<Rational>::monomial(2, rat(1), 6) + Series<Rational>::monomial(3, rat(1), 6);
  auto b = Series<Rational>::monomial(2, rat(1), 6);
  auto q = series_div(a, b);
  CHECK(q.order == 4);  // min(6,6) - val(b)
  CHECK(q.coeff(0) == rat(1));
  CHECK(q.coeff(1) == rat(1));
  CHECK(q.coeff(2) == rat(0));

  // mul order: orders 5 and 7 with valuations 1 and 2 -> min(5+2, 7+1) = 7
  auto u = Series<Rational>::monomial(1, rat(1), 5);
  auto v = Series<Rational>::monomial(2, rat(3), 7);
  CHECK((u * v).order == 7);
  CHECK((u + v).order == 5);

  CHECK_THROWS_AS(series_div(u, v), NumericError);  // negative valuation
}

TEST_CASE("series mul/div round trip is exact over rationals") {
  std::mt19937 rng(20240817);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_series(rng, 12, false);
    auto b = random_series(rng, 12, true);  // unit so val(b) = 0
    auto q = series_div(a * b, b);
    int check_to = std::min(q.order, a.order);
    for (int k = 0; k <= check_to; ++k) CHECK(q.coeff(k) == a.coeff(k));
  }
}

TEST_CASE("series composition identity and derivative") {
  std::mt19937 rng(7);
  auto a = random_series(rng, 9, false);
  auto t = Series<Rational>::monomial(1, rat(1), 9);
  auto c = series_compose(a, t);
  CHECK(c.order == 9);
  for (int k = 0; k <= 9; ++k) CHECK(c.coeff(k) == a.coeff(k));

  auto d = series_derivative(a);
  CHECK(d.order == 8);
  for (int k = 0; k <= 8; ++k) CHECK(d.coeff(k) == a.coeff(k + 1) * rat(k + 1));
}

TEST_CASE("series base denominator alignment") {
  // t = x^{1/2}: series in x joined with series in x^{1/2}
  auto in_x = Series<Rational>::monomial(1, rat(2), 3, 1);       // 2x
  auto in_t = Series<Rational>::monomial(1, rat(1), 6, 2);       // x^{1/2}
  auto sum = in_x + in_t;
  CHECK(sum.base_den == 2);
  CHECK(sum.coeff(1) == rat(1));
  CHECK(sum.coeff(2) == rat(2));
}

TEST_CASE("random polynomial product evaluates consistently") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    BiPolyQ f = random_poly(rng, 4, 5), g = random_poly(rng, 4, 5);
    BiPolyQ h = f * g;
    double x = 0.37 + 0.1 * trial, y = -0.83 + 0.05 * trial;
    CHECK(eval_double(h, x, y) ==
          doctest::Approx(eval_double(f, x, y) * eval_double(g, x, y)).epsilon(1e-12));
  }
}

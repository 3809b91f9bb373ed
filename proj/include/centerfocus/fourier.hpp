#pragma once

#include <complex>
#include <map>
#include <vector>

#include "centerfocus/bipoly.hpp"
#include "centerfocus/rational.hpp"

namespace cf {

// Trigonometric polynomial sum_k c_k e^{i k phi} with exact Q(i) coefficients.
// Real-valued polys satisfy c_{-k} = conj(c_k); that property is tracked
// exactly, not assumed.
class FourierPoly {
 public:
  FourierPoly() = default;

  static FourierPoly constant(Rational v) {
    FourierPoly f;
    f.add_term(0, GaussianRational(std::move(v)));
    return f;
  }
  // cos phi = (z + z^-1)/2, sin phi = -i(z - z^-1)/2 with z = e^{i phi}
  static FourierPoly cosine();
  static FourierPoly sine();

  void add_term(int k, GaussianRational c) {
    if (is_zero(c)) return;
    auto [it, fresh] = c_.try_emplace(k, c);
    if (!fresh) {
      it->second += c;
      if (is_zero(it->second)) c_.erase(it);
    }
  }

  const std::map<int, GaussianRational>& terms() const { return c_; }
  bool is_zero_poly() const { return c_.empty(); }
  int degree() const;  // max |k| with c_k != 0; -1 for the zero poly
  bool is_real() const;

  GaussianRational coeff(int k) const {
    auto it = c_.find(k);
    return it == c_.end() ? GaussianRational() : it->second;
  }

  FourierPoly operator-() const;
  friend FourierPoly operator+(const FourierPoly& a, const FourierPoly& b);
  friend FourierPoly operator-(const FourierPoly& a, const FourierPoly& b);
  friend FourierPoly operator*(const FourierPoly& a, const FourierPoly& b);
  FourierPoly scaled(const GaussianRational& s) const;
  FourierPoly derivative() const;  // d/dphi
  // phi -> phi + delta for rational multiples of pi is not representable
  // exactly in this basis except for delta = pi; that one is.
  FourierPoly shifted_by_pi() const;  // phi -> phi + pi, i.e. c_k *= (-1)^k

  std::complex<double> eval_complex(double phi) const;
  double eval(double phi) const;  // requires is_real()

  bool operator==(const FourierPoly&) const = default;

 private:
  std::map<int, GaussianRational> c_;
};

// Exact image of a polynomial under x -> cos phi, y -> sin phi.
// Ring homomorphism: trig_substitute(f*g) == trig_substitute(f)*trig_substitute(g).
FourierPoly trig_substitute(const BiPolyQ& f);

// Numeric form compiled once for hot evaluation loops:
// f = a0 + sum a_k cos(k phi) + b_k sin(k phi).
struct FourierEval {
  std::vector<double> a, b;  // a[k], b[k]; b[0] unused
  FourierEval() = default;
  explicit FourierEval(const FourierPoly& f);
  double operator()(double phi) const;
};

struct CircleRoot {
  double angle = 0.0;  // in [0, 2 pi)
  int multiplicity = 1;
};

// Real zeros of a real trig polynomial on the circle.  The substitution
// z = e^{i phi} turns f into a Laurent polynomial; after clearing z powers
// the factors of each multiplicity are split off exactly (Yun over Q(i)),
// their roots found numerically and filtered to |z| = 1.  Odd-multiplicity
// roots are refined by bisection on the sign change of f itself.
// Throws InputError when f vanishes identically.
std::vector<CircleRoot> circle_roots(const FourierPoly& f, double tol = 1e-8);

enum class CircleSignKind { positive, negative, mixed, identically_zero };

struct CircleSign {
  CircleSignKind kind = CircleSignKind::identically_zero;
  std::vector<CircleRoot> roots;  // zeros on the circle (empty for strict sign)
  bool strict = false;            // no zeros at all
};

// Sign classification of a real trig polynomial: positive/negative mean the
// sign is constant away from (possibly empty) even-multiplicity zeros.
CircleSign circle_sign(const FourierPoly& f, double tol = 1e-8);

}  // namespace cf

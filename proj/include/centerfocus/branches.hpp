#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "centerfocus/diagram.hpp"
#include "centerfocus/unipoly.hpp"

namespace cf {

enum class DetProvenance { from_field, from_curve };

// Univariate polynomial in eta whose nonzero roots are the admissible leading
// coefficients alpha0 of invariant branches y = alpha0 x^{q/p} + ... for one
// diagram edge.
struct DeterminingPolynomial {
  UniPoly<Rational> coeffs;        // as defined; may carry an eta^valuation factor
  UniPoly<Rational> nonzero_part;  // coeffs / eta^valuation; its roots are the candidates
  int valuation = 0;
  DetProvenance provenance = DetProvenance::from_field;
  Weight w;
  int order = 0;            // leading degree r (from_field) or curve order s (from_curve)
  bool degenerate = false;  // identically zero: every leading coefficient admissible
};

// (q/p) eta P_{p+r}(1,eta) - Q_{q+r}(1,eta), exact.  The root set is the
// contract; the polynomial itself is fixed only up to the sign convention.
DeterminingPolynomial q_polynomial(const QHDecomposition& d);

// Leading form of F on the edge of its own Newton polygon selected by the
// weights: F_s(1,eta) = eta^{m1} P(eta).  Throws InputError when F = 0 or the
// weights do not select an edge (single support point at that grading).
DeterminingPolynomial p_polynomial_from_curve(const BiPolyQ& F, Weight w);

enum class FuchsVerdict { n_equals_p, general_theory_needed, degenerate };

const char* fuchs_verdict_name(FuchsVerdict v);

// Linearization of the dominant balance at alpha0 x^{q/p}: V(j) = slope j +
// offset.  The coefficient recursion of extend_branch degenerates exactly at
// step m = p * root(V).
struct FuchsIndex {
  std::complex<double> slope{0.0, 0.0};
  std::complex<double> offset{0.0, 0.0};
  std::optional<std::complex<double>> index;  // root of V when slope != 0
  FuchsVerdict verdict = FuchsVerdict::degenerate;
  std::string note;  // how the rationality heuristic decided
};

// verdict n_equals_p iff the index is not a positive non-integer rational;
// rationality is decided by continued fractions (denominator cap 64,
// tolerance 1e-10) and irrational-looking indices count as clear.
FuchsIndex fuchs_index(const QHDecomposition& d, std::complex<double> alpha0);

struct Branch {
  Weight w;
  int r = 0;
  int n = 0;  // series index: exponents are (q+m)/n with n = p for simple branches
  int M = 0;  // coefficients solved through alpha_M
  std::vector<std::complex<double>> alpha;    // alpha[m], m = 0..M
  bool exact = false;                         // coefficients live in Q(i)
  std::vector<GaussianRational> alpha_exact;  // parallel to alpha when exact
};

// Solve the invariance equation P(x,y) y' = Q(x,y) order by order for
// y = sum_m alpha_m x^{(q+m)/p} starting from a root alpha0 of the
// determining polynomial.  Runs exactly over Q(i) when alpha0 rationalizes
// to a verified exact root, in complex doubles otherwise.  Throws
// NumericError when a step's linear coefficient vanishes (resonant Fuchs
// index), naming the offending order.
Branch extend_branch(const VectorField& X, const QHDecomposition& d, std::complex<double> alpha0,
                     int M);
Branch extend_branch(const VectorField& X, const QHDecomposition& d,
                     const GaussianRational& alpha0, int M);

Branch conjugate_branch(const Branch& b);

// Residual coefficients of the invariance equation through the solved range,
// scaled by the largest intermediate term; all entries should be ~0.
std::vector<double> branch_residual(const VectorField& X, const Branch& b);

struct AssembleOptions {
  double drop_tol = 1e-9;         // relative forgiveness for residue that must cancel
  double termination_tol = 1e-11;  // relative tail threshold for polynomial detection
  int termination_window = 10;     // vanishing orders required beyond the support
  long long rational_max_den = 1000000;
};

struct CurveCandidate {
  Weight w;
  int s = 0;         // quasihomogeneous order of the leading form
  int valid_to = 0;  // components trustworthy through this weighted degree
  BiPolyD F;         // truncated curve, numeric view
  std::optional<BiPolyQ> F_exact;  // exact jet (exact branches) or recognized polynomial
  BiPolyD leading_form;            // F_s
  std::optional<BiPolyQ> leading_form_exact;
  bool exact_polynomial = false;  // tail beyond the support vanished over a full window
  // Nonempty when the curve cannot feed the integral identity: the leading
  // form vanishes somewhere on the circle (a real branch direction).
  std::string rejection;
  std::vector<double> circle_zero_angles;  // where the leading form vanishes, if anywhere
};

// Expanded product over (y - y_i)^{mult_i}.  The list must be closed under
// complex conjugation; all fractional x-powers must cancel.
CurveCandidate assemble_curve(const std::vector<std::pair<Branch, int>>& branches,
                              const AssembleOptions& opt = {});

struct Cofactor {
  Weight w;
  int rbar = -1;     // leading degree of K; -1 when K vanishes through valid_to
  int valid_to = 0;  // K components trustworthy through this weighted degree
  BiPolyD K;
  std::optional<BiPolyQ> K_exact;
  BiPolyD leading_form;  // K_rbar
  std::optional<BiPolyQ> leading_form_exact;
  bool exact_polynomial = false;
  std::map<int, BiPolyD> components;
};

// K with X(F) = K F.  Polynomial candidates use exact division with an exact
// multiply-back check; truncated candidates use graded division degree by
// degree.  Throws NumericError when division leaves a remainder (F not
// invariant at this truncation).
Cofactor extract_cofactor(const VectorField& X, const CurveCandidate& curve,
                          double division_tol = 1e-8);

}  // namespace cf

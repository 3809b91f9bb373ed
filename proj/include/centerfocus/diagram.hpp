#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "centerfocus/bipoly.hpp"

namespace cf {

// Planar polynomial vector field P(x,y) d/dx + Q(x,y) d/dy, exact coefficients.
struct VectorField {
  BiPolyQ P, Q;
};

// Coprime positive weights (p,q) attached to a diagram edge.
struct Weight {
  int p = 1, q = 1;
  bool operator==(const Weight&) const = default;
  bool operator<(const Weight& o) const { return std::pair(p, q) < std::pair(o.p, o.q); }
};

using GridPoint = std::pair<int, int>;  // (i, j)

struct DiagramEdge {
  GridPoint from, to;  // vertices with from.i < to.i, from.j > to.j
  Weight w;            // q/p = slope data: p = dj, q = di reduced
  int ell = 0;         // p*i + q*j along the edge
  int r = 0;           // ell - p - q, leading quasihomogeneous degree
  std::vector<GridPoint> points;  // support points lying on the edge
};

// Lower-left boundary of the convex hull of support + R^2_{>=0}: the finite
// polygon only; rays are represented by the two flags (rays lying on a
// coordinate axis are not part of the diagram).
struct NewtonDiagram {
  std::vector<GridPoint> support;
  std::vector<GridPoint> vertices;
  std::vector<DiagramEdge> edges;
  bool vertical_ray_in_diagram = false;    // leftmost vertex has i > 0
  bool horizontal_ray_in_diagram = false;  // rightmost vertex has j > 0
  std::vector<std::string> warnings;
};

// Shifted support: P-monomial x^m y^n contributes (m, n+1), Q-monomial
// contributes (m+1, n).  Throws InputError on the zero field.
std::vector<GridPoint> vector_support(const VectorField& X);

NewtonDiagram newton_diagram(const VectorField& X);

// Quasihomogeneous components of X for weights (p,q): X = sum_{j>=r} X_j with
// X_j = P_{p+j} d/dx + Q_{q+j} d/dy, where a P-monomial x^m y^n has degree
// p m + q n - p and a Q-monomial has degree p m + q n - q.
struct QHDecomposition {
  Weight w;
  int r = 0;  // smallest degree with a nonzero component
  std::map<int, std::pair<BiPolyQ, BiPolyQ>> comps;  // j -> (P_{p+j}, Q_{q+j})

  const BiPolyQ* P_at(int j) const {
    auto it = comps.find(j);
    return it == comps.end() ? nullptr : &it->second.first;
  }
  const BiPolyQ* Q_at(int j) const {
    auto it = comps.find(j);
    return it == comps.end() ? nullptr : &it->second.second;
  }
};

QHDecomposition qh_decompose(const VectorField& X, Weight w);

// V = p x Q_{q+r} - q y P_{p+r}: inverse integrating factor of the leading
// quasihomogeneous part.
BiPolyQ inverse_integrating_factor(const QHDecomposition& d);

// Exact quotient f/g when it exists.
template <class K>
std::optional<BiPoly<K>> bipoly_exact_divide(BiPoly<K> f, const BiPoly<K>& g);

// Non-constant gcd of P and Q over Q[x,y] (nullopt when coprime or when
// either is zero).  Used to detect non-isolated singularities.
std::optional<BiPolyQ> common_factor(const BiPolyQ& P, const BiPolyQ& Q);

}  // namespace cf

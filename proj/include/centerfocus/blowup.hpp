#pragma once

#include <optional>
#include <vector>

#include "centerfocus/diagram.hpp"
#include "centerfocus/fourier.hpp"

namespace cf {

enum class Orientation { counterclockwise, clockwise, mixed };

const char* orientation_name(Orientation o);

// Weighted polar image of the field for one edge weight: after
// x = rho^p cos(phi), y = rho^q sin(phi), rescaling time by D(phi) and
// dividing by rho^r the system reads
//   rho' = sum_k rho^{k+1} F_{r+k}(phi),  phi' = sum_k rho^k G_{r+k}(phi),
// both sums finite for a polynomial field and stored exactly.  When the
// original G_r is negative the whole field is negated so that phi increases
// along orbits; time_reversed records the flip and orientation keeps the
// original sense.
struct PolarSystem {
  Weight w;
  int r = 0;
  int max_degree = 0;  // largest quasihomogeneous degree present
  Orientation orientation = Orientation::counterclockwise;
  bool time_reversed = false;

  FourierPoly D;  // p cos^2 + q sin^2, the removed positive time factor
  std::vector<FourierPoly> F, G;  // index k holds degree r + k (normalized sign)
  FourierEval De;
  std::vector<FourierEval> Fe, Ge;

  std::vector<CircleRoot> omega;  // characteristic directions: zeros of G_r

  const FourierPoly& F_at(int j) const;  // by absolute degree; zero if absent
  const FourierPoly& G_at(int j) const;

  // Numeric right-hand sides of the rescaled system.
  double radial(double phi, double rho) const;
  double angular(double phi, double rho) const;
  double angular_leading(double phi) const { return Ge[0](phi); }
};

// pre: w is an edge weight of the Newton diagram unless allow_any_weight.
// Throws InputError when G_r vanishes identically (the weight gives no
// angular dynamics to first order; analysis for it stops here).
PolarSystem polar_components(const VectorField& X, Weight w, bool allow_any_weight = false);

const std::vector<CircleRoot>& characteristic_directions(const PolarSystem& ps);

struct MoClass {
  bool in_mo = false;
  std::optional<double> witness;  // a characteristic angle when not in Mo
};

// Monodromic-class membership for this weight: no characteristic directions.
MoClass mo_class_test(const PolarSystem& ps);

// Chart coordinates of the weighted polar map x = rho^p cos(phi),
// y = rho^q sin(phi).
struct ChartPoint {
  double phi = 0.0;
  double rho = 0.0;
};

void chart_to_cartesian(Weight w, double phi, double rho, double& x, double& y);

// Inverse of the weighted polar map; phi lands in [0, 2 pi) and rho > 0.
// Throws InputError at the origin, where every chart degenerates.
ChartPoint cartesian_to_chart(Weight w, double x, double y);

}  // namespace cf

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "centerfocus/blowup.hpp"

namespace cf {

struct FlowOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double trust_radius = 0.5;  // escape verdict beyond this rho
  double rho_floor = 1e-60;   // reaching it counts as falling into the origin
  double max_tau = 1e9;       // rescaled-time budget per turn
  long max_steps = 4000000;
  int turns = 1;           // integrate until the angle lift advances by 2 pi * turns
  double phi_start = 0.0;  // section angle; the lift starts here
};

enum class TurnStatus { completed, escaped, stalled };

const char* turn_status_name(TurnStatus s);

struct TrajectoryNode {
  double tau = 0.0;
  double phi = 0.0;
  double rho = 0.0;
  double dphi = 0.0;  // angular rate at the node, rescaled time
  double drho = 0.0;
};

// One turn of the rescaled flow rho' = R(phi, rho), phi' = Theta(phi, rho).
// The angle is a continuous lift; local reversals of phi near characteristic
// directions are tolerated and the turn ends at the first crossing of
// phi_start + 2 pi * turns.
struct Trajectory {
  TurnStatus status = TurnStatus::stalled;
  std::vector<TrajectoryNode> nodes;
  double rho_end = 0.0;
  double phi_end = 0.0;
  double tau_end = 0.0;
  std::vector<double> extras;  // integrals d(extra_i)/dtau = g_i(phi, rho) over the turn
  std::string diagnostic;

  bool phi_monotone(double slack = 1e-12) const;
  // rho as a function of the angle lift; requires phi_monotone.
  double rho_at_phi(double phi) const;
};

using ExtraIntegrand = std::function<double(double phi, double rho)>;

Trajectory integrate_turn(const PolarSystem& ps, double rho0, const FlowOptions& opt = {},
                          const std::vector<ExtraIntegrand>& extras = {});

struct ReturnMapSample {
  TurnStatus status = TurnStatus::stalled;
  double rho0 = 0.0;
  double rho1 = 0.0;
  double diff = 0.0;  // rho1 - rho0
  std::string diagnostic;
};

ReturnMapSample poincare_map(const PolarSystem& ps, double rho0, const FlowOptions& opt = {});

// Characteristic angles where the leading radial coefficient vanishes to
// strictly lower order than the angular one, so F_r/G_r blows up.  A section
// through such an angle sees the return map composed with the corner's power
// transform; slope measurements belong on sections away from this set.
std::vector<double> section_poles(const PolarSystem& ps);

// Section angle at maximal circle distance from section_poles(ps); 0 when
// the set is empty.
double transverse_section(const PolarSystem& ps);

struct AtlasLeg {
  std::size_t chart = 0;
  double phi0 = 0.0, phi1 = 0.0;  // angle lift covered by this leg
  double rho0 = 0.0, rho1 = 0.0;  // chart radii at its ends
  double tau = 0.0;
};

struct AtlasTurn {
  TurnStatus status = TurnStatus::stalled;
  double rho_return = 0.0;  // section-chart radius after the full turn
  double tau_total = 0.0;   // summed chart-local rescaled times (indicative)
  int handoffs = 0;
  std::vector<AtlasLeg> legs;
  std::string diagnostic;
};

// One full turn around the origin integrated across several blow-up charts,
// switching before each characteristic direction of the active chart to
// whichever chart stays regular longest there.  The section angle
// opt.phi_start and the returned radius live in charts[section_chart].
// Hands off at (characteristic angle - margin); a chart facing its own
// characteristic direction closer than every alternative just creeps
// through it as integrate_turn would.
AtlasTurn integrate_turn_atlas(const std::vector<PolarSystem>& charts, std::size_t section_chart,
                               double rho0, const FlowOptions& opt = {}, double margin = 0.35);

struct Eta1Estimate {
  double value = 0.0;
  double error = 0.0;  // size of the extrapolation correction kept with the value
  bool conclusive = false;
  std::string note;
  std::vector<std::pair<double, double>> samples;  // (rho0, Pi(rho0)) for completed turns
};

struct Eta1Options {
  FlowOptions flow;
  double target_rel = 1e-4;   // stop refining once the error bar is this small
  int max_extensions = 8;     // extra samples below the given grid
  double extension_ratio = 0.56;
  double floor_factor = 64.0;  // never extend below grid_min / floor_factor
  bool auto_section = true;    // atlas variant: override flow.phi_start by
                               // transverse_section of the section chart
  double margin = 0.35;        // atlas variant: chart handoff margin
};

// Slope of Pi at 0 from a decreasing geometric rho0 grid, Aitken-accelerated.
// When the given grid is not yet asymptotic the estimate refines downward,
// stopping as soon as the sample-to-sample trend stops contracting (the
// signature of integration error taking over).
Eta1Estimate eta1_estimate(const PolarSystem& ps, const std::vector<double>& rho0_grid,
                           const FlowOptions& opt = {});
Eta1Estimate eta1_estimate(const PolarSystem& ps, const std::vector<double>& rho0_grid,
                           const Eta1Options& opt);

// Same estimate measured on a section of ps chosen away from the poles of
// F_r/G_r.  When ps has characteristic directions the turns run over the
// full chart atlas of X (one chart per Newton diagram edge), so corners are
// always crossed in a chart that stays regular there; otherwise this reduces
// to the single-chart estimate above.  ps must come from an edge weight of X.
Eta1Estimate eta1_estimate(const PolarSystem& ps, const VectorField& X,
                           const std::vector<double>& rho0_grid, const Eta1Options& opt = {});

// Solutions a_i of the triangular linear Cauchy problems obtained by
// expanding rho(phi; rho0) = sum_i a_i(phi) rho0^i in the angle-parametrized
// equation drho/dphi = sum_j C_j(phi) rho^j; a_1(0) = 1, a_i(0) = 0 for
// i >= 2, and eta_i = a_i(2 pi) are the return map coefficients.
struct BautinCoefficients {
  int k = 0;
  int grid_n = 0;
  std::vector<std::vector<double>> a;  // a[i-1][j] at phi_j = 2 pi j / grid_n
  std::vector<double> eta;             // eta[i-1] = a_i(2 pi)
  double a_at(int i, double phi) const;
};

// pre: no characteristic directions for this weight (angular leading term
// nonvanishing); throws InputError otherwise.
BautinCoefficients bautin_coefficients(const PolarSystem& ps, int k, int grid_n = 8192);

// exp(int_0^phi F_r/G_r), the closed form of a_1; same precondition.
double a1_closed_at(const PolarSystem& ps, double phi, double quad_tol = 1e-12);
double a1_closed_quadrature(const PolarSystem& ps, double quad_tol = 1e-12);

// n points from hi down to lo, geometrically spaced.
std::vector<double> geometric_grid(double lo, double hi, int n);

}  // namespace cf

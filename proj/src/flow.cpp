#include "centerfocus/flow.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "centerfocus/errors.hpp"
#include "quadrature.hpp"

namespace cf {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

using State = std::vector<double>;
namespace ode = boost::numeric::odeint;

struct Rhs {
  const PolarSystem* ps;
  const std::vector<ExtraIntegrand>* extras;
  void operator()(const State& x, State& dx, double) const {
    double phi = x[0], rho = x[1];
    dx[0] = ps->angular(phi, rho);
    dx[1] = ps->radial(phi, rho);
    for (size_t i = 0; i < extras->size(); ++i) dx[2 + i] = (*extras)[i](phi, rho);
  }
};

}  // namespace

const char* turn_status_name(TurnStatus s) {
  switch (s) {
    case TurnStatus::completed: return "completed";
    case TurnStatus::escaped: return "escaped";
    case TurnStatus::stalled: return "stalled";
  }
  return "?";
}

bool Trajectory::phi_monotone(double slack) const {
  for (size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i].phi < nodes[i - 1].phi - slack) return false;
  return true;
}

double Trajectory::rho_at_phi(double phi) const {
  CF_CHECK(nodes.size() >= 2, "trajectory too short for interpolation");
  if (phi <= nodes.front().phi) return nodes.front().rho;
  if (phi >= nodes.back().phi) return nodes.back().rho;
  size_t lo = 0, hi = nodes.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (nodes[mid].phi <= phi) lo = mid;
    else hi = mid;
  }
  const TrajectoryNode& a = nodes[lo];
  const TrajectoryNode& b = nodes[hi];
  double h = b.phi - a.phi;
  if (h <= 1e-300) return 0.5 * (a.rho + b.rho);
  double t = (phi - a.phi) / h;
  // Hermite in phi when the angular rate supports it, else a chord
  double floor_rate = 1e-9 * (std::abs(a.drho) + std::abs(b.drho) + 1.0);
  if (std::abs(a.dphi) > floor_rate && std::abs(b.dphi) > floor_rate) {
    double m0 = a.drho / a.dphi * h;
    double m1 = b.drho / b.dphi * h;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a.rho + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * b.rho + (t3 - t2) * m1;
  }
  return a.rho + t * (b.rho - a.rho);
}

Trajectory integrate_turn(const PolarSystem& ps, double rho0, const FlowOptions& opt,
                          const std::vector<ExtraIntegrand>& extras) {
  if (rho0 <= 0.0) throw InputError("initial radius must be positive");
  Trajectory out;
  const double target = opt.phi_start + kTau * opt.turns;
  const size_t dim = 2 + extras.size();

  Rhs rhs{&ps, &extras};
  State x(dim, 0.0);
  x[0] = opt.phi_start;
  x[1] = rho0;

  auto record = [&](double tau, const State& s) {
    TrajectoryNode n;
    n.tau = tau;
    n.phi = s[0];
    n.rho = s[1];
    n.dphi = ps.angular(s[0], s[1]);
    n.drho = ps.radial(s[0], s[1]);
    out.nodes.push_back(n);
  };

  auto finish = [&](TurnStatus st, double tau, const State& s, const std::string& why) {
    out.status = st;
    out.tau_end = tau;
    out.phi_end = s[0];
    out.rho_end = s[1];
    out.extras.assign(s.begin() + 2, s.end());
    out.diagnostic = why;
  };

  auto stepper =
      ode::make_dense_output(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  double h0 = 1e-6;
  stepper.initialize(x, 0.0, h0);
  record(0.0, x);

  State probe(dim);
  long steps = 0;
  while (true) {
    if (++steps > opt.max_steps) {
      finish(TurnStatus::stalled, stepper.current_time(), stepper.current_state(),
             "step budget exhausted before completing the turn");
      return out;
    }
    double t0 = stepper.current_time();
    double phi0 = stepper.current_state()[0];
    stepper.do_step(rhs);
    double t1 = stepper.current_time();
    const State& cur = stepper.current_state();
    record(t1, cur);

    if (cur[0] >= target && phi0 < target) {
      // locate the first crossing inside the step with the dense interpolant
      double ta = t0, tb = t1;
      const int kScan = 16;
      double prev_t = t0, prev_phi = phi0;
      for (int i = 1; i <= kScan; ++i) {
        double t = t0 + (t1 - t0) * i / kScan;
        stepper.calc_state(t, probe);
        if (prev_phi < target && probe[0] >= target) {
          ta = prev_t;
          tb = t;
          break;
        }
        prev_t = t;
        prev_phi = probe[0];
      }
      for (int i = 0; i < 200 && tb - ta > 1e-15 * (1.0 + std::abs(tb)); ++i) {
        double tm = 0.5 * (ta + tb);
        stepper.calc_state(tm, probe);
        if (probe[0] >= target) tb = tm;
        else ta = tm;
      }
      stepper.calc_state(tb, probe);
      out.nodes.back().tau = tb;
      out.nodes.back().phi = probe[0];
      out.nodes.back().rho = probe[1];
      out.nodes.back().dphi = ps.angular(probe[0], probe[1]);
      out.nodes.back().drho = ps.radial(probe[0], probe[1]);
      finish(TurnStatus::completed, tb, probe, "");
      return out;
    }
    if (cur[1] > opt.trust_radius) {
      finish(TurnStatus::escaped, t1, cur, "radius left the trust region");
      return out;
    }
    if (cur[1] < opt.rho_floor) {
      finish(TurnStatus::stalled, t1, cur,
             "radius collapsed to the origin; behavior is not a simple turn");
      return out;
    }
    if (cur[0] < opt.phi_start - kTau) {
      finish(TurnStatus::stalled, t1, cur, "net winding is negative for this weight");
      return out;
    }
    if (t1 > opt.max_tau) {
      finish(TurnStatus::stalled, t1, cur, "rescaled-time budget exhausted");
      return out;
    }
  }
}

ReturnMapSample poincare_map(const PolarSystem& ps, double rho0, const FlowOptions& opt) {
  Trajectory tr = integrate_turn(ps, rho0, opt);
  ReturnMapSample s;
  s.status = tr.status;
  s.rho0 = rho0;
  s.rho1 = tr.rho_end;
  s.diff = tr.rho_end - rho0;
  s.diagnostic = tr.diagnostic;
  return s;
}

std::vector<double> section_poles(const PolarSystem& ps) {
  std::vector<double> poles;
  for (const CircleRoot& cr : ps.omega) {
    // vanishing order of F_r at the angle, capped at the order of G_r there
    FourierPoly d = ps.F[0];
    int ord = 0;
    while (ord < cr.multiplicity) {
      if (d.is_zero_poly()) {
        ord = cr.multiplicity;
        break;
      }
      double scale = 0.0;
      for (const auto& [k, coef] : d.terms()) scale += abs_value(coef);
      if (std::abs(d.eval(cr.angle)) > 1e-6 * scale) break;
      d = d.derivative();
      ++ord;
    }
    if (ord < cr.multiplicity) poles.push_back(cr.angle);
  }
  return poles;
}

double transverse_section(const PolarSystem& ps) {
  std::vector<double> poles = section_poles(ps);
  if (poles.empty()) return 0.0;
  const int n = 4096;
  double best_phi = 0.0, best_d = -1.0;
  for (int i = 0; i < n; ++i) {
    double phi = kTau * i / n;
    double d = kTau;
    for (double p : poles) d = std::min(d, std::abs(std::remainder(phi - p, kTau)));
    if (d > best_d + 1e-12) {
      best_d = d;
      best_phi = phi;
    }
  }
  return best_phi;
}

namespace {

struct DirRhs {
  const PolarSystem* ps;
  double dir;  // +1 integrates with the angle lift increasing, -1 decreasing
  void operator()(const State& x, State& dx, double) const {
    dx[0] = dir * ps->angular(x[0], x[1]);
    dx[1] = dir * ps->radial(x[0], x[1]);
  }
};

struct StretchResult {
  TurnStatus status = TurnStatus::stalled;
  double phi = 0.0;
  double rho = 0.0;
  double tau = 0.0;  // elapsed rescaled time, unsigned
  std::string note;
};

// one chart from (phi0, rho0) to the angle target, approached from either side
StretchResult run_stretch(const PolarSystem& ps, double phi0, double rho0, double target,
                          const FlowOptions& opt, double tau_budget) {
  StretchResult out;
  out.phi = phi0;
  out.rho = rho0;
  if (target == phi0) {
    out.status = TurnStatus::completed;
    return out;
  }
  const double dir = target >= phi0 ? 1.0 : -1.0;
  DirRhs rhs{&ps, dir};
  State x{phi0, rho0};
  auto stepper =
      ode::make_dense_output(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  stepper.initialize(x, 0.0, 1e-6);
  State probe(2);
  long steps = 0;
  auto leave = [&](TurnStatus st, double tau, const State& s, const std::string& why) {
    out.status = st;
    out.tau = tau;
    out.phi = s[0];
    out.rho = s[1];
    out.note = why;
  };
  while (true) {
    if (++steps > opt.max_steps) {
      leave(TurnStatus::stalled, stepper.current_time(), stepper.current_state(),
            "step budget exhausted before reaching the target angle");
      return out;
    }
    double t0 = stepper.current_time();
    double gap0 = dir * (stepper.current_state()[0] - target);
    stepper.do_step(rhs);
    double t1 = stepper.current_time();
    const State& cur = stepper.current_state();
    if (gap0 < 0.0 && dir * (cur[0] - target) >= 0.0) {
      double ta = t0, tb = t1;
      const int kScan = 16;
      double prev_t = t0, prev_gap = gap0;
      for (int i = 1; i <= kScan; ++i) {
        double t = t0 + (t1 - t0) * i / kScan;
        stepper.calc_state(t, probe);
        double gap = dir * (probe[0] - target);
        if (prev_gap < 0.0 && gap >= 0.0) {
          ta = prev_t;
          tb = t;
          break;
        }
        prev_t = t;
        prev_gap = gap;
      }
      for (int i = 0; i < 200 && tb - ta > 1e-15 * (1.0 + std::abs(tb)); ++i) {
        double tm = 0.5 * (ta + tb);
        stepper.calc_state(tm, probe);
        if (dir * (probe[0] - target) >= 0.0) tb = tm;
        else ta = tm;
      }
      stepper.calc_state(tb, probe);
      leave(TurnStatus::completed, tb, probe, "");
      return out;
    }
    if (cur[1] > opt.trust_radius) {
      leave(TurnStatus::escaped, t1, cur, "radius left the trust region");
      return out;
    }
    if (cur[1] < opt.rho_floor) {
      leave(TurnStatus::stalled, t1, cur,
            "radius collapsed to the origin; behavior is not a simple turn");
      return out;
    }
    if (dir * (cur[0] - phi0) < -kTau) {
      leave(TurnStatus::stalled, t1, cur, "net winding is negative for this weight");
      return out;
    }
    if (t1 > tau_budget) {
      leave(TurnStatus::stalled, t1, cur, "rescaled-time budget exhausted");
      return out;
    }
  }
}

}  // namespace

AtlasTurn integrate_turn_atlas(const std::vector<PolarSystem>& charts, std::size_t section_chart,
                               double rho0, const FlowOptions& opt, double margin) {
  if (charts.empty()) throw InputError("the chart atlas is empty");
  if (section_chart >= charts.size()) throw InputError("section chart index out of range");
  if (rho0 <= 0.0) throw InputError("initial radius must be positive");
  if (!(margin > 1e-3 && margin < 1.2)) throw InputError("handoff margin out of range");

  const double end_target = opt.phi_start + kTau * opt.turns;
  const double margin_min = 1e-3;  // closest approach to a direction before creeping through
  AtlasTurn out;
  std::size_t c = section_chart;
  double phi = opt.phi_start;  // angle lift; quadrant boundaries agree across charts
  double rho = rho0;
  double tau_left = opt.max_tau;
  double margin_now = margin;

  // smallest lift of a characteristic direction of chart ci strictly ahead
  auto next_char = [&](std::size_t ci, double from) {
    double best = std::numeric_limits<double>::infinity();
    for (const CircleRoot& cr : charts[ci].omega) {
      double k = std::ceil((from + 1e-9 - cr.angle) / kTau);
      best = std::min(best, cr.angle + kTau * k);
    }
    return best;
  };
  // circle distance from a reduced angle forward (resp. backward) to the
  // characteristic set of chart ci; a chart without one scores a full turn
  auto dist_ahead = [&](std::size_t ci, double phired) {
    double best = kTau;
    for (const CircleRoot& cr : charts[ci].omega) {
      double d = cr.angle - phired;
      d -= kTau * std::floor(d / kTau);
      if (d < 1e-12) d += kTau;
      best = std::min(best, d);
    }
    return best;
  };
  auto dist_behind = [&](std::size_t ci, double phired) {
    double best = kTau;
    for (const CircleRoot& cr : charts[ci].omega) {
      double d = phired - cr.angle;
      d -= kTau * std::floor(d / kTau);
      best = std::min(best, d);
    }
    return best;
  };
  auto lift_near = [&](double reduced, double anchor) {
    return anchor + std::remainder(reduced - anchor, kTau);
  };
  auto run_leg = [&](double stop) {
    // The escape guard bounds Cartesian distance from the origin.  A point
    // that close can still sit at chart radius trust^(1/max(p,q)) when it
    // lies along the higher-weight axis, so relax the cap accordingly.
    FlowOptions leg_opt = opt;
    const int wmax = std::max(charts[c].w.p, charts[c].w.q);
    leg_opt.trust_radius = std::pow(opt.trust_radius, 1.0 / wmax);
    StretchResult sr = run_stretch(charts[c], phi, rho, stop, leg_opt, tau_left);
    out.tau_total += sr.tau;
    tau_left -= sr.tau;
    out.legs.push_back({c, phi, sr.phi, rho, sr.rho, sr.tau});
    phi = sr.phi;
    rho = sr.rho;
    if (sr.status != TurnStatus::completed) {
      out.status = sr.status;
      out.diagnostic = sr.note;
      return false;
    }
    return true;
  };

  for (int leg = 0; leg < 2048; ++leg) {
    if (tau_left <= 0.0) break;
    double omega = next_char(c, phi);
    double boundary = omega - margin_now;
    if (end_target <= boundary || (end_target <= omega && boundary <= phi + 1e-9)) {
      // the turn closes before the next troublesome direction
      if (!run_leg(end_target)) return out;
      if (c != section_chart) {
        // measure the leftover arc to the section ray in the section chart
        // itself; the conversion may land on either side of it
        double x, y;
        chart_to_cartesian(charts[c].w, phi, rho, x, y);
        ChartPoint cp = cartesian_to_chart(charts[section_chart].w, x, y);
        ++out.handoffs;
        c = section_chart;
        phi = lift_near(cp.phi, phi);
        rho = cp.rho;
        if (std::abs(phi - end_target) > 1e-12 && !run_leg(end_target)) return out;
      }
      out.status = TurnStatus::completed;
      out.rho_return = rho;
      return out;
    }
    if (boundary > phi + 1e-9) {
      if (!run_leg(boundary)) return out;
      continue;
    }
    // inside the margin zone before omega: hand off if some chart enters
    // clear of its own directions and keeps more room ahead than we have
    double x, y;
    chart_to_cartesian(charts[c].w, phi, rho, x, y);
    std::size_t best = c;
    double best_da = -1.0;
    ChartPoint best_cp;
    for (std::size_t ci = 0; ci < charts.size(); ++ci) {
      if (ci == c) continue;
      ChartPoint cp = cartesian_to_chart(charts[ci].w, x, y);
      double da = dist_ahead(ci, cp.phi);
      double db = dist_behind(ci, cp.phi);
      if (da <= (omega - phi) + 0.05) continue;
      if (db <= 1e-11) continue;  // entry numerically on a direction of ci
      // time scale for ci to pull clear of the direction it enters behind;
      // power-law slowdown makes db/speed the dominant part of that integral
      double speed = std::abs(charts[ci].angular(cp.phi, cp.rho));
      if (!(speed > 0.0) || db / speed > 0.02 * tau_left) continue;
      if (da > best_da) {
        best = ci;
        best_da = da;
        best_cp = cp;
      }
    }
    if (best != c) {
      phi = lift_near(best_cp.phi, phi);
      rho = best_cp.rho;
      c = best;
      ++out.handoffs;
      margin_now = margin;
      continue;
    }
    if (margin_now > margin_min) {
      // receivers are still glued to their own directions; edge closer to
      // omega, where the orbit has turned further and conversions clear up
      margin_now *= 0.5;
      continue;
    }
    // no chart improves on creeping straight through the direction
    double after =
        std::min(end_target, std::max(omega + margin, next_char(c, omega + 1e-9) - margin));
    if (!run_leg(after)) return out;
    margin_now = margin;
  }
  out.status = TurnStatus::stalled;
  out.diagnostic = tau_left <= 0.0 ? "rescaled-time budget exhausted"
                                   : "chart handoff budget exhausted";
  return out;
}

namespace {

// pick the most stabilized entry of the Aitken table: the refined value whose
// correction against its parent is smallest
void aitken_select(const std::vector<double>& u, double& value, double& error) {
  std::vector<std::vector<double>> table;
  table.push_back(u);
  while (table.back().size() >= 3) {
    const std::vector<double>& c = table.back();
    std::vector<double> nxt;
    for (size_t i = 0; i + 2 < c.size(); ++i) {
      double d2 = c[i + 2] - 2 * c[i + 1] + c[i];
      double d1 = c[i + 2] - c[i + 1];
      nxt.push_back(std::abs(d2) < 1e-300 ? c[i + 2] : c[i + 2] - d1 * d1 / d2);
    }
    table.push_back(nxt);
  }
  value = u.back();
  error = u.size() >= 2 ? std::abs(u.back() - u[u.size() - 2]) : 0.0;
  double best = error;
  for (size_t s = 1; s < table.size(); ++s) {
    for (size_t i = 0; i < table[s].size(); ++i) {
      double corr = std::abs(table[s][i] - table[s - 1][i + 2]);
      if (corr <= best) {
        best = corr;
        value = table[s][i];
        error = corr;
      }
    }
  }
}

// single-chart return map; charts free of slope poles run in the angular
// parametrization first
ReturnMapSample single_chart_turn(const PolarSystem& ps, bool pole_free, double r0,
                                  const FlowOptions& opt) {
  if (pole_free) {
    bool graph = true;
    ReturnMapSample s = poincare_map_angular(ps, r0, opt, &graph);
    if (graph) return s;
    // the turn is not an angular graph at this radius; use the clock
  }
  return poincare_map(ps, r0, opt);
}

// shared estimation core over any one-turn return map evaluator
Eta1Estimate eta1_core(const std::function<ReturnMapSample(double)>& turn,
                       const std::vector<double>& rho0_grid, const Eta1Options& opt) {
  Eta1Estimate est;
  std::vector<double> grid = rho0_grid;
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  int failed = 0;
  for (double r0 : grid) {
    ReturnMapSample s = turn(r0);
    if (s.status == TurnStatus::completed) est.samples.emplace_back(r0, s.rho1);
    else ++failed;
  }
  std::ostringstream note;
  if (failed > 0) note << failed << " of " << grid.size() << " turns did not complete";
  if (est.samples.size() < 3) {
    if (note.tellp() > 0) note << "; ";
    note << "fewer than 3 completed turns; no extrapolation possible";
    est.note = note.str();
    return est;
  }
  std::vector<double> u;
  for (auto& [r0, r1] : est.samples) u.push_back(r1 / r0);

  aitken_select(u, est.value, est.error);

  // refine below the grid while the error bar is too wide, stopping the
  // moment the ratio trend stops contracting (integration error regime)
  double floor = grid.back() / opt.floor_factor;
  for (int ext = 0; ext < opt.max_extensions; ++ext) {
    if (est.error <= opt.target_rel * std::abs(est.value)) break;
    double r0 = est.samples.back().first * opt.extension_ratio;
    if (r0 < floor) break;
    ReturnMapSample s = turn(r0);
    if (s.status != TurnStatus::completed) {
      if (note.tellp() > 0) note << "; ";
      note << "refinement stopped: turn at rho0=" << r0 << " " << turn_status_name(s.status);
      break;
    }
    double unew = s.rho1 / r0;
    size_t n = u.size();
    if (n >= 2 && std::abs(unew - u[n - 1]) > 1.05 * std::abs(u[n - 1] - u[n - 2])) {
      if (note.tellp() > 0) note << "; ";
      note << "refinement stopped: trend no longer contracting at rho0=" << r0;
      break;
    }
    est.samples.emplace_back(r0, s.rho1);
    u.push_back(unew);
    aitken_select(u, est.value, est.error);
  }

  est.conclusive =
      est.samples.size() >= 4 && est.error < std::max(1e-9, 1e-3 * std::abs(est.value));
  est.note = note.str();
  return est;
}

}  // namespace

Eta1Estimate eta1_estimate(const PolarSystem& ps, const std::vector<double>& rho0_grid,
                           const Eta1Options& opt) {
  const bool pole_free = section_poles(ps).empty();
  return eta1_core(
      [&ps, pole_free, &opt](double r0) { return single_chart_turn(ps, pole_free, r0, opt.flow); },
      rho0_grid, opt);
}

Eta1Estimate eta1_estimate(const PolarSystem& ps, const std::vector<double>& rho0_grid,
                           const FlowOptions& opt) {
  Eta1Options full;
  full.flow = opt;
  return eta1_estimate(ps, rho0_grid, full);
}

Eta1Estimate eta1_estimate(const PolarSystem& ps, const VectorField& X,
                           const std::vector<double>& rho0_grid, const Eta1Options& opt) {
  Eta1Options local = opt;
  if (local.auto_section) local.flow.phi_start = transverse_section(ps);
  if (section_poles(ps).empty()) return eta1_estimate(ps, rho0_grid, local);

  // every diagram edge with angular dynamics becomes a chart; corners of the
  // polycycle are then crossed in whichever chart is regular there
  std::vector<PolarSystem> charts;
  std::size_t section = 0;
  bool found = false;
  NewtonDiagram nd = newton_diagram(X);
  for (const DiagramEdge& e : nd.edges) {
    if (e.w == ps.w) {
      section = charts.size();
      charts.push_back(ps);
      found = true;
      continue;
    }
    try {
      charts.push_back(polar_components(X, e.w));
    } catch (const InputError&) {
      // no angular dynamics at this weight; it cannot host a chart
    }
  }
  if (!found) {
    section = charts.size();
    charts.push_back(ps);
  }
  auto turn = [&](double r0) {
    AtlasTurn at = integrate_turn_atlas(charts, section, r0, local.flow, local.margin);
    ReturnMapSample s;
    s.status = at.status;
    s.rho0 = r0;
    s.rho1 = at.rho_return;
    s.diff = at.rho_return - r0;
    s.diagnostic = at.diagnostic;
    return s;
  };
  return eta1_core(turn, rho0_grid, local);
}

namespace {

// series coefficients of the angle-parametrized radial equation at one angle:
// drho/dphi = sum_{i>=1} C_i(phi) rho^i with C_i = (F/G division)_{i-1}
void rho_equation_coeffs(const PolarSystem& ps, double phi, int k, std::vector<double>& c) {
  int nf = static_cast<int>(ps.Fe.size());
  int ng = static_cast<int>(ps.Ge.size());
  std::vector<double> u(k, 0.0), v(k, 0.0);
  for (int m = 0; m < k; ++m) {
    u[m] = m < nf ? ps.Fe[m](phi) : 0.0;
    v[m] = m < ng ? ps.Ge[m](phi) : 0.0;
  }
  c.assign(k, 0.0);
  for (int m = 0; m < k; ++m) {
    double s = u[m];
    for (int l = 1; l <= m; ++l) s -= v[l] * c[m - l];
    c[m] = s / v[0];
  }
}

// right-hand side of the triangular Bautin system at one angle
void bautin_rhs(const PolarSystem& ps, double phi, const std::vector<double>& a,
                std::vector<double>& da) {
  int k = static_cast<int>(a.size());
  std::vector<double> c;
  rho_equation_coeffs(ps, phi, k, c);
  // powers of S(rho0) = sum_m a_m rho0^m truncated at rho0^k; index 0 <-> rho0^1
  std::vector<double> pw = a;
  da.assign(k, 0.0);
  for (int i = 0; i < k; ++i) da[i] += c[0] * a[i];
  for (int j = 2; j <= k; ++j) {
    // pw <- pw * S, truncated; (S^j)_i = 0 for i < j
    std::vector<double> nx(k, 0.0);
    for (int i = j - 2; i < k; ++i) {
      if (pw[i] == 0.0) continue;
      for (int m = 0; m + i + 1 < k; ++m) nx[i + m + 1] += pw[i] * a[m];
    }
    pw = nx;
    for (int i = j - 1; i < k; ++i) da[i] += c[j - 1] * pw[i];
  }
}

}  // namespace

double BautinCoefficients::a_at(int i, double phi) const {
  CF_CHECK(i >= 1 && i <= k, "Bautin index out of range");
  const std::vector<double>& vals = a[i - 1];
  double h = kTau / grid_n;
  double s = std::clamp(phi / h, 0.0, static_cast<double>(grid_n));
  int base = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, grid_n - 3);
  // cubic Lagrange through four consecutive grid nodes
  double t = s - base;
  double out = 0.0;
  for (int m = 0; m < 4; ++m) {
    double l = 1.0;
    for (int n = 0; n < 4; ++n)
      if (n != m) l *= (t - n) / (m - n);
    out += vals[base + m] * l;
  }
  return out;
}

BautinCoefficients bautin_coefficients(const PolarSystem& ps, int k, int grid_n) {
  if (k < 1) throw InputError("at least one expansion coefficient is required");
  if (grid_n < 16) throw InputError("expansion grid too coarse");
  MoClass mo = mo_class_test(ps);
  if (!mo.in_mo)
    throw InputError(
        "the leading angular coefficient vanishes at a characteristic direction; the return map "
        "expansion requires a weight without characteristic directions");

  BautinCoefficients bc;
  bc.k = k;
  bc.grid_n = grid_n;
  bc.a.assign(k, std::vector<double>(grid_n + 1, 0.0));
  std::vector<double> a(k, 0.0);
  a[0] = 1.0;
  for (int i = 0; i < k; ++i) bc.a[i][0] = a[i];

  double h = kTau / grid_n;
  std::vector<double> k1, k2, k3, k4, tmp(k);
  for (int j = 0; j < grid_n; ++j) {
    double phi = j * h;
    bautin_rhs(ps, phi, a, k1);
    for (int i = 0; i < k; ++i) tmp[i] = a[i] + 0.5 * h * k1[i];
    bautin_rhs(ps, phi + 0.5 * h, tmp, k2);
    for (int i = 0; i < k; ++i) tmp[i] = a[i] + 0.5 * h * k2[i];
    bautin_rhs(ps, phi + 0.5 * h, tmp, k3);
    for (int i = 0; i < k; ++i) tmp[i] = a[i] + h * k3[i];
    bautin_rhs(ps, phi + h, tmp, k4);
    for (int i = 0; i < k; ++i) a[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    for (int i = 0; i < k; ++i) bc.a[i][j + 1] = a[i];
  }
  bc.eta = a;
  return bc;
}

double a1_closed_at(const PolarSystem& ps, double phi, double quad_tol) {
  MoClass mo = mo_class_test(ps);
  if (!mo.in_mo)
    throw InputError("closed form of the first return coefficient needs a nonvanishing leading "
                     "angular coefficient");
  auto f = [&](double t) { return ps.Fe[0](t) / ps.Ge[0](t); };
  QuadResult q = integrate_adaptive(f, 0.0, phi, quad_tol, quad_tol);
  return std::exp(q.value);
}

double a1_closed_quadrature(const PolarSystem& ps, double quad_tol) {
  return a1_closed_at(ps, kTau, quad_tol);
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo && n >= 2))
    throw InputError("geometric grid needs 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  double ratio = std::pow(lo / hi, 1.0 / (n - 1));
  double v = hi;
  for (int i = 0; i < n; ++i) {
    g[i] = v;
    v *= ratio;
  }
  g.back() = lo;
  return g;
}

}  // namespace cf

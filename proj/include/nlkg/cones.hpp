#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "nlkg/conslaws.hpp"
#include "nlkg/norms.hpp"

namespace nlkg {

/// Light cone {0 < t <= top_time, |x - vertex| < t} in cone time t. Solver time s maps to
/// t = s - vertex_time, or t = vertex_time - s for a reflected (backwards) cone, in which
/// case u_t changes sign as well.
struct ConeSpec {
  Point vertex{};
  double top_time = 1.0;
  double vertex_time = 0.0;
  bool reflected = false;
  /// false drops |u|^(p+2) from every cone density (linear Klein-Gordon runs).
  bool nonlinear = true;

  double cone_time(double solver_time) const {
    return reflected ? vertex_time - solver_time : solver_time - vertex_time;
  }
  double solver_time(double cone_t) const { return reflected ? vertex_time - cone_t : vertex_time + cone_t; }
};

/// The ball of radius t (fattened by 3h) must not wrap around the periodic box.
void validate_cone(const ConeSpec& cone, const GridSpec& grid, double t);
/// Box length at least four cone diameters (L >= 8 T).
void check_box_rule(const ConeSpec& cone, const GridSpec& grid);

/// The state seen from the cone: time replaced by cone time, u_t negated for reflected cones.
State cone_frame(const State& state, const ConeSpec& cone);

struct DiagnosticSeries {
  std::string name;
  std::vector<double> times;
  std::vector<double> values;
  Regime regime = Regime::sub_conformal;
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return times.size(); }
  /// Throws unless times strictly increase and values are finite.
  void validate() const;
};

/// max/min of |values| over samples with t_lo <= t <= t_hi (infinity if any sample is 0).
double band_width(const DiagnosticSeries& series, double t_lo, double t_hi);

/// L(t): integral of the mod_dilation density over |x - vertex| < t.
double L_functional(const State& state, const ConeSpec& cone);
/// Z(t): integral of the combined density weighted by (t^2 - |x - vertex|^2)^alpha; sub-conformal only.
double Z_functional(const State& state, const ConeSpec& cone);

struct RadialSplit {
  Field radial;                ///< u_r = x/|x| . grad u, 0 at the vertex
  std::vector<Field> angular;  ///< grad u - x/|x| u_r
};
RadialSplit radial_angular_split(std::span<const Field> grad, const Point& vertex);

struct FluxCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// Weighted boundary term: integral over |x| < t of (t^2 - |x|^2)/t e0.
double flux_boundary_term(const State& state, const ConeSpec& cone);
/// Bulk integrand of the flux identity at one time (null-derivative form plus angular and potential terms).
double flux_bulk_term(const State& state, const ConeSpec& cone);
/// Energy flux identity between cone times t0 < t1 over the stored snapshots (trapezoid in t).
FluxCheck energy_flux_check(const Trajectory& traj, const ConeSpec& cone, double t0, double t1);

/// Regime-dependent weighted space-time integral over the dyadic window starting at cone time t0:
/// conformal: [t0, (1+alpha) t0] x {|x| < alpha t} with weights (t-|x|)^(d+1), (t-|x|)^(d-1), over alpha t0^(d+1);
/// sub-conformal: [t0, 2 t0] x {|x| < t} with weights (t-|x|)^(d+2-2s_c), (t-|x|)^(d-2s_c), over t0^(d+1);
/// super-conformal: [t0, 2 t0] x {|x| < t} of |grad_{t,x} u|^2.
double averaged_gradient_bound(const Trajectory& traj, const ConeSpec& cone, double t0, double alpha);

/// Instantaneous cone quantities as solver monitors (names start with "cone.").
std::vector<Monitor> cone_monitors(const ConeSpec& cone, const CriticalParams& params);
/// "cone.L" (s_c >= 1/2) or "cone.Z" (s_c < 1/2).
Monitor lyapunov_monitor(const ConeSpec& cone, const CriticalParams& params);

/// Normalized cone series in cone time. Uses the "cone." monitor series when the trajectory
/// recorded them, else evaluates the stored snapshots. Samples before t_floor = max(10 dt, 4h) are dropped.
std::vector<DiagnosticSeries> cone_monitor(const Trajectory& traj, const ConeSpec& cone);

/// The L or Z series of a trajectory, from its "cone.L"/"cone.Z" monitor or its snapshots.
DiagnosticSeries lyapunov_series(const Trajectory& traj, const ConeSpec& cone);

struct MonotonicityReport {
  std::size_t violations = 0;    ///< steps with a decrease above tol * running max
  double worst_decrease = 0.0;   ///< largest decrease relative to the running max
  double min_relative = 0.0;     ///< min value / max |value|
};
MonotonicityReport monotonicity(const DiagnosticSeries& series, double tol);

}  // namespace nlkg

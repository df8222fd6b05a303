#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlkg/cones.hpp"

namespace nlkg {

struct BlowupReport {
  bool detected = false;
  double t_star = 0.0;
  std::vector<double> fit_window;  ///< sample times of the T* regression
  double fit_residual = 0.0;       ///< rms residual of ||u||_inf^(-p/2) about the fitted line
  /// Exponent b in q(t) ~ (T* - t)^b for each monitored quantity.
  std::map<std::string, double> rate_exponents;
  std::string diagnostics;
};

struct FitOptions {
  std::size_t tail_samples = 20;   ///< K, samples of the T* regression
  double window_fraction = 0.05;   ///< rate fits use T* - t <= fraction * T*
  std::size_t min_points = 5;
};

/// T* from the x-intercept of the least-squares line through ||u||_inf^(-p/2) over the last
/// K sup-norm samples; rate exponents by log-log regression against T* - t of every positive
/// series (plus the mass from stored snapshots).
BlowupReport detect_and_fit(const Trajectory& traj, const FitOptions& options = {});

struct PowerFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
};
/// Least squares of log q against log(T* - t) over samples with 0 < T* - t <= t_star * fraction.
PowerFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values, double t_star,
                       double fraction, std::size_t min_points = 5);

struct MassSeries {
  std::vector<double> times;
  std::vector<double> M;
  std::vector<double> M_prime;
  std::vector<double> M_doubleprime;
  std::vector<double> energy;
  std::vector<double> grad_sq;  ///< ||grad u||_2^2
  double exponent = 2.0;
  /// First sample with 2(p+2)E <= (p/2)||grad u||_2^2.
  std::optional<std::size_t> t0_index;
  /// Truncated variant: cutoff radius R and the audit of the second difference against M''.
  double radius = 0.0;
  std::vector<double> second_difference;  ///< NaN at the end points
  double identity_gap = 0.0;

  std::size_t size() const { return times.size(); }
};

/// M = int u^2, M' = int 2 u u_t, M'' = -2(p+2)E + int (p+4)u_t^2 + p|grad u|^2 + p m^2 u^2
/// from the stored snapshots (closed formulas; linear trajectories drop |u|^(p+2) from E).
MassSeries mass_diagnostics(const Trajectory& traj);

/// Leading samples whose energy stays within drift_tol * |E(0)| of E(0); past that point the
/// discrete solution no longer carries the conserved energy the mass identities rely on.
MassSeries resolved_window(const MassSeries& series, double drift_tol = 1e-2);

struct ConcavityReport {
  std::size_t inequality_violations = 0;  ///< |M'|^2 > 4/(p+4) M M'' + tol scale, after t0
  /// Second differences of f = M^(-p/4) after t0 exceeding what relative perturbations of size
  /// tol in f can produce, tol (|f-| + 2|f| + |f+|) / (h0 h1).
  std::size_t concavity_violations = 0;
  double inequality_scale = 0.0;
  double worst_inequality = 0.0;  ///< max of (|M'|^2 - 4/(p+4) M M'') / scale
  double worst_concavity = 0.0;
  std::size_t checked = 0;
};
ConcavityReport concavity_check(const MassSeries& series, double tol = 1e-6);

/// Radial cutoff 1, 1-2(r-1)^2, 2(2-r)^2, 0 with breaks at 1, 3/2, 2, and its r-derivatives.
double mass_cutoff(double r);
double mass_cutoff_d1(double r);
double mass_cutoff_d2(double r);

/// M(t) = int phi(x/(R+t)) u^2 with t measured from the first snapshot, its closed-form first
/// derivative and the expanded second-derivative identity, audited against the second difference.
MassSeries truncated_mass(const Trajectory& traj, double radius);

/// ||u||_{H^{s_c} homogeneous} + ||u_t||_{H^{s_c-1}} (bracket with m = 1, zero mode removed) per snapshot.
DiagnosticSeries critical_norm_series(const Trajectory& traj);

/// (T*-t)^(-2 s_c) int_{|x-x0| <= T*-t} u^2 + (T*-t)^2 |grad_{t,x} u|^2 per snapshot with
/// T* - t >= 2h (the ball must span cells).
DiagnosticSeries lower_bound_check(const Trajectory& traj, double t_star, const Point& x0);

/// sigma(x) <- min_y sigma(y) + |x - y| over the 3^d - 1 neighbours, swept to a fixed point.
Field lipschitz_envelope(const Field& sigma);

/// First time |u(t,x)| reaches threshold (log-linear interpolation between snapshots,
/// +infinity where never reached), projected onto 1-Lipschitz functions.
Field blowup_surface_estimate(const Trajectory& traj, double threshold = 1e3);

/// m = 0 scaling u -> lambda^(2/p) u(lambda t, lambda x) applied to every snapshot and series;
/// the box shrinks to L/lambda on the same grid.
Trajectory rescale_trajectory(const Trajectory& traj, double lambda);

}  // namespace nlkg

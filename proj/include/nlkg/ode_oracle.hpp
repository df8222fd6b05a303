#pragma once

#include <span>
#include <vector>

namespace nlkg {

/// Solution of the spatially constant reduction v'' + m^2 v = |v|^p v.
struct OdeSeries {
  std::vector<double> times;
  std::vector<double> v;
  std::vector<double> dv;
  /// True when |v| passed the cap before the last requested time; the series stops there.
  bool truncated = false;
};

struct OdeTolerance {
  double abs = 1e-13;
  double rel = 1e-13;
  double v_cap = 1e12;
};

/// Dense-output Dormand-Prince 5(4) integration from v(0) = A, v'(0) = B,
/// sampled at the increasing times of t_grid (t_grid[0] >= 0).
OdeSeries ode_oracle(double A, double B, double m, double p, std::span<const double> t_grid,
                     OdeTolerance tol = {});

/// Integral of [2/(p+2) (u^(p+2) - A^(p+2))]^(-1/2) over u > A: the blowup time of
/// the m = 0 solution with v(0) = A, v'(0) = 0. Throws ConvergenceError when the
/// quadrature error estimate is not small.
double lifespan_upper(double A, double p);

}  // namespace nlkg

#include "nlkg/ode_oracle.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>

#include "nlkg/errors.hpp"

namespace nlkg {

namespace odeint = boost::numeric::odeint;

OdeSeries ode_oracle(double A, double B, double m, double p, std::span<const double> t_grid,
                     OdeTolerance tol) {
  require(p > 0.0, "ode_oracle: p must be positive");
  require(std::isfinite(A) && std::isfinite(B), "ode_oracle: initial data must be finite");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    require(t_grid[i] > t_grid[i - 1], "ode_oracle: t_grid must be strictly increasing");
  OdeSeries out;
  if (t_grid.empty()) return out;
  require(t_grid.front() >= 0.0, "ode_oracle: t_grid must start at t >= 0");

  using state_t = std::array<double, 2>;
  const double m2 = m * m;
  auto rhs = [m2, p](const state_t& y, state_t& dy, double) {
    dy[0] = y[1];
    dy[1] = std::pow(std::abs(y[0]), p) * y[0] - m2 * y[0];
  };
  auto stepper = odeint::make_dense_output(tol.abs, tol.rel, odeint::runge_kutta_dopri5<state_t>());
  state_t y{A, B};
  stepper.initialize(y, 0.0, 1e-4);

  std::size_t next = 0;
  state_t sample;
  while (next < t_grid.size()) {
    if (t_grid[next] == 0.0) {
      out.times.push_back(0.0);
      out.v.push_back(A);
      out.dv.push_back(B);
      ++next;
      continue;
    }
    stepper.do_step(rhs);
    while (next < t_grid.size() && t_grid[next] <= stepper.current_time()) {
      stepper.calc_state(t_grid[next], sample);
      out.times.push_back(t_grid[next]);
      out.v.push_back(sample[0]);
      out.dv.push_back(sample[1]);
      ++next;
    }
    const auto& cur = stepper.current_state();
    if (!(std::abs(cur[0]) <= tol.v_cap)) {
      out.truncated = next < t_grid.size();
      break;
    }
  }
  return out;
}

double lifespan_upper(double A, double p) {
  require(A > 0.0 && std::isfinite(A), "lifespan_upper: A must be positive");
  require(p > 0.0, "lifespan_upper: p must be positive");
  // u = A/s maps (A, inf) to (0, 1); the integrand becomes
  // A^(-p/2) sqrt((p+2)/2) s^((p-2)/2) / sqrt(1 - s^(p+2)).
  const double scale = std::pow(A, -0.5 * p) * std::sqrt(0.5 * (p + 2.0));
  auto f = [p](double s, double one_minus_s) {
    const double q = p + 2.0;
    // 1 - s^q near s = 1 from the complement to keep precision.
    const double gap = s > 0.5 ? -std::expm1(q * std::log1p(-one_minus_s)) : 1.0 - std::pow(s, q);
    return std::pow(s, 0.5 * (p - 2.0)) / std::sqrt(gap);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(f, 0.0, 1.0, 1e-13, &error, &l1);
  if (!std::isfinite(value) || !(error <= 1e-8 * std::max(1.0, std::abs(value)))) {
    std::ostringstream os;
    os << "lifespan_upper: quadrature did not converge (A = " << A << ", p = " << p
       << ", estimate = " << value << ", error = " << error << ")";
    throw ConvergenceError(os.str());
  }
  return scale * value;
}

}  // namespace nlkg

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlkg/cones.hpp"
#include "nlkg/initial_data.hpp"
#include "nlkg/ode_oracle.hpp"
#include "unit/support.hpp"

using namespace nlkg;

namespace {

std::size_t points_in_ball(const GridSpec& g, double radius) {
  std::size_t count = 0;
  for_each_point(g, [&](std::size_t, const Point& x) {
    if (norm(x) < radius) ++count;
  });
  return count;
}

SolverConfig linear_config(double dt, double t_max, std::size_t stride) {
  SolverConfig c;
  c.dt_init = dt;
  c.dt_min = dt * 1e-6;
  c.t_max = t_max;
  c.snapshot_stride = stride;
  c.nonlinear = false;
  return c;
}

}  // namespace

TEST(Cones, TimeMapAndReflection) {
  ConeSpec c{{}, 2.0, 3.0, true};
  EXPECT_DOUBLE_EQ(c.cone_time(1.0), 2.0);
  EXPECT_DOUBLE_EQ(c.solver_time(2.0), 1.0);
  const GridSpec g{2, 16, 20.0};
  auto s = constant(g, {0.0, 2.0}, 1.0, 0.5, 1.0);
  const auto f = cone_frame(s, c);
  EXPECT_DOUBLE_EQ(f.time, 2.0);
  EXPECT_DOUBLE_EQ(f.v[3], -0.5);
  c.reflected = false;
  c.vertex_time = -1.0;
  EXPECT_DOUBLE_EQ(cone_frame(s, c).time, 2.0);
  EXPECT_DOUBLE_EQ(cone_frame(s, c).v[3], 0.5);
}

TEST(Cones, GeometryIsValidated) {
  const GridSpec g{2, 32, 16.0};
  const ConeSpec c{{}, 2.0};
  EXPECT_NO_THROW(validate_cone(c, g, 1.0));
  EXPECT_THROW(validate_cone(c, g, 0.0), DomainError);
  EXPECT_THROW(validate_cone(c, g, 2.5), DomainError);
  EXPECT_NO_THROW(check_box_rule(c, g));
  EXPECT_THROW(check_box_rule(ConeSpec{{}, 2.5}, g), DomainError);
  const ConeSpec wide{{}, 8.0};
  EXPECT_THROW(validate_cone(wide, g, 7.9), DomainError);
}

TEST(Cones, ConstantStateLyapunovFunctional) {
  const int d = 2;
  const GridSpec g{d, 256, 16.0};
  const double A = 0.6, B = 0.3, m = 0.5, p = 4.0, t = 2.0;
  const auto s = constant(g, {m, p}, A, B, t);
  const ConeSpec c{{}, 3.0};
  const double l0 = std::pow(t * B + (d - 1) * A / 2.0, 2) / (2.0 * t) - t * std::pow(A, p + 2) / (p + 2) +
                    (d * d - 1.0) * A * A / (8.0 * t) + t * m * m * A * A / 2.0;
  const double h2 = g.spacing() * g.spacing();
  EXPECT_NEAR(L_functional(s, c), l0 * h2 * static_cast<double>(points_in_ball(g, t)), 1e-11);
  EXPECT_NEAR(L_functional(s, c) / (std::numbers::pi * t * t * l0), 1.0, 1e-2);
}

TEST(Cones, ConstantStateWeightedFunctional) {
  const int d = 2;
  const GridSpec g{d, 256, 16.0};
  const double A = 0.6, B = -0.2, m = 0.4, p = 3.0, t = 2.0;
  const auto s = constant(g, {m, p}, A, B, t);
  const double alpha = 0.5 - (d / 2.0 - 2.0 / p);
  const double z0 = std::pow(t * B + 2.0 * A / p, 2) / (2.0 * t) - t * std::pow(A, p + 2) / (p + 2) +
                    (0.5 * m * m * t + (p + 2) / (p * p * t)) * A * A;
  // radial quadrature of the weight (t^2 - r^2)^alpha over the disc
  const double weight = std::numbers::pi * std::pow(t, 2 * alpha + 2) / (alpha + 1);
  EXPECT_NEAR(Z_functional(s, ConeSpec{{}, 3.0}) / (z0 * weight), 1.0, 5e-3);
  EXPECT_THROW(Z_functional(constant(g, {m, 4.0}, A, B, t), ConeSpec{{}, 3.0}), DomainError);
}

TEST(Cones, RadialAngularSplitIsOrthogonal) {
  const GridSpec g{3, 16, 8.0};
  const auto u = nlkg::testing::band_limited(g, 7, 4.0);
  const auto grad = gradient(u);
  const Point vertex{0.5, -0.25, 1.0};
  const auto split = radial_angular_split(grad, vertex);
  double worst = 0.0, worst_dot = 0.0;
  for_each_point(g, [&](std::size_t i, const Point& xp) {
    const auto x = displacement(xp, vertex, g);
    double g2 = 0.0, a2 = 0.0, dot = 0.0;
    for (int a = 0; a < 3; ++a) {
      g2 += grad[a][i] * grad[a][i];
      a2 += split.angular[a][i] * split.angular[a][i];
      dot += split.angular[a][i] * x[a];
    }
    worst = std::max(worst, std::abs(split.radial[i] * split.radial[i] + a2 - g2));
    worst_dot = std::max(worst_dot, std::abs(dot));
  });
  EXPECT_LT(worst, 1e-10);
  EXPECT_LT(worst_dot, 1e-10);
}

TEST(Cones, ZeroStateGivesZero) {
  const GridSpec g{2, 32, 16.0};
  const auto z = zero_state(g, {0.5, 3.0}, 1.0);
  const ConeSpec c{{}, 2.0};
  EXPECT_EQ(L_functional(z, c), 0.0);
  EXPECT_EQ(Z_functional(z, c), 0.0);
  EXPECT_EQ(flux_boundary_term(z, c), 0.0);
  EXPECT_EQ(flux_bulk_term(z, c), 0.0);
  for (const auto& m : cone_monitors(c, critical_exponent(2, 5.0))) EXPECT_EQ(m.evaluate(z), 0.0) << m.name;
}

TEST(Cones, LinearEnergyFluxIdentity) {
  const GridSpec g{2, 128, 32.0};
  const Physics ph{0.5, 4.0};
  const auto init = gaussian(g, ph, 1.0, 0.6);
  ConeSpec c{{}, 4.0, -3.0, false};
  c.nonlinear = false;
  const auto traj = evolve(init, linear_config(0.01, 1.0, 5));
  const auto check = energy_flux_check(traj, c, 3.0, 4.0);
  EXPECT_GT(check.lhs, 0.0);
  EXPECT_LT(check.gap, 1e-4);
}

TEST(Cones, QuadraticHomogeneityOfAveragedBound) {
  const GridSpec g{2, 64, 32.0};
  const Physics ph{0.0, 4.0};
  const ConeSpec c{{}, 4.0, -2.0, false};
  auto run = [&](double A) { return evolve(gaussian(g, ph, A, 1.0), linear_config(0.05, 2.0, 2)); };
  const double a1 = averaged_gradient_bound(run(1.0), c, 2.0, 0.5);
  const double a2 = averaged_gradient_bound(run(2.0), c, 2.0, 0.5);
  EXPECT_GT(a1, 0.0);
  EXPECT_NEAR(a2 / a1, 4.0, 1e-9);
  EXPECT_THROW(averaged_gradient_bound(run(1.0), c, 3.9, 0.5), DomainError);
}

TEST(Cones, ConeMonitorSeriesForConstantBlowup) {
  // u = A everywhere blows up like the ODE; seen from the reflected cone at the
  // blowup time, the normalized half-cone mass tends to a constant.
  const GridSpec g{2, 128, 8.0};
  const double p = 3.0, A = 1.6;
  const auto params = critical_exponent(2, p);
  SolverConfig cfg;
  cfg.dt_init = 2e-3;
  cfg.dt_min = 1e-12;
  cfg.t_max = 10.0;
  cfg.snapshot_stride = 20;
  cfg.blowup_threshold = 1e4;
  cfg.store_snapshots = false;
  const double tstar = lifespan_upper(A, p);
  ConeSpec c{{}, tstar, tstar, true};
  const auto monitors = cone_monitors(c, params);
  const auto traj = evolve(constant(g, {0.0, p}, A), cfg, monitors);
  const auto series = cone_monitor(traj, c);
  ASSERT_EQ(series.size(), 3u);
  const auto& mass = series[0];
  EXPECT_EQ(mass.name, "mass_half");
  ASSERT_GT(mass.size(), 10u);
  const double t_lo = mass.times.front(), t_hi = std::min(mass.times.back(), 10.0 * t_lo);
  EXPECT_LT(band_width(mass, t_lo, t_hi), 2.0);
  // exact constant: mass_half = pi (t/2)^2 u^2 with u from the ODE
  const double u_mid = std::sqrt(mass.values[mass.size() / 2] * std::pow(mass.times[mass.size() / 2], 2 * params.s_c) /
                                 (std::numbers::pi * std::pow(mass.times[mass.size() / 2] / 2, 2)));
  EXPECT_GT(u_mid, A);
}

TEST(Cones, MonotonicityReport) {
  DiagnosticSeries s;
  s.name = "x";
  s.times = {1, 2, 3, 4};
  s.values = {1.0, 2.0, 1.9999, 3.0};
  auto r = monotonicity(s, 1e-4);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_NEAR(r.worst_decrease, 1e-4 / 3.0, 1e-12);
  s.values[2] = 1.5;
  EXPECT_EQ(monotonicity(s, 1e-4).violations, 1u);
  s.times[2] = 2.0;
  EXPECT_THROW(s.validate(), DomainError);
}

#include <gtest/gtest.h>

#include <cmath>

#include "nlkg/blowup.hpp"
#include "nlkg/initial_data.hpp"
#include "nlkg/ode_oracle.hpp"

using namespace nlkg;

namespace {

SolverConfig blowup_config(double dt, double threshold, std::size_t stride = 10) {
  SolverConfig c;
  c.dt_init = dt;
  c.dt_min = 1e-14;
  c.t_max = 10.0;
  c.snapshot_stride = stride;
  c.blowup_threshold = threshold;
  return c;
}

const Trajectory& ode_run() {
  static const Trajectory traj = evolve(constant({2, 32, 8.0}, {0.0, 2.0}, 1.0), blowup_config(1e-3, 1e8));
  return traj;
}

}  // namespace

TEST(Blowup, OdeLifespanAndRates) {
  const auto r = detect_and_fit(ode_run());
  ASSERT_TRUE(r.detected) << r.diagnostics;
  EXPECT_NEAR(r.t_star / lifespan_upper(1.0, 2.0), 1.0, 1e-2);
  EXPECT_GT(r.t_star, ode_run().last.time);
  EXPECT_EQ(r.fit_window.size(), 20u);
  EXPECT_NEAR(r.rate_exponents.at("sup_norm"), -1.0, 0.03);
  EXPECT_GE(r.rate_exponents.at("mass"), -4.0 / 2.0 * 1.03);
}

TEST(Blowup, NoBlowupIsNotDetected) {
  const GridSpec g{2, 16, 8.0};
  SolverConfig c = blowup_config(1e-2, 1e8);
  c.t_max = 0.5;
  EXPECT_FALSE(detect_and_fit(evolve(zero_state(g, {0.0, 2.0}), c)).detected);
  c.nonlinear = false;
  const auto lin = detect_and_fit(evolve(gaussian(g, {0.0, 2.0}, 5.0, 1.0), c));
  EXPECT_FALSE(lin.detected);
  EXPECT_FALSE(lin.diagnostics.empty());
}

TEST(Blowup, ScalingDividesLifespan) {
  const auto r = detect_and_fit(ode_run());
  const auto scaled = detect_and_fit(rescale_trajectory(ode_run(), 2.0));
  ASSERT_TRUE(scaled.detected);
  EXPECT_NEAR(scaled.t_star * 2.0 / r.t_star, 1.0, 0.02);
  EXPECT_EQ(rescale_trajectory(ode_run(), 2.0).grid().box_length, 4.0);
}

TEST(Blowup, ConstantDataMassMatchesOde) {
  const double A = 1.0, p = 2.0;
  const GridSpec g{2, 16, 8.0};
  const auto traj = evolve(constant(g, {0.0, p}, A), blowup_config(1e-4, 1e8, 200));
  const auto ms = mass_diagnostics(traj);
  std::vector<double> times;
  for (double t : ms.times)
    if (t < 1.5) times.push_back(t);
  ASSERT_GT(times.size(), 5u);
  const auto ode = ode_oracle(A, 0.0, 0.0, p, times);
  const double V = g.volume();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double v = ode.v[i], dv = ode.dv[i];
    EXPECT_NEAR(ms.M[i] / (V * v * v), 1.0, 1e-6);
    EXPECT_NEAR(ms.M_prime[i], 2 * V * v * dv, 1e-6 * std::abs(2 * V * v * dv) + 1e-9);
    EXPECT_NEAR(ms.M_doubleprime[i] / (2 * V * (dv * dv + std::pow(v, p + 2))), 1.0, 1e-6);
  }
  ASSERT_TRUE(ms.t0_index.has_value());
  EXPECT_EQ(*ms.t0_index, 0u);
  const auto cc = concavity_check(ms);
  EXPECT_EQ(cc.inequality_violations, 0u);
  EXPECT_EQ(cc.concavity_violations, 0u);
}

TEST(Blowup, ZeroTrajectoryMass) {
  const GridSpec g{2, 16, 8.0};
  SolverConfig c = blowup_config(1e-2, 1e8);
  c.t_max = 0.2;
  const auto traj = evolve(zero_state(g, {0.5, 2.0}), c);
  const auto ms = mass_diagnostics(traj);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    EXPECT_EQ(ms.M[i], 0.0);
    EXPECT_EQ(ms.M_prime[i], 0.0);
    EXPECT_EQ(ms.M_doubleprime[i], 0.0);
  }
  const auto cc = concavity_check(ms);
  EXPECT_EQ(cc.inequality_violations + cc.concavity_violations, 0u);
  const auto tm = truncated_mass(traj, 1.0);
  for (double m : tm.M) EXPECT_EQ(m, 0.0);
  for (double v : critical_norm_series(traj).values) EXPECT_EQ(v, 0.0);
}

TEST(Blowup, MassDerivativesMatchDifferences) {
  // fixed dt, smooth nonlinear window: M' against centred differences (O(dt^2)),
  // M'' against second differences (order >= 1.8)
  const GridSpec g{2, 64, 16.0};
  const auto init = gaussian(g, {0.5, 3.0}, 1.0, 1.5);
  std::vector<double> gaps1, gaps2;
  for (double dt : {0.02, 0.01, 0.005}) {
    SolverConfig c = blowup_config(dt, 1e8, 1);
    c.adaptive = false;
    c.t_max = 0.4;
    const auto ms = mass_diagnostics(evolve(init, c));
    double g1 = 0.0, g2 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 1; i + 1 < ms.size(); ++i) {
      const double h = ms.times[i + 1] - ms.times[i];
      g1 = std::max(g1, std::abs((ms.M[i + 1] - ms.M[i - 1]) / (2 * h) - ms.M_prime[i]));
      g2 = std::max(g2, std::abs((ms.M[i + 1] - 2 * ms.M[i] + ms.M[i - 1]) / (h * h) - ms.M_doubleprime[i]));
      s1 = std::max(s1, std::abs(ms.M_prime[i]));
      s2 = std::max(s2, std::abs(ms.M_doubleprime[i]));
    }
    gaps1.push_back(g1 / s1);
    gaps2.push_back(g2 / s2);
  }
  for (std::size_t k = 1; k < gaps1.size(); ++k) {
    EXPECT_GT(std::log2(gaps1[k - 1] / gaps1[k]), 1.8) << k;
    EXPECT_GT(std::log2(gaps2[k - 1] / gaps2[k]), 1.8) << k;
  }
  EXPECT_LT(gaps1.front(), 1e-2);
}

TEST(Blowup, CutoffProfile) {
  EXPECT_EQ(mass_cutoff(0.3), 1.0);
  EXPECT_DOUBLE_EQ(mass_cutoff(1.5), 0.5);
  EXPECT_EQ(mass_cutoff(2.5), 0.0);
  for (double r : {1.0, 1.5, 2.0}) {
    EXPECT_NEAR(mass_cutoff(r - 1e-9), mass_cutoff(r + 1e-9), 1e-8);
    EXPECT_NEAR(mass_cutoff_d1(r - 1e-9), mass_cutoff_d1(r + 1e-9), 1e-8);
  }
  for (double r : {1.2, 1.7}) {
    EXPECT_NEAR((mass_cutoff(r + 1e-6) - mass_cutoff(r - 1e-6)) / 2e-6, mass_cutoff_d1(r), 1e-6);
    EXPECT_NEAR((mass_cutoff_d1(r + 1e-6) - mass_cutoff_d1(r - 1e-6)) / 2e-6, mass_cutoff_d2(r), 1e-6);
  }
}

TEST(Blowup, TruncatedMassOfCompactData) {
  const GridSpec g{2, 128, 40.0};
  SolverConfig c = blowup_config(5e-3, 1e8, 10);
  c.t_max = 1.0;
  const auto traj = evolve(gaussian(g, {0.0, 2.0}, 0.5, 0.5), c);
  const auto tm = truncated_mass(traj, 8.0);
  const auto full = mass_diagnostics(traj);
  for (std::size_t i = 0; i < tm.size(); ++i) EXPECT_NEAR(tm.M[i], full.M[i], 1e-10 * full.M[i]);
  EXPECT_THROW(truncated_mass(traj, 9.5), DomainError);
}

TEST(Blowup, NegativeEnergyRun) {
  const GridSpec g{2, 64, 32.0};
  const auto init = negative_energy(g, {0.0, 2.0}, 1.0, 1.5);
  ASSERT_LT(energy(init), 0.0);
  const auto traj = evolve(init, blowup_config(2e-3, 1e4));
  ASSERT_EQ(traj.termination, Termination::blowup_detected);
  const auto ms = mass_diagnostics(traj);
  ASSERT_TRUE(ms.t0_index.has_value());
  const auto cc = concavity_check(ms);
  EXPECT_EQ(cc.inequality_violations, 0u);
  EXPECT_EQ(cc.concavity_violations, 0u);
  EXPECT_LT(truncated_mass(traj, 4.0).identity_gap, 1e-3);
}

TEST(Blowup, ResolvedWindowStopsAtEnergyDrift) {
  MassSeries s;
  s.energy = {-1.0, -1.0, -0.995, -0.98, 5.0, -1.0};
  for (std::size_t i = 0; i < s.energy.size(); ++i) {
    s.times.push_back(0.1 * i);
    s.M.push_back(1.0 + i);
    s.M_prime.push_back(1.0);
    s.M_doubleprime.push_back(1.0);
    s.grad_sq.push_back(1.0);
  }
  s.t0_index = 4;
  const auto r = resolved_window(s, 1e-2);
  EXPECT_EQ(r.size(), 3u);
  EXPECT_EQ(r.M.size(), 3u);
  EXPECT_FALSE(r.t0_index.has_value());
  EXPECT_EQ(resolved_window(s, 0.05).size(), 4u);
  EXPECT_THROW(resolved_window(s, 0.0), DomainError);
}

TEST(Blowup, CriticalNormOfPlaneWaveIsConstant) {
  const GridSpec g{2, 32, 2.0 * M_PI};
  SolverConfig c = blowup_config(1e-2, 1e8, 5);
  c.t_max = 1.0;
  c.nonlinear = false;
  const auto traj = evolve(plane_wave(g, {1.0, 3.0}, {2, 1, 0}, 0.7, true), c);
  const auto s = critical_norm_series(traj);
  ASSERT_GT(s.size(), 5u);
  for (double v : s.values) EXPECT_NEAR(v / s.values.front(), 1.0, 1e-6);
}

TEST(Blowup, LowerBoundReducesForConstantData) {
  const GridSpec g{2, 64, 8.0};
  const double p = 3.0, A = 1.0;
  const auto traj = evolve(constant(g, {0.0, p}, A), blowup_config(1e-3, 1e4, 50));
  const double tstar = lifespan_upper(A, p);
  const auto s = lower_bound_check(traj, tstar, {1.0, -2.0, 0.0});
  ASSERT_GT(s.size(), 5u);
  const double sc = 1.0 - 2.0 / p;
  const double h = g.spacing();
  const auto ode = ode_oracle(A, 0.0, 0.0, p, s.times);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double tau = tstar - s.times[i];
    std::size_t count = 0;
    for_each_point(g, [&](std::size_t, const Point& x) {
      if (norm(displacement(x, {1.0, -2.0, 0.0}, g)) <= tau) ++count;
    });
    const double oracle = std::pow(tau, -2 * sc) * count * h * h * (ode.v[i] * ode.v[i] + tau * tau * ode.dv[i] * ode.dv[i]);
    EXPECT_NEAR(s.values[i] / oracle, 1.0, 1e-4) << s.times[i];
  }
}

TEST(Blowup, SurfaceOfConstantDataIsFlat) {
  const auto sigma = blowup_surface_estimate(ode_run(), 1e3);
  const double s0 = sigma[0];
  for (double v : sigma.values()) EXPECT_EQ(v, s0);
  const double tcross = lifespan_upper(1.0, 2.0) - std::sqrt(2.0) / 1e3;
  EXPECT_NEAR(s0, tcross, 1e-3);
  EXPECT_THROW(blowup_surface_estimate(ode_run(), 1e12), DomainError);
}

TEST(Blowup, LipschitzEnvelope) {
  const GridSpec g{2, 32, 8.0};
  Field f(g, kInfinity);
  f[5 * 32 + 7] = 1.0;
  f[20 * 32 + 20] = 3.5;
  for_each_point(g, [&](std::size_t i, const Point& x) {
    if (x[0] > 2.0 && x[1] < -1.0) f[i] = 2.0 + 0.3 * std::sin(5.0 * x[0]);
  });
  const auto env = lipschitz_envelope(f);
  const auto twice = lipschitz_envelope(env);
  for (std::size_t i = 0; i < env.size(); ++i) {
    EXPECT_LE(env[i], f[i]);
    EXPECT_EQ(twice[i], env[i]);
  }
  const double h = g.spacing();
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      const double here = env[i * g.n + j];
      EXPECT_LE(std::abs(env[i * g.n + (j + 1) % g.n] - here), h + 1e-12);
      EXPECT_LE(std::abs(env[((i + 1) % g.n) * g.n + j] - here), h + 1e-12);
    }
}

TEST(Blowup, SurfaceOfTwoBumps) {
  const GridSpec g{2, 128, 32.0};
  const Physics ph{0.0, 2.0};
  auto init = gaussian(g, ph, 2.0, 2.0, {-6.0, 0.0, 0.0});
  init.u += gaussian(g, ph, 1.9, 2.0, {6.0, 0.0, 0.0}).u;
  const auto traj = evolve(init, blowup_config(2e-3, 1e4, 5));
  ASSERT_EQ(traj.termination, Termination::blowup_detected);
  const auto sigma = blowup_surface_estimate(traj, 20.0);
  auto at = [&](double x) {
    const auto i = static_cast<std::size_t>(std::lround((x + 16.0) / g.spacing()));
    const auto j = static_cast<std::size_t>(std::lround(16.0 / g.spacing()));
    return sigma[i * g.n + j];
  };
  const double left = at(-6.0), right = at(6.0);
  ASSERT_TRUE(std::isfinite(right));
  EXPECT_LT(left, right);
  for (double dx : {-1.0, 1.0}) {
    EXPECT_LT(left, at(-6.0 + dx));
    EXPECT_LT(right, at(6.0 + dx));
  }
}

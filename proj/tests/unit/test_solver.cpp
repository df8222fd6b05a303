#include <gtest/gtest.h>

#include <cmath>

#include "nlkg/initial_data.hpp"
#include "nlkg/norms.hpp"
#include "nlkg/ode_oracle.hpp"
#include "nlkg/solver.hpp"
#include "unit/support.hpp"

using namespace nlkg;
using nlkg::testing::max_abs_diff;
using nlkg::testing::random_field;

namespace {

State random_state(const GridSpec& g, const Physics& ph, unsigned seed) {
  return State{random_field(g, seed, 0.1), random_field(g, seed + 1, 0.1), 0.0, ph};
}

double state_diff(const State& a, const State& b) {
  return std::max(max_abs_diff(a.u, b.u), max_abs_diff(a.v, b.v));
}

double state_scale(const State& a) { return std::max(a.u.max_abs(), a.v.max_abs()); }

}  // namespace

TEST(LinearPropagator, IdentityAtZeroTime) {
  const GridSpec g{2, 32, 5.0};
  const auto s = random_state(g, {0.5, 2.0}, 1);
  EXPECT_LT(state_diff(linear_propagator(s, 0.0), s), 1e-14);
}

TEST(LinearPropagator, EigenmodeDispersion) {
  const GridSpec g{2, 32, 2.0 * M_PI};
  const double m = 0.6, dt = 0.37;
  const auto s = plane_wave(g, {m, 2.0}, {2, 1, 0}, 1.0);
  const auto out = linear_propagator(s, dt);
  const double w = bessel_symbol(std::sqrt(5.0), m);
  EXPECT_LT(max_abs_diff(out.u, std::cos(dt * w) * s.u), 1e-13);
  EXPECT_LT(max_abs_diff(out.v, -w * std::sin(dt * w) * s.u), 1e-13);
  EXPECT_DOUBLE_EQ(out.time, dt);
}

TEST(LinearPropagator, MasslessZeroModeLimit) {
  const GridSpec g{2, 16, 3.0};
  const auto s = constant(g, {0.0, 2.0}, 1.5, -0.25);
  const auto out = linear_propagator(s, 2.0);
  EXPECT_LT(max_abs_diff(out.u, Field(g, 1.0)), 1e-14);
  EXPECT_LT(max_abs_diff(out.v, Field(g, -0.25)), 1e-14);
}

TEST(LinearPropagator, GroupPropertyAndTimeReversal) {
  const GridSpec g{2, 32, 5.0};
  for (double m : {0.0, 0.8}) {
    const auto s = random_state(g, {m, 2.0}, 2);
    const auto two = linear_propagator(linear_propagator(s, 0.3), 0.45);
    const auto one = linear_propagator(s, 0.75);
    EXPECT_LT(state_diff(two, one) / state_scale(one), 1e-10);
    const auto back = linear_propagator(linear_propagator(s, 0.6), -0.6);
    EXPECT_LT(state_diff(back, s) / state_scale(s), 1e-10);
  }
}

TEST(NonlinearKick, Arithmetic) {
  const GridSpec g{2, 16, 3.0};
  const Physics ph{0.0, 2.0};
  const auto z = zero_state(g, ph);
  EXPECT_EQ(state_diff(nonlinear_kick(z, 0.1).state, z), 0.0);
  const auto one = constant(g, ph, 1.0, 0.5);
  const auto k = nonlinear_kick(one, 0.1);
  EXPECT_FALSE(k.overflow);
  EXPECT_LT(max_abs_diff(k.state.v, Field(g, 0.6)), 1e-15);
  EXPECT_EQ(max_abs_diff(k.state.u, one.u), 0.0);
}

TEST(NonlinearKick, AffineInTime) {
  const GridSpec g{2, 32, 5.0};
  for (auto dealias : {Dealias::none, Dealias::pad2x}) {
    const auto s = random_state(g, {0.3, 3.0}, 3);
    const auto halves = nonlinear_kick(nonlinear_kick(s, 0.05, dealias).state, 0.05, dealias).state;
    const auto whole = nonlinear_kick(s, 0.1, dealias).state;
    EXPECT_LT(state_diff(halves, whole), 1e-15);
  }
}

TEST(NonlinearKick, PaddingIsExactForResolvedCubic) {
  // u = cos(x): u^3 = (3 cos x + cos 3x) / 4 is resolved on n = 16, so both variants agree.
  const GridSpec g{1, 16, 2.0 * M_PI};
  const auto s = plane_wave(g, {0.0, 2.0}, {1, 0, 0}, 1.0);
  const auto a = nonlinear_kick(s, 1.0, Dealias::none).state;
  const auto b = nonlinear_kick(s, 1.0, Dealias::pad2x).state;
  EXPECT_LT(max_abs_diff(a.v, b.v), 1e-13);
}

TEST(NonlinearKick, OverflowIsFlagged) {
  const GridSpec g{1, 8, 1.0};
  auto s = constant(g, {0.0, 2.0}, 1e200);
  EXPECT_TRUE(nonlinear_kick(s, 0.1).overflow);
}

TEST(StrangStep, ZeroAndLinearDegenerate) {
  const GridSpec g{2, 32, 5.0};
  const auto z = zero_state(g, {0.5, 2.0});
  EXPECT_EQ(state_diff(strang_step(z, 0.01).state, z), 0.0);
  const auto s = random_state(g, {0.5, 2.0}, 4);
  const auto a = strang_step(s, 0.01, Dealias::none, false).state;
  const auto b = linear_propagator(s, 0.01);
  EXPECT_LT(state_diff(a, b), 1e-12);
}

TEST(StrangStep, SecondOrderAgainstOdeOracle) {
  const GridSpec g{2, 8, 2.0 * M_PI};
  const Physics ph{0.0, 2.0};
  const double T = 0.5;
  const double t_grid[] = {T};
  const double exact = ode_oracle(1.0, 0.0, 0.0, 2.0, t_grid).v[0];
  std::vector<double> errors;
  for (int steps : {50, 100, 200, 400}) {
    SolverConfig cfg;
    cfg.dt_init = T / steps;
    cfg.adaptive = false;
    cfg.t_max = T;
    cfg.store_snapshots = false;
    const auto traj = evolve(constant(g, ph, 1.0), cfg);
    errors.push_back(std::abs(traj.last.u[0] - exact));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_GE(std::log2(errors[i - 1] / errors[i]), 1.8);
}

TEST(Evolve, ZeroDataStaysZero) {
  const GridSpec g{2, 16, 4.0};
  SolverConfig cfg;
  cfg.dt_init = 0.05;
  cfg.t_max = 1.0;
  cfg.snapshot_stride = 5;
  const auto traj = evolve(zero_state(g, {0.0, 2.0}), cfg);
  EXPECT_EQ(traj.termination, Termination::reached_t_max);
  EXPECT_EQ(traj.snapshots.size(), 5u);
  for (const auto& s : traj.snapshots) EXPECT_EQ(state_scale(s), 0.0);
  EXPECT_DOUBLE_EQ(traj.last.time, 1.0);
}

TEST(Evolve, SnapshotTimesIncreaseAndLastStepIsClipped) {
  const GridSpec g{2, 16, 4.0};
  SolverConfig cfg;
  cfg.dt_init = 0.03;
  cfg.t_max = 0.1;
  cfg.snapshot_stride = 1;
  const auto traj = evolve(gaussian(g, {0.0, 2.0}, 0.1, 0.4), cfg);
  ASSERT_GE(traj.snapshots.size(), 2u);
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
    EXPECT_GT(traj.snapshots[i].time, traj.snapshots[i - 1].time);
  EXPECT_DOUBLE_EQ(traj.snapshots.back().time, 0.1);
  EXPECT_EQ(traj.at("sup_norm").size(), traj.steps + 1);
}

TEST(Evolve, EnergyDriftSmallData) {
  const GridSpec g{2, 64, 10.0};
  SolverConfig cfg;
  cfg.dt_init = 1e-3;
  cfg.t_max = 0.5;
  cfg.store_snapshots = false;
  cfg.snapshot_stride = 50;
  const auto traj = evolve(gaussian(g, {0.5, 2.0}, 0.5, 1.0), cfg);
  const auto& e = traj.at("energy").values;
  EXPECT_LT(std::abs(e.back() - e.front()) / std::abs(e.front()), 1e-6);
}

TEST(Evolve, TimeReversalLinear) {
  const GridSpec g{2, 32, 8.0};
  const auto s0 = gaussian(g, {0.4, 2.0}, 1.0, 0.8);
  StrangStepper fwd(g, s0.physics, Dealias::none, false);
  State s = s0;
  for (int i = 0; i < 100; ++i) fwd.step(s, 0.01);
  for (int i = 0; i < 100; ++i) fwd.step(s, -0.01);
  EXPECT_LT(state_diff(s, s0) / state_scale(s0), 1e-8);
}

TEST(Evolve, FiniteSpeedOfPropagation) {
  // The band-limited interpolant of compact data has tails set by how well the
  // bump is resolved; R = 4 on n = 512 puts them below 1e-8.
  const GridSpec g{2, 512, 20.0};
  State s0 = zero_state(g, {0.0, 2.0});
  const double R = 4.0;
  for_each_point(g, [&](std::size_t i, const Point& x) {
    const double r2 = (x[0] * x[0] + x[1] * x[1]) / (R * R);
    if (r2 < 1.0) s0.u[i] = std::exp(1.0 - 1.0 / (1.0 - r2));
  });
  SolverConfig cfg;
  cfg.dt_init = 0.02;
  cfg.t_max = 1.0;
  cfg.store_snapshots = false;
  const auto traj = evolve(s0, cfg);
  const double reach = R + 1.0 + 3.0 * g.spacing();
  double outside = 0.0;
  for_each_point(g, [&](std::size_t i, const Point& x) {
    if (std::hypot(x[0], x[1]) > reach) outside = std::max(outside, std::abs(traj.last.u[i]));
  });
  EXPECT_LT(outside, 1e-8);
}

TEST(Evolve, CorruptionKeepsLastGoodState) {
  const GridSpec g{1, 8, 1.0};
  auto s = zero_state(g, {0.0, 2.0});
  for (std::size_t i = 0; i < g.n; ++i) s.v[i] = 1e308;
  SolverConfig cfg;
  cfg.dt_init = 0.01;
  cfg.t_max = 1.0;
  const auto traj = evolve(s, cfg);
  EXPECT_EQ(traj.termination, Termination::corrupted);
  EXPECT_EQ(traj.steps, 0u);
  EXPECT_TRUE(traj.last.v.all_finite());
}

TEST(Evolve, UnderflowAndValidation) {
  const GridSpec g{1, 8, 1.0};
  SolverConfig cfg;
  cfg.dt_init = 0.01;
  cfg.dt_min = 0.005;
  cfg.t_max = 1.0;
  const auto traj = evolve(constant(g, {0.0, 2.0}, 10.0), cfg);
  EXPECT_EQ(traj.termination, Termination::dt_underflow);

  SolverConfig bad = cfg;
  bad.dt_min = 0.02;
  EXPECT_THROW(evolve(zero_state(g, {0.0, 2.0}), bad), DomainError);
  bad = cfg;
  bad.dt_init = 1.0;
  EXPECT_THROW(evolve(zero_state(g, {0.0, 2.0}), bad), DomainError);
  bad = cfg;
  bad.blowup_threshold = 0.5;
  EXPECT_THROW(evolve(zero_state(g, {0.0, 2.0}), bad), DomainError);
  EXPECT_THROW(evolve(zero_state(g, {1.5, 2.0}), cfg), DomainError);
}

TEST(Evolve, MonitorsAndDeterminism) {
  const GridSpec g{2, 32, 8.0};
  const auto s0 = gaussian(g, {0.0, 3.0}, 1.0, 0.8);
  SolverConfig cfg;
  cfg.dt_init = 0.01;
  cfg.t_max = 0.3;
  cfg.monitor_stride = 3;
  const Monitor mon{"l2", [](const State& s) { return lebesgue_norm(s.u, 2.0).value; }};
  const auto a = evolve(s0, cfg, std::span(&mon, 1));
  const auto b = evolve(s0, cfg, std::span(&mon, 1));
  EXPECT_EQ(a.at("l2").values, b.at("l2").values);
  EXPECT_EQ(a.at("l2").size(), a.at("energy").size());
  EXPECT_THROW(a.at("missing"), DomainError);
}

TEST(InitialData, Library) {
  const GridSpec g{2, 128, 16.0};
  const Physics ph{0.0, 2.0};
  EXPECT_EQ(state_scale(constant(g, ph, 0.0)), 0.0);
  // integral of A^2 exp(-r^2/w^2) over R^2 is pi A^2 w^2
  const auto gs = gaussian(g, ph, 2.0, 1.2);
  EXPECT_NEAR(std::pow(lebesgue_norm(gs.u, 2.0).value, 2) / (M_PI * 4.0 * 1.44), 1.0, 1e-4);
  const auto neg = negative_energy(g, ph, 0.5, 1.0);
  EXPECT_LT(energy(neg), 0.0);
  const auto lp = log_profile(g, ph, 5.0);
  EXPECT_NEAR(lp.u.max_abs(), std::sqrt(std::log(5.0)), 1e-14);
  EXPECT_THROW(log_profile(GridSpec{3, 16, 16.0}, ph, 5.0), DomainError);
  EXPECT_THROW(make_initial_data(g, ph, DataSpec{"nope"}), DomainError);
  const auto tw = plane_wave(g, {1.0, 2.0}, {1, 0, 0}, 1.0, true);
  const auto moved = linear_propagator(tw, 0.3);
  // travelling wave: u(t, x) = cos(k x - w t)
  const double k = 2.0 * M_PI / 16.0, w = std::sqrt(1.0 + k * k);
  double err = 0.0;
  for_each_point(g, [&](std::size_t i, const Point& x) { err = std::max(err, std::abs(moved.u[i] - std::cos(k * x[0] - w * 0.3))); });
  EXPECT_LT(err, 1e-12);
}

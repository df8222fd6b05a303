#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlkg/state.hpp"

namespace nlkg {

enum class Dealias { none, pad2x };

enum class Termination { reached_t_max, blowup_detected, dt_underflow, corrupted };

std::string to_string(Termination t);
std::string to_string(Dealias d);

struct SolverConfig {
  double dt_init = 1e-3;
  double dt_min = 1e-15;
  /// dt may not exceed cfl_safety * h.
  double cfl_safety = 1.0;
  /// dt = dt_init * min(1, theta / ||u||_inf^(p/2)) when adaptive.
  double theta = 1.0;
  bool adaptive = true;
  double blowup_threshold = 1e8;
  double t_max = 1.0;
  std::size_t snapshot_stride = 10;
  /// Steps between monitor evaluations; 0 means snapshot_stride.
  std::size_t monitor_stride = 0;
  bool store_snapshots = true;
  Dealias dealias = Dealias::none;
  /// false drops the |u|^p u source (linear Klein-Gordon flow).
  bool nonlinear = true;

  void validate(const GridSpec& grid) const;
};

struct Series {
  std::vector<double> times;
  std::vector<double> values;

  void push(double t, double v) {
    times.push_back(t);
    values.push_back(v);
  }
  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

/// Named scalar observer evaluated on the evolving state; must not mutate anything shared.
struct Monitor {
  std::string name;
  std::function<double(const State&)> evaluate;
};

struct Trajectory {
  std::vector<State> snapshots;
  Termination termination = Termination::reached_t_max;
  /// "sup_norm" and "dt" are recorded every step; "energy" and user monitors every monitor stride.
  std::map<std::string, Series> series;
  /// Last finite state reached (always kept, also when snapshots are not stored).
  State last;
  std::size_t steps = 0;
  /// Copied from the config; false marks a linear Klein-Gordon trajectory.
  bool nonlinear = true;

  const Series& at(const std::string& name) const;
  const GridSpec& grid() const { return last.grid(); }
  const Physics& physics() const { return last.physics; }
};

/// Exact linear Klein-Gordon flow S_m(dt) on (u, u_t), applied in Fourier space.
State linear_propagator(const State& state, double dt);

struct KickResult {
  State state;
  bool overflow = false;  ///< |u|^p u was not finite somewhere (blowup candidate)
};

/// v <- v + dt |u|^p u with u frozen.
KickResult nonlinear_kick(const State& state, double dt, Dealias dealias = Dealias::none);

/// kick(dt/2) o linear(dt) o kick(dt/2).
KickResult strang_step(const State& state, double dt, Dealias dealias = Dealias::none,
                       bool nonlinear = true);

/// Reusable stepper holding the cached propagator symbols for one grid and mass.
class StrangStepper {
 public:
  StrangStepper(const GridSpec& grid, const Physics& physics, Dealias dealias, bool nonlinear);
  ~StrangStepper();
  StrangStepper(StrangStepper&&) noexcept;
  StrangStepper& operator=(StrangStepper&&) noexcept;

  /// Advances in place; returns false when the nonlinear kick overflowed.
  bool step(State& state, double dt);
  void linear(State& state, double dt);
  bool kick(State& state, double dt);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Steps until t_max, the blowup threshold or dt underflow; NaN ends the run
/// with `corrupted` and keeps the last finite state.
Trajectory evolve(const State& initial, const SolverConfig& config,
                  std::span<const Monitor> monitors = {});

}  // namespace nlkg

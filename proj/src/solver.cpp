#include "nlkg/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nlkg/norms.hpp"

namespace nlkg {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::reached_t_max: return "reached_t_max";
    case Termination::blowup_detected: return "blowup_detected";
    case Termination::dt_underflow: return "dt_underflow";
    case Termination::corrupted: return "corrupted";
  }
  return "unknown";
}

std::string to_string(Dealias d) { return d == Dealias::pad2x ? "pad2x" : "none"; }

void SolverConfig::validate(const GridSpec& grid) const {
  require(dt_init > 0.0 && std::isfinite(dt_init), "solver: dt_init must be positive");
  require(dt_min > 0.0 && dt_min < dt_init, "solver: need 0 < dt_min < dt_init");
  require(blowup_threshold > 1.0, "solver: blowup_threshold must exceed 1");
  require(t_max >= 0.0 && std::isfinite(t_max), "solver: t_max must be finite and >= 0");
  require(theta > 0.0, "solver: theta must be positive");
  require(snapshot_stride >= 1, "solver: snapshot_stride must be >= 1");
  if (dt_init > cfl_safety * grid.spacing()) {
    std::ostringstream os;
    os << "solver: dt_init = " << dt_init << " exceeds cfl_safety * h = " << cfl_safety * grid.spacing();
    throw DomainError(os.str());
  }
}

const Series& Trajectory::at(const std::string& name) const {
  auto it = series.find(name);
  if (it == series.end()) throw DomainError("trajectory: no series named '" + name + "'");
  return it->second;
}

namespace {

// Maps half-spectrum indices of an n-grid into those of the 2n-grid. Entries
// touching a Nyquist index map to npos (dropped when padding).
std::vector<std::size_t> padding_map(const GridSpec& small) {
  constexpr auto npos = std::numeric_limits<std::size_t>::max();
  const std::size_t n = small.n;
  const std::size_t N = 2 * n;
  const std::size_t half = n / 2 + 1;
  const std::size_t Half = N / 2 + 1;
  std::vector<std::size_t> map(small.spectral_size(), npos);
  auto full = [&](std::size_t i) -> std::size_t {
    if (i == n / 2) return npos;
    return i < n / 2 ? i : i + n;
  };
  std::size_t idx = 0;
  const std::size_t outer0 = small.dim >= 2 ? n : 1;
  const std::size_t outer1 = small.dim >= 3 ? n : 1;
  for (std::size_t i = 0; i < outer0; ++i) {
    for (std::size_t j = 0; j < outer1; ++j) {
      for (std::size_t k = 0; k < half; ++k, ++idx) {
        if (k == n / 2) continue;
        std::size_t big = k;
        bool keep = true;
        if (small.dim >= 3) {
          const auto bi = full(i), bj = full(j);
          keep = bi != npos && bj != npos;
          big = (bi * N + bj) * Half + k;
        } else if (small.dim == 2) {
          const auto bi = full(i);
          keep = bi != npos;
          big = bi * Half + k;
        }
        if (keep) map[idx] = big;
      }
    }
  }
  return map;
}

}  // namespace

struct StrangStepper::Impl {
  GridSpec grid;
  Physics physics;
  Dealias dealias;
  bool nonlinear;
  std::vector<double> omega;
  double cached_dt = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> c, s_over, m_s;
  GridSpec fine;
  std::vector<std::size_t> pad;

  Impl(const GridSpec& g, const Physics& ph, Dealias d, bool nl)
      : grid(g), physics(ph), dealias(d), nonlinear(nl) {
    omega.resize(g.spectral_size());
    for_each_mode(g, [&](std::size_t i, const Mode& mode) {
      omega[i] = bessel_symbol(mode.magnitude, ph.mass);
    });
    if (d == Dealias::pad2x) {
      fine = g;
      fine.n = 2 * g.n;
      pad = padding_map(g);
    }
  }

  void prepare(double dt) {
    if (dt == cached_dt) return;
    cached_dt = dt;
    const std::size_t n = omega.size();
    c.resize(n);
    s_over.resize(n);
    m_s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = omega[i];
      if (w == 0.0) {
        c[i] = 1.0;
        s_over[i] = dt;
        m_s[i] = 0.0;
      } else {
        const double sn = std::sin(w * dt);
        c[i] = std::cos(w * dt);
        s_over[i] = sn / w;
        m_s[i] = -w * sn;
      }
    }
  }

  void linear(State& st, double dt) {
    prepare(dt);
    auto U = forward_transform(st.u);
    auto V = forward_transform(st.v);
    for (std::size_t i = 0; i < omega.size(); ++i) {
      const auto u0 = U.coefficients[i];
      const auto v0 = V.coefficients[i];
      U.coefficients[i] = c[i] * u0 + s_over[i] * v0;
      V.coefficients[i] = m_s[i] * u0 + c[i] * v0;
    }
    st.u = inverse_transform(U);
    st.v = inverse_transform(V);
  }

  Field source(const Field& u) const {
    const double p = physics.exponent;
    auto pointwise = [p](const Field& f) {
      Field out(f.grid());
      auto in = f.values();
      auto o = out.values();
      for (std::size_t i = 0; i < in.size(); ++i) {
        const double a = std::abs(in[i]);
        o[i] = abs_pow(a, p) * in[i];
      }
      return out;
    };
    if (dealias == Dealias::none) return pointwise(u);
    const auto U = forward_transform(u);
    SpectralField big{fine, std::vector<std::complex<double>>(fine.spectral_size())};
    const double up = static_cast<double>(fine.size()) / static_cast<double>(grid.size());
    for (std::size_t i = 0; i < pad.size(); ++i)
      if (pad[i] != std::numeric_limits<std::size_t>::max()) big.coefficients[pad[i]] = up * U.coefficients[i];
    const auto fine_src = pointwise(inverse_transform(big));
    if (!fine_src.all_finite()) return fine_src;  // overflow propagates to the caller's check
    const auto S = forward_transform(fine_src);
    SpectralField small{grid, std::vector<std::complex<double>>(grid.spectral_size())};
    for (std::size_t i = 0; i < pad.size(); ++i)
      if (pad[i] != std::numeric_limits<std::size_t>::max()) small.coefficients[i] = S.coefficients[pad[i]] / up;
    return inverse_transform(small);
  }

  bool kick(State& st, double dt) {
    if (!nonlinear) return true;
    const auto src = source(st.u);
    if (!src.all_finite()) return false;
    auto v = st.v.values();
    auto s = src.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += dt * s[i];
    return true;
  }
};

StrangStepper::StrangStepper(const GridSpec& grid, const Physics& physics, Dealias dealias,
                             bool nonlinear)
    : impl_(std::make_unique<Impl>(grid, physics, dealias, nonlinear)) {}
StrangStepper::~StrangStepper() = default;
StrangStepper::StrangStepper(StrangStepper&&) noexcept = default;
StrangStepper& StrangStepper::operator=(StrangStepper&&) noexcept = default;

bool StrangStepper::step(State& state, double dt) {
  if (!impl_->kick(state, 0.5 * dt)) return false;
  impl_->linear(state, dt);
  if (!impl_->kick(state, 0.5 * dt)) return false;
  state.time += dt;
  return true;
}

void StrangStepper::linear(State& state, double dt) {
  impl_->linear(state, dt);
  state.time += dt;
}

bool StrangStepper::kick(State& state, double dt) { return impl_->kick(state, dt); }

State linear_propagator(const State& state, double dt) {
  require(std::isfinite(dt), "linear_propagator: dt must be finite");
  State out = state;
  StrangStepper(state.grid(), state.physics, Dealias::none, false).linear(out, dt);
  return out;
}

KickResult nonlinear_kick(const State& state, double dt, Dealias dealias) {
  KickResult r{state, false};
  r.overflow = !StrangStepper(state.grid(), state.physics, dealias, true).kick(r.state, dt);
  return r;
}

KickResult strang_step(const State& state, double dt, Dealias dealias, bool nonlinear) {
  KickResult r{state, false};
  r.overflow = !StrangStepper(state.grid(), state.physics, dealias, nonlinear).step(r.state, dt);
  return r;
}

Trajectory evolve(const State& initial, const SolverConfig& config, std::span<const Monitor> monitors) {
  initial.validate();
  config.validate(initial.grid());
  initial.u.ensure_finite("evolve: initial u");
  initial.v.ensure_finite("evolve: initial v");

  Trajectory traj;
  traj.nonlinear = config.nonlinear;
  const std::size_t monitor_stride = config.monitor_stride ? config.monitor_stride : config.snapshot_stride;
  StrangStepper stepper(initial.grid(), initial.physics, config.dealias, config.nonlinear);
  const double half_p = 0.5 * initial.exponent();

  State state = initial;
  auto& sup = traj.series["sup_norm"];
  auto& dts = traj.series["dt"];
  auto& en = traj.series["energy"];
  for (const auto& m : monitors) traj.series[m.name];

  auto observe = [&](const State& s) {
    en.push(s.time, energy(s));
    for (const auto& m : monitors) traj.series[m.name].push(s.time, m.evaluate(s));
  };
  auto store = [&](const State& s) {
    if (config.store_snapshots) traj.snapshots.push_back(s);
  };

  double sup_u = state.u.max_abs();
  sup.push(state.time, sup_u);
  observe(state);
  store(state);

  const double t_end = initial.time + config.t_max;
  std::size_t step = 0;
  bool stored_last = true;
  bool observed_last = true;
  traj.termination = Termination::reached_t_max;

  while (state.time < t_end) {
    double dt = config.dt_init;
    if (config.adaptive && config.nonlinear && sup_u > 0.0) {
      dt *= std::min(1.0, config.theta / std::pow(sup_u, half_p));
    }
    if (dt < config.dt_min) {
      traj.termination = Termination::dt_underflow;
      break;
    }
    const double remaining = t_end - state.time;
    const bool last_step = dt >= remaining;
    if (last_step) dt = remaining;

    State next = state;
    const bool ok = stepper.step(next, dt);
    if (last_step) next.time = t_end;
    if (!ok || !next.u.all_finite() || !next.v.all_finite()) {
      traj.termination = (ok || !next.u.all_finite()) ? Termination::corrupted : Termination::blowup_detected;
      break;
    }
    state = std::move(next);
    ++step;
    sup_u = state.u.max_abs();
    sup.push(state.time, sup_u);
    dts.push(state.time, dt);

    stored_last = observed_last = false;
    if (step % config.snapshot_stride == 0) {
      store(state);
      stored_last = true;
    }
    if (step % monitor_stride == 0) {
      observe(state);
      observed_last = true;
    }
    if (sup_u > config.blowup_threshold) {
      traj.termination = Termination::blowup_detected;
      break;
    }
  }

  if (!stored_last) store(state);
  if (!observed_last) observe(state);
  traj.steps = step;
  traj.last = std::move(state);
  return traj;
}

}  // namespace nlkg

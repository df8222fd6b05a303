#include "nlkg/conslaws.hpp"

#include <cmath>
#include <sstream>

#include "nlkg/norms.hpp"

namespace nlkg {

std::string to_string(TensorKind k) {
  switch (k) {
    case TensorKind::energy: return "energy";
    case TensorKind::dilation: return "dilation";
    case TensorKind::mod_dilation: return "mod_dilation";
    case TensorKind::charge: return "charge";
    case TensorKind::conf_energy: return "conf_energy";
    case TensorKind::combined: return "combined";
  }
  return "unknown";
}

TensorKind tensor_kind_from_string(const std::string& name) {
  for (auto k : kAllTensorKinds)
    if (to_string(k) == name) return k;
  throw DomainError("unknown tensor kind '" + name + "'");
}

bool time_weighted(TensorKind k) {
  return k == TensorKind::dilation || k == TensorKind::mod_dilation || k == TensorKind::conf_energy ||
         k == TensorKind::combined;
}

namespace {

// Pointwise ingredients shared by all tensors.
struct Local {
  double u, v, t, r2, xg, g2, pot, upow;  // pot = lambda |u|^(p+2)/(p+2), upow = lambda |u|^(p+2)
  Point x, g;
};

struct Context {
  const State& state;
  TensorOptions opt;
  int d;
  double p, m2, lambda, t;
  std::vector<Field> grad;

  Context(const State& s, const TensorOptions& o)
      : state(s), opt(o), d(s.grid().dim), p(s.exponent()), m2(s.mass() * s.mass()),
        lambda(o.nonlinear ? 1.0 : 0.0), t(s.time - o.apex_time), grad(gradient(s.u)) {}

  template <class Fn>
  void each(Fn&& fn) const {
    Local L;
    for_each_point(state.grid(), [&](std::size_t i, const Point& xp) {
      L.x = displacement(xp, opt.apex, state.grid());
      L.u = state.u[i];
      L.v = state.v[i];
      L.t = t;
      L.g = {0.0, 0.0, 0.0};
      L.xg = L.g2 = L.r2 = 0.0;
      for (int a = 0; a < d; ++a) {
        L.g[a] = grad[a][i];
        L.xg += L.x[a] * L.g[a];
        L.g2 += L.g[a] * L.g[a];
        L.r2 += L.x[a] * L.x[a];
      }
      L.upow = lambda * abs_pow(L.u, p + 2.0);
      L.pot = L.upow / (p + 2.0);
      fn(i, static_cast<const Local&>(L));
    });
  }
};

double lagrangian(const Local& L, double m2) {
  return 0.5 * L.g2 - 0.5 * L.v * L.v + 0.5 * m2 * L.u * L.u - L.pot;
}

void check_time(const State& s, TensorKind kind, const TensorOptions& o) {
  if (time_weighted(kind) && !(s.time - o.apex_time > 0.0)) {
    std::ostringstream os;
    os << "eval_tensor: " << to_string(kind) << " needs t > 0 (got t = " << s.time - o.apex_time << ")";
    throw DomainError(os.str());
  }
}

double combined_alpha(const State& s, TensorKind kind) {
  if (kind != TensorKind::combined) return 0.0;
  const auto c = critical_exponent(s.grid().dim, s.exponent());
  if (c.regime != Regime::sub_conformal)
    throw DomainError("eval_tensor: combined tensor requires the sub-conformal regime (alpha > 0)");
  return c.alpha;
}

}  // namespace

std::pair<Field, Field> density_two_forms(const State& state, TensorKind kind, const TensorOptions& options) {
  require(kind == TensorKind::mod_dilation || kind == TensorKind::combined,
          "density_two_forms: only mod_dilation and combined have two forms");
  state.validate();
  check_time(state, kind, options);
  const double alpha = combined_alpha(state, kind);
  const Context c(state, options);
  const double dm1 = c.d - 1.0;
  Field def(state.grid()), exp(state.grid());
  c.each([&](std::size_t i, const Local& L) {
    const double t = L.t;
    const double W = L.xg + t * L.v + 0.5 * dm1 * L.u;
    const double d0 = t * lagrangian(L, c.m2) + W * L.v;
    const double div_f = (c.d * L.u * L.u + 2.0 * L.u * L.xg) / t;  // div(x u^2 / t)
    const double angular = 0.5 * t * (L.g2 - L.xg * L.xg / (t * t));
    if (kind == TensorKind::mod_dilation) {
      def[i] = d0 + 0.25 * dm1 * div_f;
      exp[i] = W * W / (2.0 * t) + angular - t * L.pot + (c.d * c.d - 1.0) / (8.0 * t) * L.u * L.u +
               0.5 * t * c.m2 * L.u * L.u;
    } else {
      const double Wp = L.xg + t * L.v + 2.0 / c.p * L.u;
      def[i] = d0 + alpha * L.u * L.v + div_f / c.p + 2.0 * alpha / c.p * L.u * L.u / t;
      exp[i] = Wp * Wp / (2.0 * t) + angular - t * L.pot +
               (0.5 * c.m2 * t + (c.p + 2.0) / (c.p * c.p * t)) * L.u * L.u;
    }
  });
  return {std::move(def), std::move(exp)};
}

TensorSample eval_tensor(const State& state, TensorKind kind, const TensorOptions& options) {
  state.validate();
  check_time(state, kind, options);
  const double alpha = combined_alpha(state, kind);
  const Context c(state, options);
  const auto& grid = state.grid();
  const int d = c.d;
  const double dm1 = d - 1.0;
  const double p = c.p, m2 = c.m2;
  const double conf = (p * dm1 - 4.0) / (p + 2.0);

  TensorSample out;
  out.kind = kind;
  out.eval_time = state.time;
  out.apex = options.apex;
  out.density = Field(grid);
  out.source = Field(grid);
  out.flux.assign(d, Field(grid));

  c.each([&](std::size_t i, const Local& L) {
    const double t = L.t;
    const double u = L.u, v = L.v;
    double z0 = 0.0, src = 0.0;
    double fg = 0.0;  // flux = fg * grad u + fx * x
    double fx = 0.0;
    switch (kind) {
      case TensorKind::energy:
        z0 = 0.5 * v * v + 0.5 * L.g2 + 0.5 * m2 * u * u - L.pot;
        fg = -v;
        break;
      case TensorKind::charge:
        z0 = u * v;
        fg = -u;
        src = v * v - L.g2 - m2 * u * u + L.upow;
        break;
      case TensorKind::dilation:
      case TensorKind::mod_dilation:
      case TensorKind::combined: {
        const double lag = lagrangian(L, m2);
        const double W = L.xg + t * v + 0.5 * dm1 * u;
        z0 = t * lag + W * v;
        fx = lag;
        fg = -W;
        src = 0.5 * conf * L.upow + m2 * u * u;
        const double dt_f = 2.0 * u * v / t - u * u / (t * t);  // d/dt (u^2 / t), x factored out
        const double div_f = (d * u * u + 2.0 * u * L.xg) / t;
        if (kind == TensorKind::mod_dilation) {
          z0 += 0.25 * dm1 * div_f;
          fx -= 0.25 * dm1 * dt_f;
        } else if (kind == TensorKind::combined) {
          z0 += alpha * u * v + div_f / p + 2.0 * alpha / p * u * u / t;
          fg -= alpha * u;
          fx -= dt_f / p;
          src += alpha * (v * v - L.g2 - m2 * u * u + L.upow) + 2.0 * alpha / p * dt_f;
        }
        break;
      }
      case TensorKind::conf_energy: {
        const double e0 = 0.5 * v * v + 0.5 * L.g2 + 0.5 * m2 * u * u - L.pot;
        const double tr = t * t + L.r2;
        z0 = tr * e0 + 2.0 * t * v * L.xg + dm1 * t * u * v - 0.5 * dm1 * u * u;
        fg = -(tr * v + 2.0 * t * L.xg + dm1 * t * u);
        fx = -2.0 * t * (0.5 * v * v - 0.5 * L.g2 - 0.5 * m2 * u * u + L.pot);
        src = t * conf * L.upow + 2.0 * t * m2 * u * u;
        break;
      }
    }
    out.density[i] = z0;
    out.source[i] = src;
    for (int a = 0; a < d; ++a) out.flux[a][i] = fg * L.g[a] + fx * L.x[a];
  });

  if (kind == TensorKind::mod_dilation || kind == TensorKind::combined) {
    const auto [def, exp] = density_two_forms(state, kind, options);
    double scale = 0.0, gap = 0.0;
    for (std::size_t i = 0; i < def.size(); ++i) {
      scale = std::max({scale, std::abs(def[i]), std::abs(exp[i]), std::abs(out.density[i])});
      gap = std::max({gap, std::abs(def[i] - exp[i]), std::abs(def[i] - out.density[i])});
    }
    if (gap > 1e-10 * scale) {
      std::ostringstream os;
      os << "eval_tensor: " << to_string(kind) << " density forms disagree (gap " << gap << ", scale " << scale << ")";
      throw Error(os.str());
    }
  }
  return out;
}

Field am_mono_integrand(const State& state, const TensorOptions& options) {
  state.validate();
  check_time(state, TensorKind::combined, options);
  const double alpha = combined_alpha(state, TensorKind::combined);
  const Context c(state, options);
  Field out(state.grid());
  c.each([&](std::size_t i, const Local& L) {
    const double w = L.t * L.t - L.r2;
    if (w <= 0.0) return;
    const double Wp = L.xg + L.t * L.v + 2.0 / c.p * L.u;
    out[i] = 2.0 * alpha * Wp * Wp * std::pow(w, alpha - 1.0) + c.m2 * L.u * L.u * std::pow(w, alpha);
  });
  return out;
}

Field divergence_residual(std::span<const State> window, TensorKind kind, const TensorOptions& options) {
  require(window.size() == 3, "divergence_residual: need exactly three snapshots");
  const auto& g = window[0].grid();
  require(window[1].grid() == g && window[2].grid() == g, "divergence_residual: snapshots on different grids");
  const double h0 = window[1].time - window[0].time;
  const double h1 = window[2].time - window[1].time;
  require(h0 > 0.0 && h1 > 0.0, "divergence_residual: times must increase");
  if (std::abs(h1 - h0) > 1e-9 * (h0 + h1)) {
    std::ostringstream os;
    os << "divergence_residual: unequal spacing " << h0 << " vs " << h1;
    throw DomainError(os.str());
  }
  const auto before = eval_tensor(window[0], kind, options);
  const auto mid = eval_tensor(window[1], kind, options);
  const auto after = eval_tensor(window[2], kind, options);
  Field res = divergence(mid.flux);
  const double inv = 1.0 / (window[2].time - window[0].time);
  for (std::size_t i = 0; i < res.size(); ++i)
    res[i] += (after.density[i] - before.density[i]) * inv - mid.source[i];
  return res;
}

ResidualNorms residual_norms(const Field& residual) {
  return {lebesgue_norm(residual, 2.0).value, residual.max_abs()};
}

std::vector<double> observed_orders(std::span<const double> errors) {
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) out.push_back(std::log2(errors[i - 1] / errors[i]));
  return out;
}

std::vector<RefinementStudy> refine_residual(const std::function<State(const GridSpec&)>& make_data,
                                             const GridSpec& base, const SolverConfig& base_config,
                                             double t_mid, int levels, std::span<const TensorKind> kinds,
                                             const TensorOptions& options) {
  require(levels >= 2, "refine_residual: need at least two levels");
  require(!kinds.empty(), "refine_residual: no tensor kinds");
  std::vector<RefinementStudy> studies(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    studies[k].kind = kinds[k];
    studies[k].t_mid = t_mid;
  }
  for (int level = 0; level < levels; ++level) {
    GridSpec grid = base;
    grid.n = base.n << level;
    const double dt = std::ldexp(base_config.dt_init, -level);
    const State initial = make_data(grid);
    const double span = t_mid - dt - initial.time;
    const double steps = span / dt;
    require(span >= 0.0 && std::abs(steps - std::round(steps)) < 1e-9,
            "refine_residual: t_mid - dt - t0 must be a nonnegative multiple of dt");
    StrangStepper stepper(grid, initial.physics, base_config.dealias, base_config.nonlinear);
    State s = initial;
    const auto n_steps = static_cast<long>(std::round(steps));
    for (long i = 0; i < n_steps; ++i)
      if (!stepper.step(s, dt)) throw Error("refine_residual: nonlinear overflow before the window");
    s.time = t_mid - dt;
    std::vector<State> window{s};
    for (int i = 0; i < 2; ++i) {
      if (!stepper.step(s, dt)) throw Error("refine_residual: nonlinear overflow in the window");
      window.push_back(s);
    }
    window[1].time = t_mid;
    window[2].time = t_mid + dt;
    for (auto& st : window) {
      st.u.ensure_finite("refine_residual");
      st.v.ensure_finite("refine_residual");
    }
    for (auto& study : studies) {
      const auto norms = residual_norms(divergence_residual(window, study.kind, options));
      study.levels.push_back({grid, dt, norms});
    }
  }
  for (auto& study : studies) {
    std::vector<double> l2, linf;
    for (const auto& lv : study.levels) {
      l2.push_back(lv.norms.l2);
      linf.push_back(lv.norms.linf);
    }
    study.orders_l2 = observed_orders(l2);
    study.orders_linf = observed_orders(linf);
  }
  return studies;
}

SlabIdentity charge_slab_identity(const Trajectory& traj, double t0, double t1) {
  require(t1 > t0, "charge_slab_identity: need t0 < t1");
  const double tol = 1e-9 * std::max(1.0, std::abs(t1));
  std::vector<const State*> inside;
  for (const auto& s : traj.snapshots)
    if (s.time >= t0 - tol && s.time <= t1 + tol) inside.push_back(&s);
  if (inside.size() < 3) {
    std::ostringstream os;
    os << "charge_slab_identity: only " << inside.size() << " snapshots in [" << t0 << ", " << t1 << "]";
    throw DomainError(os.str());
  }
  require(std::abs(inside.front()->time - t0) <= tol && std::abs(inside.back()->time - t1) <= tol,
          "charge_slab_identity: t0 and t1 must be snapshot times");
  TensorOptions opt;
  opt.nonlinear = traj.nonlinear;
  const double lambda = traj.nonlinear ? 1.0 : 0.0;
  std::vector<double> src, kin, pot;
  for (const State* s : inside) {
    const auto sample = eval_tensor(*s, TensorKind::charge, opt);
    src.push_back(sample.source.integral());
    double k = 0.0, q = 0.0;
    const double m2 = s->mass() * s->mass();
    for (std::size_t i = 0; i < s->u.size(); ++i) {
      k += s->v[i] * s->v[i];
      q += m2 * s->u[i] * s->u[i] - lambda * abs_pow(s->u[i], s->exponent() + 2.0);
    }
    kin.push_back(k * s->grid().cell_volume());
    pot.push_back(q * s->grid().cell_volume() + gradient_l2_squared(s->u));
  }
  SlabIdentity out;
  out.samples = inside.size();
  for (std::size_t i = 1; i < inside.size(); ++i) {
    const double h = inside[i]->time - inside[i - 1]->time;
    out.lhs += 0.5 * h * (src[i] + src[i - 1]);
    out.kinetic_average += 0.5 * h * (kin[i] + kin[i - 1]);
    out.potential_average += 0.5 * h * (pot[i] + pot[i - 1]);
  }
  out.kinetic_average /= (t1 - t0);
  out.potential_average /= (t1 - t0);
  out.rhs = eval_tensor(*inside.back(), TensorKind::charge, opt).density.integral() -
            eval_tensor(*inside.front(), TensorKind::charge, opt).density.integral();
  const double scale = std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-300});
  out.gap = std::abs(out.lhs - out.rhs) / scale;
  return out;
}

}  // namespace nlkg

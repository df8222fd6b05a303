#include "nlkg/cones.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlkg {

void validate_cone(const ConeSpec& cone, const GridSpec& grid, double t) {
  std::ostringstream os;
  if (!(cone.top_time > 0.0) || !std::isfinite(cone.top_time)) {
    os << "cone: top_time must be positive (got " << cone.top_time << ")";
    throw DomainError(os.str());
  }
  if (!(t > 0.0) || t > cone.top_time * (1.0 + 1e-12)) {
    os << "cone: time " << t << " outside (0, " << cone.top_time << "]";
    throw DomainError(os.str());
  }
  if (t + 3.0 * grid.spacing() > 0.5 * grid.box_length) {
    os << "cone: ball of radius " << t << " does not fit the box of length " << grid.box_length;
    throw DomainError(os.str());
  }
}

void check_box_rule(const ConeSpec& cone, const GridSpec& grid) {
  if (grid.box_length < 8.0 * cone.top_time) {
    std::ostringstream os;
    os << "cone: box length " << grid.box_length << " is below 8 * top_time = " << 8.0 * cone.top_time;
    throw DomainError(os.str());
  }
}

State cone_frame(const State& state, const ConeSpec& cone) {
  State out = state;
  out.time = cone.cone_time(state.time);
  if (cone.reflected) out.v *= -1.0;
  return out;
}

void DiagnosticSeries::validate() const {
  require(times.size() == values.size(), "diagnostic series '" + name + "': size mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(values[i]) || !std::isfinite(times[i]))
      throw CorruptionError("diagnostic series '" + name + "': non-finite sample");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw DomainError("diagnostic series '" + name + "': times must strictly increase");
  }
}

double band_width(const DiagnosticSeries& series, double t_lo, double t_hi) {
  double lo = kInfinity, hi = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.times[i] < t_lo || series.times[i] > t_hi) continue;
    const double a = std::abs(series.values[i]);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
    ++count;
  }
  if (count == 0) throw DomainError("band_width: no samples of '" + series.name + "' in the window");
  return lo > 0.0 ? hi / lo : kInfinity;
}

namespace {

// Pointwise data relative to the vertex in cone time.
struct ConePoint {
  double u, v, r, ur, g2, pot;
  Point x, g;
};

struct ConeView {
  State st;
  ConeSpec cone;
  std::vector<Field> grad;
  double t, p, m2, lambda;

  ConeView(const State& s, const ConeSpec& c, bool need_grad = true)
      : st(cone_frame(s, c)), cone(c), t(st.time), p(s.exponent()), m2(s.mass() * s.mass()),
        lambda(c.nonlinear ? 1.0 : 0.0) {
    validate_cone(c, s.grid(), t);
    if (need_grad) grad = gradient(st.u);
  }

  // Sums fn over grid points with |x| < radius, times the cell volume.
  template <class Fn>
  double integrate(double radius, Fn&& fn) const {
    const auto& g = st.grid();
    double acc = 0.0;
    for_each_point(g, [&](std::size_t i, const Point& xp) {
      ConePoint c;
      c.x = displacement(xp, cone.vertex, g);
      c.r = norm(c.x);
      if (c.r >= radius) return;
      c.u = st.u[i];
      c.v = st.v[i];
      c.g = {0.0, 0.0, 0.0};
      c.g2 = c.ur = 0.0;
      for (std::size_t a = 0; a < grad.size(); ++a) {
        c.g[a] = grad[a][i];
        c.g2 += c.g[a] * c.g[a];
        if (c.r > 0.0) c.ur += c.x[a] * c.g[a] / c.r;
      }
      c.pot = lambda * abs_pow(c.u, p + 2.0) / (p + 2.0);
      acc += fn(i, static_cast<const ConePoint&>(c));
    });
    return acc * g.cell_volume();
  }
};

TensorOptions cone_options(const ConeSpec& cone) {
  TensorOptions o;
  o.apex = cone.vertex;
  o.apex_time = 0.0;
  o.nonlinear = cone.nonlinear;
  return o;
}

double e0(const ConePoint& c, double m2) { return 0.5 * c.v * c.v + 0.5 * c.g2 + 0.5 * m2 * c.u * c.u - c.pot; }

// Integral of a piecewise linear series over [a, b] (clipped to the sampled range).
double integrate_series(const std::vector<double>& t, const std::vector<double>& y, double a, double b) {
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double lo = std::max(a, t[i - 1]), hi = std::min(b, t[i]);
    if (hi <= lo) continue;
    const double h = t[i] - t[i - 1];
    auto at = [&](double s) { return y[i - 1] + (y[i] - y[i - 1]) * (s - t[i - 1]) / h; };
    acc += 0.5 * (hi - lo) * (at(lo) + at(hi));
  }
  return acc;
}

}  // namespace

double L_functional(const State& state, const ConeSpec& cone) {
  const ConeView view(state, cone, false);
  const auto sample = eval_tensor(view.st, TensorKind::mod_dilation, cone_options(cone));
  return view.integrate(view.t, [&](std::size_t i, const ConePoint&) { return sample.density[i]; });
}

double Z_functional(const State& state, const ConeSpec& cone) {
  const auto params = critical_exponent(state.grid().dim, state.exponent());
  if (params.regime != Regime::sub_conformal)
    throw DomainError("Z_functional: only defined in the sub-conformal regime");
  const ConeView view(state, cone, false);
  const auto sample = eval_tensor(view.st, TensorKind::combined, cone_options(cone));
  const double t2 = view.t * view.t;
  return view.integrate(view.t, [&](std::size_t i, const ConePoint& c) {
    return sample.density[i] * std::pow(t2 - c.r * c.r, params.alpha);
  });
}

RadialSplit radial_angular_split(std::span<const Field> grad, const Point& vertex) {
  require(!grad.empty(), "radial_angular_split: empty gradient");
  const auto& g = grad[0].grid();
  require(static_cast<int>(grad.size()) == g.dim, "radial_angular_split: need d components");
  RadialSplit out{Field(g), std::vector<Field>(grad.begin(), grad.end())};
  for_each_point(g, [&](std::size_t i, const Point& xp) {
    const Point x = displacement(xp, vertex, g);
    const double r = norm(x);
    if (r == 0.0) return;
    double ur = 0.0;
    for (int a = 0; a < g.dim; ++a) ur += x[a] / r * grad[a][i];
    out.radial[i] = ur;
    for (int a = 0; a < g.dim; ++a) out.angular[a][i] -= x[a] / r * ur;
  });
  return out;
}

double flux_boundary_term(const State& state, const ConeSpec& cone) {
  const ConeView view(state, cone);
  const double t = view.t;
  return view.integrate(t, [&](std::size_t, const ConePoint& c) { return (t * t - c.r * c.r) / t * e0(c, view.m2); });
}

double flux_bulk_term(const State& state, const ConeSpec& cone) {
  const ConeView view(state, cone);
  const double t = view.t;
  return view.integrate(t, [&](std::size_t, const ConePoint& c) {
    const double rho = c.r / t;
    const double ang2 = std::max(0.0, c.g2 - c.ur * c.ur);
    const double plus = c.v + c.ur, minus = c.v - c.ur;
    return 0.25 * (1.0 + rho) * (1.0 + rho) * plus * plus + 0.25 * (1.0 - rho) * (1.0 - rho) * minus * minus +
           (1.0 + rho * rho) * (0.5 * ang2 + 0.5 * view.m2 * c.u * c.u - c.pot);
  });
}

namespace {

// Snapshots whose cone time lies in [t0, t1], sorted by cone time; the window must be covered.
std::vector<const State*> window_snapshots(const Trajectory& traj, const ConeSpec& cone, double t0, double t1,
                                           const char* who) {
  require(t1 > t0 && t0 > 0.0, std::string(who) + ": need 0 < t0 < t1");
  const double tol = 1e-9 * std::max(1.0, t1);
  std::vector<const State*> out;
  for (const auto& s : traj.snapshots) {
    const double t = cone.cone_time(s.time);
    if (t >= t0 - tol && t <= t1 + tol) out.push_back(&s);
  }
  std::sort(out.begin(), out.end(),
            [&](const State* a, const State* b) { return cone.cone_time(a->time) < cone.cone_time(b->time); });
  if (out.size() < 3) {
    std::ostringstream os;
    os << who << ": only " << out.size() << " snapshots in cone times [" << t0 << ", " << t1 << "]";
    throw DomainError(os.str());
  }
  return out;
}

}  // namespace

FluxCheck energy_flux_check(const Trajectory& traj, const ConeSpec& cone, double t0, double t1) {
  const auto snaps = window_snapshots(traj, cone, t0, t1, "energy_flux_check");
  const double tol = 1e-9 * std::max(1.0, t1);
  require(std::abs(cone.cone_time(snaps.front()->time) - t0) <= tol &&
              std::abs(cone.cone_time(snaps.back()->time) - t1) <= tol,
          "energy_flux_check: t0 and t1 must be snapshot times");
  FluxCheck out;
  out.lhs = flux_boundary_term(*snaps.back(), cone) - flux_boundary_term(*snaps.front(), cone);
  std::vector<double> ts, bulk;
  for (const State* s : snaps) {
    ts.push_back(cone.cone_time(s->time));
    bulk.push_back(flux_bulk_term(*s, cone));
  }
  out.rhs = integrate_series(ts, bulk, t0, t1);
  out.gap = std::abs(out.lhs - out.rhs) / std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-300});
  return out;
}

double averaged_gradient_bound(const Trajectory& traj, const ConeSpec& cone, double t0, double alpha) {
  const auto& grid = traj.grid();
  const auto params = critical_exponent(grid.dim, traj.physics().exponent);
  const int d = grid.dim;
  double t1 = 2.0 * t0;
  if (params.regime == Regime::conformal) {
    require(alpha > 0.0 && alpha <= 1.0, "averaged_gradient_bound: alpha must lie in (0, 1]");
    t1 = (1.0 + alpha) * t0;
  }
  const auto snaps = window_snapshots(traj, cone, t0, t1, "averaged_gradient_bound");
  std::vector<double> ts, vals;
  for (const State* s : snaps) {
    const ConeView view(*s, cone);
    const double t = view.t;
    double val = 0.0;
    switch (params.regime) {
      case Regime::conformal:
        val = view.integrate(alpha * t, [&](std::size_t, const ConePoint& c) {
          const double w = t - c.r;
          return std::pow(w, d + 1) * (c.v * c.v + c.g2) + std::pow(w, d - 1) * c.u * c.u;
        });
        break;
      case Regime::sub_conformal:
        val = view.integrate(t, [&](std::size_t, const ConePoint& c) {
          const double w = t - c.r;
          return std::pow(w, d + 2 - 2 * params.s_c) * (c.v * c.v + c.g2) + std::pow(w, d - 2 * params.s_c) * c.u * c.u;
        });
        break;
      case Regime::super_conformal:
        val = view.integrate(t, [&](std::size_t, const ConePoint& c) { return c.v * c.v + c.g2; });
        break;
    }
    ts.push_back(t);
    vals.push_back(val);
  }
  const double integral = integrate_series(ts, vals, t0, t1);
  switch (params.regime) {
    case Regime::conformal: return integral / (alpha * std::pow(t0, d + 1));
    case Regime::sub_conformal: return integral / std::pow(t0, d + 1);
    case Regime::super_conformal: break;
  }
  return integral;
}

namespace {

using Integrand = std::function<double(const ConePoint&, double t, double p)>;

Monitor cone_quantity(const std::string& name, const ConeSpec& cone, double radius_factor, Integrand f) {
  return {name, [cone, radius_factor, f](const State& s) {
            const double t = cone.cone_time(s.time);
            if (!(t > 0.0) || t > cone.top_time * (1.0 + 1e-12)) return std::numeric_limits<double>::quiet_NaN();
            const ConeView view(s, cone);
            return view.integrate(radius_factor * t,
                                  [&](std::size_t, const ConePoint& c) { return f(c, t, view.p); });
          }};
}

double kinetic(const ConePoint& c) { return c.v * c.v + c.g2; }

}  // namespace

std::vector<Monitor> cone_monitors(const ConeSpec& cone, const CriticalParams& params) {
  std::vector<Monitor> out;
  out.push_back(cone_quantity("cone.mass_half", cone, 0.5, [](const ConePoint& c, double, double) { return c.u * c.u; }));
  out.push_back(cone_quantity("cone.grad_half", cone, 0.5, [](const ConePoint& c, double, double) { return kinetic(c); }));
  if (params.regime == Regime::super_conformal) {
    out.push_back(cone_quantity("cone.mass_cone", cone, 1.0, [](const ConePoint& c, double, double) { return c.u * c.u; }));
    out.push_back(cone_quantity("cone.lp_cone", cone, 1.0, [](const ConePoint& c, double, double p) {
      return abs_pow(c.u, 0.5 * (p + 4.0));
    }));
    out.push_back(cone_quantity("cone.weighted_cone", cone, 1.0, [](const ConePoint& c, double t, double p) {
      const double w = 1.0 - c.r / t;
      return w * w * kinetic(c) + abs_pow(c.u, p + 2.0);
    }));
    out.push_back(cone_quantity("cone.grad_cone", cone, 1.0, [](const ConePoint& c, double, double) { return kinetic(c); }));
  }
  return out;
}

Monitor lyapunov_monitor(const ConeSpec& cone, const CriticalParams& params) {
  const bool sub = params.regime == Regime::sub_conformal;
  return {sub ? "cone.Z" : "cone.L", [cone, sub](const State& s) {
            const double t = cone.cone_time(s.time);
            if (!(t > 0.0) || t > cone.top_time * (1.0 + 1e-12)) return std::numeric_limits<double>::quiet_NaN();
            return sub ? Z_functional(s, cone) : L_functional(s, cone);
          }};
}

namespace {

// Smallest usable cone time: 10 dt, and the half-cone ball must span two cells.
double time_floor(const Trajectory& traj) {
  double floor = 4.0 * traj.grid().spacing();
  auto it = traj.series.find("dt");
  if (it != traj.series.end() && !it->second.empty())
    floor = std::max(floor, 10.0 * *std::max_element(it->second.values.begin(), it->second.values.end()));
  return floor;
}

// Raw series in cone time: from a recorded monitor when present, else from the snapshots.
DiagnosticSeries raw_series(const Trajectory& traj, const ConeSpec& cone, const Monitor& monitor, double t_floor) {
  std::vector<std::pair<double, double>> pts;
  auto it = traj.series.find(monitor.name);
  if (it != traj.series.end() && !it->second.empty()) {
    for (std::size_t i = 0; i < it->second.size(); ++i)
      pts.emplace_back(cone.cone_time(it->second.times[i]), it->second.values[i]);
  } else {
    for (const auto& s : traj.snapshots) pts.emplace_back(cone.cone_time(s.time), monitor.evaluate(s));
  }
  std::sort(pts.begin(), pts.end());
  DiagnosticSeries out;
  out.name = monitor.name.substr(monitor.name.rfind('.') + 1);
  for (const auto& [t, v] : pts) {
    if (!(t >= t_floor) || !(t > 0.0) || !std::isfinite(v)) continue;
    if (!out.times.empty() && t <= out.times.back()) continue;
    out.times.push_back(t);
    out.values.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<DiagnosticSeries> cone_monitor(const Trajectory& traj, const ConeSpec& cone) {
  const auto params = critical_exponent(traj.grid().dim, traj.physics().exponent);
  const double t_floor = time_floor(traj);
  const bool super = params.regime == Regime::super_conformal;
  const int d = params.dim;
  const double p = params.exponent;
  const double mass_power = super ? p * d / (p + 4.0) : 2.0 * params.s_c;

  std::map<std::string, DiagnosticSeries> raw;
  for (const auto& m : cone_monitors(cone, params)) raw[m.name] = raw_series(traj, cone, m, t_floor);

  auto tagged = [&](const std::string& name, const DiagnosticSeries& base) {
    DiagnosticSeries s;
    s.name = name;
    s.regime = params.regime;
    s.metadata["vertex_time"] = std::to_string(cone.vertex_time);
    s.metadata["reflected"] = cone.reflected ? "true" : "false";
    s.times = base.times;
    return s;
  };
  auto dyadic = [&](const std::string& name, const DiagnosticSeries& base, double power) {
    auto s = tagged(name, base);
    s.times.clear();
    if (base.size() < 2) return s;
    const double last = base.times.back();
    for (double t0 : base.times) {
      if (2.0 * t0 > last * (1.0 + 1e-12)) break;
      s.times.push_back(t0);
      s.values.push_back(integrate_series(base.times, base.values, t0, 2.0 * t0) / std::pow(t0, power));
    }
    return s;
  };

  std::vector<DiagnosticSeries> out;
  const auto& mass_half = raw["cone.mass_half"];
  const auto& grad_half = raw["cone.grad_half"];
  {
    auto s = tagged("mass_half", mass_half);
    for (std::size_t i = 0; i < mass_half.size(); ++i)
      s.values.push_back(mass_half.values[i] / std::pow(mass_half.times[i], mass_power));
    out.push_back(std::move(s));
  }
  out.push_back(dyadic("grad_dyadic_half", grad_half, super ? 0.0 : 2.0 * params.s_c - 1.0));
  if (!super) {
    auto s = tagged("pointwise_half", mass_half);
    for (std::size_t i = 0; i < mass_half.size(); ++i) {
      const double t = mass_half.times[i];
      s.values.push_back(std::pow(t, -2.0 * params.s_c) * mass_half.values[i] +
                         std::pow(t, 2.0 - 2.0 * params.s_c) * grad_half.values[i]);
    }
    out.push_back(std::move(s));
  } else {
    const auto& mass_cone = raw["cone.mass_cone"];
    auto s = tagged("mass_cone", mass_cone);
    for (std::size_t i = 0; i < mass_cone.size(); ++i)
      s.values.push_back(mass_cone.values[i] / std::pow(mass_cone.times[i], mass_power));
    out.push_back(std::move(s));
    auto lp = tagged("lp_cone", raw["cone.lp_cone"]);
    lp.values = raw["cone.lp_cone"].values;
    out.push_back(std::move(lp));
    out.push_back(dyadic("weighted_dyadic", raw["cone.weighted_cone"], 0.0));
    out.push_back(dyadic("grad_dyadic", raw["cone.grad_cone"], 0.0));
  }
  for (const auto& s : out) s.validate();
  return out;
}

DiagnosticSeries lyapunov_series(const Trajectory& traj, const ConeSpec& cone) {
  const auto params = critical_exponent(traj.grid().dim, traj.physics().exponent);
  auto s = raw_series(traj, cone, lyapunov_monitor(cone, params), time_floor(traj));
  s.regime = params.regime;
  s.validate();
  return s;
}

MonotonicityReport monotonicity(const DiagnosticSeries& series, double tol) {
  MonotonicityReport r;
  if (series.size() == 0) return r;
  double scale = 0.0, lo = kInfinity;
  for (double v : series.values) {
    scale = std::max(scale, std::abs(v));
    lo = std::min(lo, v);
  }
  if (scale == 0.0) return r;
  r.min_relative = lo / scale;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double drop = (series.values[i - 1] - series.values[i]) / scale;
    r.worst_decrease = std::max(r.worst_decrease, drop);
    if (drop > tol) ++r.violations;
  }
  return r;
}

}  // namespace nlkg

#include "nlkg/blowup.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nlkg {

namespace {

struct LineFit {
  double intercept = 0.0, slope = 0.0, residual = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.residual = std::sqrt(rss / n);
  return f;
}

double lambda_of(const Trajectory& traj) { return traj.nonlinear ? 1.0 : 0.0; }

// Energy with the nonlinearity switched by the trajectory flag.
double trajectory_energy(const State& s, double lambda, double grad_sq) {
  const double p = s.exponent(), m2 = s.mass() * s.mass();
  double acc = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i)
    acc += 0.5 * s.v[i] * s.v[i] + 0.5 * m2 * s.u[i] * s.u[i] - lambda * abs_pow(s.u[i], p + 2.0) / (p + 2.0);
  return acc * s.grid().cell_volume() + 0.5 * grad_sq;
}

// Second difference; NaN at the ends and where neighbouring spacings differ by more than 10%
// (the nonuniform formula drops to first order there).
std::vector<double> second_difference(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> out(t.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
    if (std::abs(h1 - h0) > 0.1 * std::max(h0, h1)) continue;
    out[i] = 2.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) / (h0 + h1);
  }
  return out;
}

void require_snapshots(const Trajectory& traj, std::size_t n, const char* who) {
  if (traj.snapshots.size() < n) {
    std::ostringstream os;
    os << who << ": needs at least " << n << " stored snapshots (have " << traj.snapshots.size() << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

PowerFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values, double t_star,
                       double fraction, std::size_t min_points) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double tau = t_star - times[i];
    if (!(tau > 0.0) || tau > fraction * t_star || !(values[i] > 0.0) || !std::isfinite(values[i])) continue;
    x.push_back(std::log(tau));
    y.push_back(std::log(values[i]));
  }
  PowerFit out;
  out.points = x.size();
  if (x.size() < min_points) {
    std::ostringstream os;
    os << "fit_power_law: only " << x.size() << " samples in the window (need " << min_points << ")";
    throw DomainError(os.str());
  }
  const auto f = least_squares(x, y);
  out.exponent = f.slope;
  out.prefactor = std::exp(f.intercept);
  out.residual = f.residual;
  return out;
}

BlowupReport detect_and_fit(const Trajectory& traj, const FitOptions& options) {
  BlowupReport r;
  if (traj.termination != Termination::blowup_detected) {
    r.diagnostics = "termination is " + to_string(traj.termination);
    return r;
  }
  const auto& sup = traj.at("sup_norm");
  const std::size_t K = options.tail_samples;
  if (sup.size() < std::max<std::size_t>(K, 3)) {
    r.diagnostics = "too few sup-norm samples";
    return r;
  }
  const double half_p = 0.5 * traj.physics().exponent;
  std::vector<double> t(sup.times.end() - K, sup.times.end()), y;
  for (std::size_t i = sup.size() - K; i < sup.size(); ++i) y.push_back(std::pow(sup.values[i], -half_p));
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (!(y[i] < y[i - 1])) {
      r.diagnostics = "non-monotone tail of ||u||_inf^(-p/2)";
      return r;
    }
  }
  // Regress in time relative to the window start for conditioning.
  std::vector<double> s(t);
  for (auto& v : s) v -= t.front();
  const auto f = least_squares(s, y);
  r.fit_window = t;
  r.fit_residual = f.residual;
  if (!(f.slope < 0.0)) {
    r.diagnostics = "fitted slope is not negative";
    return r;
  }
  r.t_star = t.front() - f.intercept / f.slope;
  if (!(r.t_star > traj.last.time) || !std::isfinite(r.t_star)) {
    std::ostringstream os;
    os << "fitted T* = " << r.t_star << " does not exceed the last time " << traj.last.time;
    r.diagnostics = os.str();
    return r;
  }
  r.detected = true;

  const double t_first = sup.times.front();
  const double span = r.t_star - t_first;
  auto fit = [&](const std::string& name, const std::vector<double>& times, const std::vector<double>& values) {
    std::vector<double> shifted(times);
    for (auto& v : shifted) v -= t_first;
    try {
      r.rate_exponents[name] =
          fit_power_law(shifted, values, span, options.window_fraction, options.min_points).exponent;
    } catch (const DomainError&) {
    }
  };
  for (const auto& [name, series] : traj.series) {
    if (std::all_of(series.values.begin(), series.values.end(), [](double v) { return v > 0.0; }))
      fit(name, series.times, series.values);
  }
  if (!traj.snapshots.empty()) {
    std::vector<double> times, mass;
    for (const auto& snap : traj.snapshots) {
      times.push_back(snap.time);
      double acc = 0.0;
      for (double u : snap.u.values()) acc += u * u;
      mass.push_back(acc * snap.grid().cell_volume());
    }
    fit("mass", times, mass);
  }
  return r;
}

MassSeries mass_diagnostics(const Trajectory& traj) {
  MassSeries out;
  out.exponent = traj.physics().exponent;
  const double lambda = lambda_of(traj);
  const double p = out.exponent;
  for (const auto& s : traj.snapshots) {
    const double m2 = s.mass() * s.mass();
    const double vol = s.grid().cell_volume();
    double M = 0.0, Mp = 0.0, kin = 0.0, mass_term = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      M += s.u[i] * s.u[i];
      Mp += 2.0 * s.u[i] * s.v[i];
      kin += s.v[i] * s.v[i];
    }
    M *= vol;
    Mp *= vol;
    kin *= vol;
    mass_term = m2 * M;
    const double g2 = gradient_l2_squared(s.u);
    const double E = trajectory_energy(s, lambda, g2);
    out.times.push_back(s.time);
    out.M.push_back(M);
    out.M_prime.push_back(Mp);
    out.M_doubleprime.push_back(-2.0 * (p + 2.0) * E + (p + 4.0) * kin + p * g2 + p * mass_term);
    out.energy.push_back(E);
    out.grad_sq.push_back(g2);
    if (!out.t0_index && 2.0 * (p + 2.0) * E <= 0.5 * p * g2) out.t0_index = out.times.size() - 1;
  }
  return out;
}

MassSeries resolved_window(const MassSeries& series, double drift_tol) {
  require(drift_tol > 0.0, "resolved_window: drift_tol must be positive");
  MassSeries out = series;
  if (series.size() == 0) return out;
  const double e0 = series.energy.front();
  const double scale = std::max(std::abs(e0), 1e-300);
  std::size_t n = 0;
  while (n < series.size() && std::abs(series.energy[n] - e0) <= drift_tol * scale) ++n;
  for (auto* v : {&out.times, &out.M, &out.M_prime, &out.M_doubleprime, &out.energy, &out.grad_sq})
    v->resize(std::min(n, v->size()));
  if (out.second_difference.size() > n) {
    out.second_difference.resize(n);
    if (n > 0) out.second_difference.back() = std::numeric_limits<double>::quiet_NaN();
  }
  if (out.t0_index && *out.t0_index >= n) out.t0_index.reset();
  return out;
}

ConcavityReport concavity_check(const MassSeries& series, double tol) {
  ConcavityReport r;
  if (!series.t0_index) return r;
  const double p = series.exponent;
  const std::size_t start = *series.t0_index;
  const std::size_t n = series.size();
  for (std::size_t i = start; i < n; ++i)
    r.inequality_scale = std::max(r.inequality_scale, 4.0 / (p + 4.0) * series.M[i] * series.M_doubleprime[i]);
  for (std::size_t i = start; i < n; ++i) {
    ++r.checked;
    const double excess = series.M_prime[i] * series.M_prime[i] - 4.0 / (p + 4.0) * series.M[i] * series.M_doubleprime[i];
    const double rel = r.inequality_scale > 0.0 ? excess / r.inequality_scale : excess;
    r.worst_inequality = std::max(r.worst_inequality, rel);
    if (rel > tol) ++r.inequality_violations;
  }
  if (n - start >= 3) {
    std::vector<double> t(series.times.begin() + start, series.times.end()), f;
    for (std::size_t i = start; i < n; ++i) f.push_back(std::pow(series.M[i], -0.25 * p));
    const auto d2 = second_difference(t, f);
    for (std::size_t i = 1; i + 1 < d2.size(); ++i) {
      if (!std::isfinite(d2[i])) continue;
      // d2 in units of the quotient produced by relative perturbations of f
      const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
      const double unit = (std::abs(f[i - 1]) + 2.0 * std::abs(f[i]) + std::abs(f[i + 1])) / (h0 * h1);
      const double rel = unit > 0.0 ? d2[i] / unit : 0.0;
      r.worst_concavity = std::max(r.worst_concavity, rel);
      if (rel > tol) ++r.concavity_violations;
    }
  }
  return r;
}

double mass_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r <= 1.5) return 1.0 - 2.0 * (r - 1.0) * (r - 1.0);
  if (r <= 2.0) return 2.0 * (2.0 - r) * (2.0 - r);
  return 0.0;
}

double mass_cutoff_d1(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  if (r <= 1.5) return -4.0 * (r - 1.0);
  return -4.0 * (2.0 - r);
}

double mass_cutoff_d2(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  return r <= 1.5 ? -4.0 : 4.0;
}

MassSeries truncated_mass(const Trajectory& traj, double radius) {
  require(radius > 0.0, "truncated_mass: radius must be positive");
  require_snapshots(traj, 1, "truncated_mass");
  const auto& grid = traj.grid();
  const double t_first = traj.snapshots.front().time;
  const double t_span = traj.snapshots.back().time - t_first;
  if (2.0 * (radius + t_span) + 3.0 * grid.spacing() > 0.5 * grid.box_length) {
    std::ostringstream os;
    os << "truncated_mass: cutoff support 2(R + t) = " << 2.0 * (radius + t_span) << " does not fit the box";
    throw DomainError(os.str());
  }
  const double lambda = lambda_of(traj);
  MassSeries out;
  out.radius = radius;
  out.exponent = traj.physics().exponent;
  const double p = out.exponent;
  for (const auto& s : traj.snapshots) {
    const double rho = radius + (s.time - t_first);
    const double m2 = s.mass() * s.mass();
    const auto grad = gradient(s.u);
    double M = 0.0, Mp = 0.0, bulk = 0.0, kin = 0.0, g2sum = 0.0, musq = 0.0;
    for_each_point(grid, [&](std::size_t i, const Point& xp) {
      const double r = norm(xp) / rho;
      const double phi = mass_cutoff(r), d1 = mass_cutoff_d1(r), d2 = mass_cutoff_d2(r);
      const double u = s.u[i], v = s.v[i];
      double g2 = 0.0, ur = 0.0;
      for (int a = 0; a < grid.dim; ++a) {
        g2 += grad[a][i] * grad[a][i];
        if (r > 0.0) ur += xp[a] / (r * rho) * grad[a][i];
      }
      const double dens = v * v + g2 + m2 * u * u;
      M += phi * u * u;
      Mp += -r * d1 / rho * u * u + 2.0 * phi * u * v;
      bulk += 4.0 * phi * v * v + p * dens + 2.0 * (1.0 - phi) * (dens - lambda * abs_pow(u, p + 2.0)) +
              (2.0 * r * d1 + r * r * d2) / (rho * rho) * u * u - 2.0 / rho * d1 * (2.0 * r * v + ur) * u;
      kin += v * v;
      g2sum += g2;
      musq += u * u;
    });
    const double vol = grid.cell_volume();
    const double E = trajectory_energy(s, lambda, gradient_l2_squared(s.u));
    out.times.push_back(s.time);
    out.M.push_back(M * vol);
    out.M_prime.push_back(Mp * vol);
    out.M_doubleprime.push_back(-2.0 * (p + 2.0) * E + bulk * vol);
    out.energy.push_back(E);
    out.grad_sq.push_back(g2sum * vol);
  }
  out.second_difference = second_difference(out.times, out.M);
  double gap = 0.0, scale = 0.0;
  for (std::size_t i = 1; i + 1 < out.size(); ++i) {
    if (!std::isfinite(out.second_difference[i])) continue;
    gap = std::max(gap, std::abs(out.second_difference[i] - out.M_doubleprime[i]));
    scale = std::max(scale, std::abs(out.M_doubleprime[i]));
  }
  out.identity_gap = scale > 0.0 ? gap / scale : gap;
  return out;
}

DiagnosticSeries critical_norm_series(const Trajectory& traj) {
  DiagnosticSeries out;
  out.name = "critical_norm";
  const auto params = critical_exponent(traj.grid().dim, traj.physics().exponent);
  out.regime = params.regime;
  for (const auto& s : traj.snapshots) {
    Field v = s.v;
    const double mean = v.integral() / s.grid().volume();
    for (auto& x : v.values()) x -= mean;
    out.times.push_back(s.time);
    out.values.push_back(sobolev_norm(s.u, params.s_c, true) + sobolev_norm(v, params.s_c - 1.0, false, 1.0));
  }
  return out;
}

DiagnosticSeries lower_bound_check(const Trajectory& traj, double t_star, const Point& x0) {
  DiagnosticSeries out;
  out.name = "lower_bound";
  const auto& grid = traj.grid();
  const auto params = critical_exponent(grid.dim, traj.physics().exponent);
  out.regime = params.regime;
  const double h = grid.spacing();
  for (const auto& s : traj.snapshots) {
    const double tau = t_star - s.time;
    if (tau < 2.0 * h) continue;
    require(tau + 3.0 * h <= 0.5 * grid.box_length, "lower_bound_check: ball T* - t does not fit the box");
    const auto grad = gradient(s.u);
    double acc = 0.0;
    for_each_point(grid, [&](std::size_t i, const Point& xp) {
      if (norm(displacement(xp, x0, grid)) > tau) return;
      double g2 = s.v[i] * s.v[i];
      for (int a = 0; a < grid.dim; ++a) g2 += grad[a][i] * grad[a][i];
      acc += s.u[i] * s.u[i] + tau * tau * g2;
    });
    out.times.push_back(s.time);
    out.values.push_back(std::pow(tau, -2.0 * params.s_c) * acc * grid.cell_volume());
  }
  return out;
}

Field lipschitz_envelope(const Field& sigma) {
  const auto& g = sigma.grid();
  const std::size_t n = g.n;
  const int d = g.dim;
  const double h = g.spacing();
  struct Offset {
    std::array<long, 3> step;
    double dist;
  };
  std::vector<Offset> offsets;
  for (long a = -1; a <= 1; ++a)
    for (long b = (d >= 2 ? -1 : 0); b <= (d >= 2 ? 1 : 0); ++b)
      for (long c = (d >= 3 ? -1 : 0); c <= (d >= 3 ? 1 : 0); ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        offsets.push_back({{a, b, c}, h * std::sqrt(static_cast<double>(a * a + b * b + c * c))});
      }
  const long N = static_cast<long>(n);
  auto index = [&](std::array<long, 3> ijk) {
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * n + static_cast<std::size_t>(((ijk[a] % N) + N) % N);
    return idx;
  };
  auto coords = [&](std::size_t idx) {
    std::array<long, 3> ijk{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      ijk[a] = static_cast<long>(idx % n);
      idx /= n;
    }
    return ijk;
  };
  Field out = sigma;
  const std::size_t total = out.size();
  for (int pass = 0; pass < 1000; ++pass) {
    bool changed = false;
    for (int dir = 0; dir < 2; ++dir) {
      for (std::size_t k = 0; k < total; ++k) {
        const std::size_t i = dir == 0 ? k : total - 1 - k;
        const auto ijk = coords(i);
        double best = out[i];
        for (const auto& o : offsets) {
          std::array<long, 3> nb = ijk;
          for (int a = 0; a < d; ++a) nb[a] += o.step[a];
          best = std::min(best, out[index(nb)] + o.dist);
        }
        if (best < out[i]) {
          out[i] = best;
          changed = true;
        }
      }
    }
    if (!changed) return out;
  }
  throw ConvergenceError("lipschitz_envelope: sweeps did not converge");
}

Field blowup_surface_estimate(const Trajectory& traj, double threshold) {
  require(threshold > 0.0, "blowup_surface_estimate: threshold must be positive");
  require_snapshots(traj, 1, "blowup_surface_estimate");
  const auto& snaps = traj.snapshots;
  Field sigma(traj.grid(), kInfinity);
  bool any = false;
  const double lt = std::log(threshold);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      const double a = std::abs(snaps[k].u[i]);
      if (a < threshold) continue;
      if (k == 0) {
        sigma[i] = snaps[0].time;
      } else {
        const double b = std::abs(snaps[k - 1].u[i]);
        const double t0 = snaps[k - 1].time, t1 = snaps[k].time;
        const double theta = b > 0.0 ? (lt - std::log(b)) / (std::log(a) - std::log(b)) : (threshold - b) / (a - b);
        sigma[i] = t0 + std::clamp(theta, 0.0, 1.0) * (t1 - t0);
      }
      any = true;
      break;
    }
  }
  if (!any) {
    std::ostringstream os;
    os << "blowup_surface_estimate: |u| never reaches " << threshold;
    throw DomainError(os.str());
  }
  return lipschitz_envelope(sigma);
}

Trajectory rescale_trajectory(const Trajectory& traj, double lambda) {
  require(lambda > 0.0, "rescale_trajectory: lambda must be positive");
  require(traj.physics().mass == 0.0, "rescale_trajectory: the scaling needs m = 0");
  const double p = traj.physics().exponent;
  const int d = traj.grid().dim;
  const double a = std::pow(lambda, 2.0 / p);
  GridSpec grid = traj.grid();
  grid.box_length /= lambda;
  auto map_state = [&](const State& s) {
    State out{Field(grid, std::vector<double>(s.u.values().begin(), s.u.values().end())),
              Field(grid, std::vector<double>(s.v.values().begin(), s.v.values().end())), s.time / lambda,
              s.physics};
    out.u *= a;
    out.v *= a * lambda;
    return out;
  };
  Trajectory out;
  out.termination = traj.termination;
  out.steps = traj.steps;
  out.nonlinear = traj.nonlinear;
  out.last = map_state(traj.last);
  for (const auto& s : traj.snapshots) out.snapshots.push_back(map_state(s));
  const std::map<std::string, double> factors{
      {"sup_norm", a}, {"dt", 1.0 / lambda}, {"energy", std::pow(lambda, 4.0 / p + 2.0 - d)}};
  for (const auto& [name, f] : factors) {
    auto it = traj.series.find(name);
    if (it == traj.series.end()) continue;
    Series s;
    for (std::size_t i = 0; i < it->second.size(); ++i) s.push(it->second.times[i] / lambda, it->second.values[i] * f);
    out.series[name] = std::move(s);
  }
  return out;
}

}  // namespace nlkg

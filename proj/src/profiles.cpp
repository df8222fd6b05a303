#include "nlkg/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlkg {

void FunctionFamily::validate() const {
  require(!members.empty(), "family: no members");
  for (const auto& f : members) {
    require(f.grid() == members.front().grid(), "family: members on different grids");
    f.ensure_finite("family member");
  }
}

Shift grid_index(const GridSpec& grid, std::size_t flat) {
  Shift s{0, 0, 0};
  for (int a = grid.dim - 1; a >= 0; --a) {
    s[a] = static_cast<long>(flat % grid.n);
    flat /= grid.n;
  }
  return s;
}

namespace {

std::size_t flat_index(const GridSpec& g, const Shift& s) {
  const long n = static_cast<long>(g.n);
  std::size_t idx = 0;
  for (int a = 0; a < g.dim; ++a) idx = idx * g.n + static_cast<std::size_t>(((s[a] % n) + n) % n);
  return idx;
}

Point center_point(const GridSpec& g, const Shift& s) {
  Point x{0.0, 0.0, 0.0};
  const long n = static_cast<long>(g.n);
  for (int a = 0; a < g.dim; ++a) x[a] = g.coordinate(static_cast<std::size_t>(((s[a] % n) + n) % n));
  return x;
}

double smoothstep(double s) { return s <= 0.0 ? 0.0 : s >= 1.0 ? 1.0 : s * s * s * (10.0 - 15.0 * s + 6.0 * s * s); }

// 1 on r <= R/2, quintic taper to 0 at r = R.
double taper(double r, double R) { return 1.0 - smoothstep((r - 0.5 * R) / (0.5 * R)); }

double minimum_peak_separation(const Field& f, double fraction) {
  const auto& g = f.grid();
  const double top = f.max_abs();
  std::vector<Point> peaks;
  if (top == 0.0) return kInfinity;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    if (a < fraction * top) continue;
    const auto s = grid_index(g, i);
    bool is_max = true;
    for (long dx = -1; dx <= 1 && is_max; ++dx)
      for (long dy = (g.dim >= 2 ? -1 : 0); dy <= (g.dim >= 2 ? 1 : 0) && is_max; ++dy)
        for (long dz = (g.dim >= 3 ? -1 : 0); dz <= (g.dim >= 3 ? 1 : 0) && is_max; ++dz) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const double b = std::abs(f[flat_index(g, {s[0] + dx, s[1] + dy, s[2] + dz})]);
          // ties broken by index so a plateau yields one peak
          const std::size_t j = flat_index(g, {s[0] + dx, s[1] + dy, s[2] + dz});
          if (b > a || (b == a && j < i)) is_max = false;
        }
    if (is_max) peaks.push_back(f.position(i));
  }
  double best = kInfinity;
  for (std::size_t i = 0; i < peaks.size(); ++i)
    for (std::size_t j = i + 1; j < peaks.size(); ++j) best = std::min(best, norm(displacement(peaks[i], peaks[j], g)));
  return best;
}

double default_window_radius(const FunctionFamily& family, const ExtractOptions& options) {
  return window_radius_rule(family.grid(), minimum_peak_separation(family.members.back(), options.peak_fraction));
}

double measured_alpha(double value, double base, double ratio) {
  if (!(value > 0.0) || !(base > 0.0) || ratio == 1.0 || !(ratio > 0.0)) return 0.0;
  return std::log(value / base) / std::log(ratio);
}

double level_of(const SobolevLevels& l) { return std::sqrt(l.h1_sq + l.hsc_sq); }

}  // namespace

double window_radius_rule(const GridSpec& grid, double separation) {
  require(separation > 0.0, "window_radius_rule: separation must be positive");
  return std::max(8.0 * grid.spacing(), std::isfinite(separation) ? 0.25 * separation : 0.125 * grid.box_length);
}

Field translate(const Field& f, const Shift& shift) {
  const auto& g = f.grid();
  Field out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto s = grid_index(g, i);
    for (int a = 0; a < g.dim; ++a) s[a] += shift[a];
    out[flat_index(g, s)] = f[i];
  }
  return out;
}

SobolevLevels sobolev_levels(const Field& f, const CriticalParams& params) {
  SobolevLevels l;
  l.h1_sq = gradient_l2_squared(f);
  const double hs = sobolev_norm(f, params.s_c, true);
  l.hsc_sq = hs * hs;
  l.lp_pow = std::pow(lebesgue_norm(f, params.exponent + 2.0).value, params.exponent + 2.0);
  return l;
}

Extraction inverse_gn_extract(const FunctionFamily& family, const CriticalParams& params,
                              const ExtractOptions& options) {
  family.validate();
  const auto& g = family.grid();
  require(g.dim == params.dim, "inverse_gn_extract: dimension mismatch");
  const double p = params.exponent;
  Extraction out;
  auto& st = out.stats;
  st.epsilon = kInfinity;
  for (const auto& f : family.members) {
    const auto l = sobolev_levels(f, params);
    st.epsilon = std::min(st.epsilon, std::pow(l.lp_pow, 1.0 / (p + 2.0)));
    st.M = std::max(st.M, level_of(l));
  }
  if (!(st.epsilon > options.floor)) {
    std::ostringstream os;
    os << "inverse_gn_extract: epsilon = " << st.epsilon << " is at or below the floor " << options.floor;
    throw ExtractionExhausted(os.str());
  }
  st.K = options.K_constant * std::pow(st.M / st.epsilon, (p + 2.0) / (2.0 * p * (1.0 - params.s_c)));
  const double lo = std::pow(st.K, -p), hi = st.K * st.K;
  std::vector<double> band;
  for (double N : dyadic_frequencies(g))
    if (N >= lo && N <= hi) band.push_back(N);
  if (band.empty()) band = dyadic_frequencies(g);

  // one N for the whole family (the proof passes to a subsequence with N_n = N): the band whose
  // weakest member is strongest
  std::vector<SpectralField> spectra;
  for (const auto& f : family.members) spectra.push_back(forward_transform(f));
  double best = -1.0, bestN = band.front();
  for (double N : band) {
    double weakest = kInfinity;
    for (const auto& F : spectra)
      weakest = std::min(weakest, lebesgue_norm(inverse_transform(lp_project(F, N, LpMode::band)), p + 2.0).value);
    if (weakest > best) {
      best = weakest;
      bestN = N;
    }
  }
  for (const auto& F : spectra) {
    st.frequencies.push_back(bestN);
    out.centers.push_back(grid_index(g, inverse_transform(lp_project(F, bestN, LpMode::band)).argmax_abs()));
  }

  st.window_radius = options.window_radius ? *options.window_radius : default_window_radius(family, options);
  require(st.window_radius > 0.0 && st.window_radius <= 0.5 * g.box_length,
          "inverse_gn_extract: window radius must lie in (0, L/2]");

  // phi(y) = taper(|y|) * mean_n f_n(y + x_n), with y measured from the grid origin
  Shift mid{0, 0, 0};
  for (int a = 0; a < g.dim; ++a) mid[a] = static_cast<long>(g.n / 2);  // index of coordinate 0
  Field phi(g);
  for (std::size_t n = 0; n < family.size(); ++n) {
    Shift back{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) back[a] = mid[a] - out.centers[n][a];
    phi += translate(family.members[n], back);
  }
  phi *= 1.0 / static_cast<double>(family.size());
  for_each_point(g, [&](std::size_t i, const Point& x) { phi[i] *= taper(norm(x), st.window_radius); });
  // profiles are stored centered at the origin; x_n carries the position
  out.phi = std::move(phi);
  st.phi = sobolev_levels(out.phi, params);
  const double ratio = st.epsilon / st.M;
  st.alpha_h1 = measured_alpha(st.phi.h1_sq, st.epsilon * st.epsilon, ratio);
  st.alpha_hsc = measured_alpha(st.phi.hsc_sq, st.epsilon * st.epsilon, ratio);
  st.alpha_lp = measured_alpha(st.phi.lp_pow, std::pow(st.epsilon, p + 2.0), ratio);
  return out;
}

namespace {

// phi is stored centered at the grid origin (index n/2 per axis); place it at x_n.
Field place(const Field& phi, const Shift& center) {
  const auto& g = phi.grid();
  Shift s{0, 0, 0};
  for (int a = 0; a < g.dim; ++a) s[a] = center[a] - static_cast<long>(g.n / 2);
  return translate(phi, s);
}

}  // namespace

Decomposition bubble_decompose(const FunctionFamily& family, const CriticalParams& params, std::size_t j_max,
                               double tol, const ExtractOptions& options) {
  family.validate();
  require(tol >= 0.0, "bubble_decompose: tol must be nonnegative");
  const double p = params.exponent;
  Decomposition dec;
  dec.residuals = family.members;
  auto levels = [&](const std::vector<Field>& fs) {
    double eps = kInfinity, M = 0.0;
    for (const auto& f : fs) {
      const auto l = sobolev_levels(f, params);
      eps = std::min(eps, std::pow(l.lp_pow, 1.0 / (p + 2.0)));
      M = std::max(M, level_of(l));
    }
    return std::pair{eps, M};
  };
  const auto [eps0, M0] = levels(dec.residuals);
  dec.epsilon.push_back(eps0);
  dec.sobolev.push_back(M0);
  if (!(eps0 > options.floor)) {
    dec.converged = true;
    return dec;
  }
  // the window is fixed from the data, not from residuals whose noise floor creates spurious peaks
  ExtractOptions opts = options;
  if (!opts.window_radius) opts.window_radius = default_window_radius(family, options);
  while (dec.bubbles.size() < j_max) {
    if (dec.epsilon.back() <= tol) {
      dec.converged = true;
      break;
    }
    Extraction ex;
    try {
      ex = inverse_gn_extract(FunctionFamily{dec.residuals}, params, opts);
    } catch (const ExtractionExhausted&) {
      dec.converged = true;
      break;
    }
    for (std::size_t n = 0; n < dec.residuals.size(); ++n) dec.residuals[n] -= place(ex.phi, ex.centers[n]);
    const auto [eps, M] = levels(dec.residuals);
    if (!(eps < dec.epsilon.back())) {
      std::ostringstream os;
      os << "bubble_decompose: epsilon did not decrease at J = " << dec.bubbles.size() + 1 << " ("
         << dec.epsilon.back() << " -> " << eps << ")";
      throw StagnationError(os.str());
    }
    dec.bubbles.push_back({std::move(ex.phi), std::move(ex.centers), std::move(ex.stats)});
    dec.epsilon.push_back(eps);
    dec.sobolev.push_back(M);
  }
  if (dec.epsilon.back() <= tol) dec.converged = true;
  return dec;
}

DecouplingGaps decoupling_audit(const Decomposition& dec, const FunctionFamily& family, const CriticalParams& params) {
  family.validate();
  require(dec.residuals.size() == family.size(), "decoupling_audit: decomposition is not from this family");
  const auto& g = family.grid();
  DecouplingGaps out;
  out.member = family.size() - 1;
  const auto f = sobolev_levels(family.members[out.member], params);
  auto sum = sobolev_levels(dec.residuals[out.member], params);
  for (const auto& b : dec.bubbles) {
    const auto l = sobolev_levels(b.profile, params);
    sum.h1_sq += l.h1_sq;
    sum.hsc_sq += l.hsc_sq;
    sum.lp_pow += l.lp_pow;
  }
  auto rel = [](double whole, double parts) { return whole > 0.0 ? std::abs(whole - parts) / whole : std::abs(parts); };
  out.h1 = rel(f.h1_sq, sum.h1_sq);
  out.hsc = rel(f.hsc_sq, sum.hsc_sq);
  out.lp = rel(f.lp_pow, sum.lp_pow);
  for (std::size_t n = 0; n < family.size(); ++n) {
    double best = kInfinity;
    for (std::size_t i = 0; i < dec.bubbles.size(); ++i)
      for (std::size_t j = i + 1; j < dec.bubbles.size(); ++j)
        best = std::min(best, norm(displacement(center_point(g, dec.bubbles[i].centers[n]),
                                                center_point(g, dec.bubbles[j].centers[n]), g)));
    out.min_separation.push_back(best);
    if (n > 0 && best < out.min_separation[n - 1]) out.separation_nondecreasing = false;
  }
  return out;
}

SyntheticFamily synthetic_family(const GridSpec& grid, const std::vector<SyntheticBubble>& bubbles,
                                 const std::vector<long>& separations) {
  grid.validate();
  require(!bubbles.empty() && bubbles.size() <= 3, "synthetic_family: need one to three bubbles");
  require(!separations.empty(), "synthetic_family: need at least one member");
  SyntheticFamily out;
  const long mid = static_cast<long>(grid.n / 2);
  for (long sep : separations) {
    require(sep >= 0, "synthetic_family: separations must be nonnegative");
    std::vector<Shift> c;
    if (grid.dim == 1) {
      for (std::size_t b = 0; b < bubbles.size(); ++b) c.push_back({mid + static_cast<long>(b) * sep - sep, 0, 0});
    } else {
      const long rise = std::lround(sep * std::sqrt(3.0) / 2.0);
      const long x0 = mid - sep / 2, y0 = mid - rise / 3;
      const Shift corners[3] = {{x0, y0, mid}, {x0 + sep, y0, mid}, {x0 + sep / 2, y0 + rise, mid}};
      for (std::size_t b = 0; b < bubbles.size(); ++b) c.push_back(corners[b]);
    }
    Field f(grid);
    for (std::size_t b = 0; b < bubbles.size(); ++b) {
      require(bubbles[b].width > 0.0, "synthetic_family: widths must be positive");
      const Point x0 = center_point(grid, c[b]);
      const double a = bubbles[b].amplitude, w2 = 2.0 * bubbles[b].width * bubbles[b].width;
      for_each_point(grid, [&](std::size_t i, const Point& x) {
        const double r = norm(displacement(x, x0, grid));
        f[i] += a * std::exp(-r * r / w2);
      });
    }
    out.family.members.push_back(std::move(f));
    out.centers.push_back(std::move(c));
  }
  return out;
}

}  // namespace nlkg

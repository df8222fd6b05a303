#include "nlkg/norms.hpp"

#include <cmath>
#include <sstream>

namespace nlkg {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::sub_conformal: return "sub_conformal";
    case Regime::conformal: return "conformal";
    case Regime::super_conformal: return "super_conformal";
  }
  return "unknown";
}

CriticalParams critical_exponent(int dim, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("critical_exponent: p must be positive");
  if (dim >= 3 && !(p < 4.0 / (dim - 2))) {
    std::ostringstream os;
    os << "critical_exponent: p must be below 4/(d-2) = " << 4.0 / (dim - 2) << " in d = " << dim;
    throw DomainError(os.str());
  }
  CriticalParams c;
  c.dim = dim;
  c.exponent = p;
  c.s_c = 0.5 * dim - 2.0 / p;
  c.alpha = 0.5 - c.s_c;
  // p(d-1) = 4 decides conformality; products of small rationals are exact in binary.
  const double key = p * (dim - 1) - 4.0;
  if (dim > 1 && std::abs(key) <= 1e-12) {
    c.regime = Regime::conformal;
    c.s_c = 0.5;
    c.alpha = 0.0;
  } else {
    c.regime = key < 0.0 ? Regime::sub_conformal : Regime::super_conformal;
  }
  return c;
}

namespace {

struct RegionShape {
  Point center{};
  double r_in = -1.0;
  double r_out = kInfinity;
  double weight_exponent = 0.0;
  bool weighted = false;
};

RegionShape shape_of(const Region& region) {
  RegionShape s;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Ball>) {
          s.center = r.center;
          s.r_out = r.radius;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          s.center = r.center;
          s.r_in = r.r_inner;
          s.r_out = r.r_outer;
        } else if constexpr (std::is_same_v<T, HalfConeSlice>) {
          s.center = r.center;
          s.r_out = r.radius;
          s.weight_exponent = r.weight_exponent;
          s.weighted = true;
        }
      },
      region);
  return s;
}

}  // namespace

void validate_region(const Region& region, const GridSpec& grid) {
  if (std::holds_alternative<WholeBox>(region)) return;
  const auto s = shape_of(region);
  require(s.r_out > 0.0, "region: radius must be positive");
  if (std::holds_alternative<Annulus>(region))
    require(s.r_in > 0.0 && s.r_in < s.r_out, "region: annulus needs 0 < r_inner < r_outer");
  require(s.r_out <= 0.5 * grid.box_length, "region: radius exceeds half the box length");
}

double region_weight(const Region& region, const Point& x, const GridSpec& grid) {
  if (std::holds_alternative<WholeBox>(region)) return 1.0;
  const auto s = shape_of(region);
  const double r = norm(displacement(x, s.center, grid));
  if (r >= s.r_out || r < s.r_in) return 0.0;
  if (s.weighted) return std::pow(1.0 - r / s.r_out, s.weight_exponent);
  return 1.0;
}

RegionNorm lebesgue_norm(const Field& f, double q, const Region& region) {
  require(q >= 1.0, "lebesgue_norm: q must be >= 1");
  validate_region(region, f.grid());
  const auto vals = f.values();
  const bool whole = std::holds_alternative<WholeBox>(region);
  double acc = 0.0;
  bool any = false;
  for_each_point(f.grid(), [&](std::size_t i, const Point& x) {
    const double w = whole ? 1.0 : region_weight(region, x, f.grid());
    if (w <= 0.0) return;
    any = true;
    const double a = std::abs(vals[i]);
    if (q == kInfinity)
      acc = std::max(acc, a);
    else if (q == 2.0)
      acc += w * a * a;
    else
      acc += w * std::pow(a, q);
  });
  if (!any) return RegionNorm{0.0, true};
  if (q == kInfinity) return RegionNorm{acc, false};
  return RegionNorm{std::pow(acc * f.grid().cell_volume(), 1.0 / q), false};
}

double sobolev_norm(const Field& f, double s, bool homogeneous, double m) {
  const auto F = forward_transform(f);
  double acc = 0.0;
  for_each_mode(F.grid, [&](std::size_t i, const Mode& mode) {
    double w;
    if (homogeneous) {
      if (mode.magnitude == 0.0) {
        w = (s == 0.0) ? 1.0 : 0.0;
      } else {
        w = std::pow(mode.magnitude, s);
      }
    } else {
      const double b = bessel_symbol(mode.magnitude, m);
      w = (b == 0.0) ? (s == 0.0 ? 1.0 : 0.0) : std::pow(b, s);
    }
    acc += mode.weight * w * w * std::norm(F.coefficients[i]);
  });
  return std::sqrt(acc * f.grid().cell_volume() / static_cast<double>(f.size()));
}

double gradient_l2_squared(const Field& f) {
  const auto F = forward_transform(f);
  double acc = 0.0;
  const int d = f.grid().dim;
  for_each_mode(F.grid, [&](std::size_t i, const Mode& mode) {
    double k2 = 0.0;
    for (int a = 0; a < d; ++a)
      if (!mode.nyquist[a]) k2 += mode.xi[a] * mode.xi[a];
    acc += mode.weight * k2 * std::norm(F.coefficients[i]);
  });
  return acc * f.grid().cell_volume() / static_cast<double>(f.size());
}

double energy(const State& state) {
  const double m2 = state.mass() * state.mass();
  const double p = state.exponent();
  const auto u = state.u.values();
  const auto v = state.v.values();
  double pointwise = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    pointwise += 0.5 * v[i] * v[i] + 0.5 * m2 * u[i] * u[i] - abs_pow(a, p + 2.0) / (p + 2.0);
  }
  return pointwise * state.grid().cell_volume() + 0.5 * gradient_l2_squared(state.u);
}

double gn_ratio(const Field& f, const CriticalParams& params) {
  const double p = params.exponent;
  const double top = std::pow(lebesgue_norm(f, p + 2.0).value, p + 2.0);
  const double low = lebesgue_norm(f, p * params.dim / 2.0).value;
  const double grad2 = gradient_l2_squared(f);
  const double den = std::pow(low, p) * grad2;
  if (!(den > 0.0)) throw DomainError("gn_ratio: zero denominator");
  return top / den;
}

double gn_interpolation_ratio(const Field& f, const CriticalParams& params) {
  const double p = params.exponent;
  const double sc = params.s_c;
  const double num = lebesgue_norm(f, p * params.dim / 2.0).value;
  const double den = std::pow(lebesgue_norm(f, 2.0).value, 1.0 - sc) *
                     std::pow(std::sqrt(gradient_l2_squared(f)), sc);
  if (!(den > 0.0)) throw DomainError("gn_interpolation_ratio: zero denominator");
  return num / den;
}

}  // namespace nlkg

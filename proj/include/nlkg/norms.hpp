#pragma once

#include <limits>
#include <string>
#include <variant>

#include "nlkg/state.hpp"

namespace nlkg {

enum class Regime { sub_conformal, conformal, super_conformal };

std::string to_string(Regime r);

/// Scaling data of the exponent p in dimension d.
struct CriticalParams {
  int dim = 2;
  double exponent = 2.0;
  double s_c = 0.0;    ///< d/2 - 2/p
  double alpha = 0.0;  ///< 1/2 - s_c, meaningful when sub-conformal
  Regime regime = Regime::sub_conformal;
};

/// Throws DomainError for p <= 0 or p >= 4/(d-2) when d >= 3.
CriticalParams critical_exponent(int dim, double p);

struct WholeBox {};
struct Ball {
  Point center{};
  double radius = 0.0;
};
struct Annulus {
  Point center{};
  double r_inner = 0.0;
  double r_outer = 0.0;
};
/// Ball of radius `radius` weighted by (1 - |x - center|/radius)^weight_exponent.
struct HalfConeSlice {
  Point center{};
  double radius = 0.0;
  double weight_exponent = 0.0;
};

using Region = std::variant<WholeBox, Ball, Annulus, HalfConeSlice>;

/// Radii positive and ordered; the region must not wrap around the periodic box.
void validate_region(const Region& region, const GridSpec& grid);
/// Quadrature weight of the region at x (0 outside; sharp indicator at the boundary).
double region_weight(const Region& region, const Point& x, const GridSpec& grid);

struct RegionNorm {
  double value = 0.0;
  bool empty_region = false;  ///< no grid point inside the region; value is 0
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (h^d sum_region w |f|^q)^(1/q); q = kInfinity gives the max over the region.
RegionNorm lebesgue_norm(const Field& f, double q, const Region& region = WholeBox{});

/// Spectral Sobolev norm with weight |xi|^s (homogeneous, zero mode dropped
/// for s != 0) or <xi>_m^s (inhomogeneous).
double sobolev_norm(const Field& f, double s, bool homogeneous, double m = 1.0);

/// ||grad f||_2^2 from the spectral gradient.
double gradient_l2_squared(const Field& f);

/// Integral of 1/2 u_t^2 + 1/2 |grad u|^2 + m^2/2 u^2 - |u|^(p+2)/(p+2).
double energy(const State& state);

/// ||f||_{p+2}^{p+2} / (||f||_{pd/2}^p ||grad f||_2^2); a lower bound for the optimal constant.
double gn_ratio(const Field& f, const CriticalParams& params);

/// ||f||_{pd/2} / (||f||_2^(1-s_c) ||grad f||_2^s_c).
double gn_interpolation_ratio(const Field& f, const CriticalParams& params);

}  // namespace nlkg

#pragma once

#include <cmath>
#include <random>

#include "nlkg/grid.hpp"

namespace nlkg::testing {

inline Field random_field(const GridSpec& g, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  Field f(g);
  for (auto& v : f.values()) v = dist(rng);
  return f;
}

/// Random field with modes restricted to |xi| <= kmax.
inline Field band_limited(const GridSpec& g, unsigned seed, double kmax) {
  auto F = forward_transform(random_field(g, seed));
  for_each_mode(g, [&](std::size_t i, const Mode& m) {
    if (m.magnitude > kmax) F.coefficients[i] = 0.0;
  });
  return inverse_transform(F);
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace nlkg::testing

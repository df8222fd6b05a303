#pragma once

#include "nlkg/grid.hpp"

#include <cmath>

namespace nlkg {

/// |a|^q with a multiplication fast path for small integer q.
inline double abs_pow(double a, double q) {
  a = std::abs(a);
  switch (static_cast<int>(q)) {
    case 1: if (q == 1.0) return a; break;
    case 2: if (q == 2.0) return a * a; break;
    case 3: if (q == 3.0) return a * a * a; break;
    case 4: if (q == 4.0) return (a * a) * (a * a); break;
    case 5: if (q == 5.0) return (a * a) * (a * a) * a; break;
    case 6: if (q == 6.0) return (a * a) * (a * a) * (a * a); break;
    case 7: if (q == 7.0) return (a * a) * (a * a) * (a * a) * a; break;
    default: break;
  }
  return std::pow(a, q);
}

/// Physical parameters of u_tt - Lap u + m^2 u = |u|^p u.
struct Physics {
  double mass = 0.0;      ///< m in [0, 1]
  double exponent = 2.0;  ///< p > 0
};

/// (u, u_t) at one time instant.
struct State {
  Field u;
  Field v;
  double time = 0.0;
  Physics physics;

  const GridSpec& grid() const { return u.grid(); }
  double mass() const { return physics.mass; }
  double exponent() const { return physics.exponent; }

  /// Checks the grid agreement, m in [0,1] and the admissible range of p.
  void validate() const;
};

State zero_state(const GridSpec& grid, const Physics& physics, double time = 0.0);

}  // namespace nlkg

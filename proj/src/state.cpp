#include "nlkg/state.hpp"

#include <cmath>

namespace nlkg {

void State::validate() const {
  u.grid().validate();
  require(u.grid() == v.grid(), "state: u and v live on different grids");
  require(u.size() == u.grid().size() && v.size() == v.grid().size(), "state: field size mismatch");
  require(physics.mass >= 0.0 && physics.mass <= 1.0, "state: mass parameter must lie in [0, 1]");
  require(physics.exponent > 0.0 && std::isfinite(physics.exponent), "state: exponent p must be positive");
  const int d = u.grid().dim;
  if (d >= 3)
    require(physics.exponent < 4.0 / (d - 2), "state: exponent p must be below 4/(d-2)");
  require(std::isfinite(time), "state: time must be finite");
}

State zero_state(const GridSpec& grid, const Physics& physics, double time) {
  return State{Field(grid), Field(grid), time, physics};
}

}  // namespace nlkg

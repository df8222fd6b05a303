#include "nlkg/initial_data.hpp"

#include <cmath>
#include <sstream>

#include "nlkg/norms.hpp"

namespace nlkg {

namespace {

void check_center(const Point& c, const GridSpec& grid) {
  for (int a = 0; a < grid.dim; ++a)
    require(std::abs(c[a]) <= 0.5 * grid.box_length, "initial data: center lies outside the box");
}

}  // namespace

State gaussian(const GridSpec& grid, const Physics& physics, double amplitude, double width,
               const Point& center, double time) {
  grid.validate();
  require(width > 0.0, "gaussian: width must be positive");
  require(std::isfinite(amplitude), "gaussian: amplitude must be finite");
  require(4.0 * width <= 0.5 * grid.box_length, "gaussian: 4 widths must fit in half the box");
  check_center(center, grid);
  State s = zero_state(grid, physics, time);
  const double inv = 1.0 / (2.0 * width * width);
  for_each_point(grid, [&](std::size_t i, const Point& x) {
    const double r = norm(displacement(x, center, grid));
    s.u[i] = amplitude * std::exp(-r * r * inv);
  });
  s.validate();
  return s;
}

State constant(const GridSpec& grid, const Physics& physics, double amplitude, double velocity,
               double time) {
  grid.validate();
  require(std::isfinite(amplitude) && std::isfinite(velocity), "constant: values must be finite");
  State s{Field(grid, amplitude), Field(grid, velocity), time, physics};
  s.validate();
  return s;
}

State plane_wave(const GridSpec& grid, const Physics& physics, const std::array<int, 3>& wave_index,
                 double amplitude, bool travelling, double time) {
  grid.validate();
  const double dk = 2.0 * M_PI / grid.box_length;
  Point k{};
  for (int a = 0; a < grid.dim; ++a) {
    require(2 * std::abs(wave_index[a]) < static_cast<int>(grid.n),
            "plane_wave: wave index must lie below the Nyquist index");
    k[a] = dk * wave_index[a];
  }
  const double omega = bessel_symbol(norm(k), physics.mass);
  State s = zero_state(grid, physics, time);
  for_each_point(grid, [&](std::size_t i, const Point& x) {
    const double phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
    s.u[i] = amplitude * std::cos(phase);
    if (travelling) s.v[i] = amplitude * omega * std::sin(phase);
  });
  s.validate();
  return s;
}

State log_profile(const GridSpec& grid, const Physics& physics, double radius, const Point& center) {
  grid.validate();
  require(grid.dim == 2, "log_profile: defined for d = 2 only");
  require(radius > 1.0, "log_profile: radius must exceed 1");
  require(radius <= 0.5 * grid.box_length, "log_profile: radius must fit in half the box");
  check_center(center, grid);
  const double root = std::sqrt(std::log(radius));
  State s = zero_state(grid, physics);
  for_each_point(grid, [&](std::size_t i, const Point& x) {
    const double r = norm(displacement(x, center, grid));
    if (r < 1.0)
      s.u[i] = root;
    else if (r <= radius)
      s.u[i] = -std::log(r / radius) / root;
  });
  s.validate();
  return s;
}

State negative_energy(const GridSpec& grid, const Physics& physics, double amplitude, double width,
                      const Point& center, double amplitude_cap) {
  require(amplitude > 0.0, "negative_energy: amplitude must be positive");
  auto energy_at = [&](double a) { return energy(gaussian(grid, physics, a, width, center)); };
  if (energy_at(amplitude) < 0.0) return gaussian(grid, physics, amplitude, width, center);
  double lo = amplitude;
  double hi = amplitude;
  while (energy_at(hi) >= 0.0) {
    lo = hi;
    hi *= 1.25;
    if (hi > amplitude_cap) {
      std::ostringstream os;
      os << "negative_energy: energy stays >= 0 up to amplitude cap " << amplitude_cap;
      throw DomainError(os.str());
    }
  }
  for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (energy_at(mid) < 0.0 ? hi : lo) = mid;
  }
  // Above the threshold E(A) = a A^2 - b A^(p+2) decreases, so 1.1 hi stays negative.
  State s = gaussian(grid, physics, std::min(1.1 * hi, amplitude_cap), width, center);
  if (!(energy(s) < 0.0)) throw DomainError("negative_energy: could not reach negative energy");
  return s;
}

State make_initial_data(const GridSpec& grid, const Physics& physics, const DataSpec& spec) {
  if (spec.kind == "zero") return zero_state(grid, physics, spec.time);
  if (spec.kind == "gaussian") return gaussian(grid, physics, spec.amplitude, spec.width, spec.center, spec.time);
  if (spec.kind == "constant") return constant(grid, physics, spec.amplitude, spec.velocity, spec.time);
  if (spec.kind == "plane_wave")
    return plane_wave(grid, physics, spec.wave_index, spec.amplitude, spec.travelling, spec.time);
  if (spec.kind == "log_profile") return log_profile(grid, physics, spec.radius, spec.center);
  if (spec.kind == "negative_energy") return negative_energy(grid, physics, spec.amplitude, spec.width, spec.center);
  throw DomainError("initial data: unknown kind '" + spec.kind + "'");
}

}  // namespace nlkg

#pragma once

#include <string>

#include "nlkg/state.hpp"

namespace nlkg {

/// u = A exp(-|x - c|^2 / (2 w^2)), u_t = 0.
State gaussian(const GridSpec& grid, const Physics& physics, double amplitude, double width,
               const Point& center = {}, double time = 0.0);

/// u = A, u_t = B everywhere.
State constant(const GridSpec& grid, const Physics& physics, double amplitude, double velocity = 0.0,
               double time = 0.0);

/// u = A cos(k.x) with k = 2pi/L * wave_index. Standing waves have u_t = 0; travelling waves
/// carry u_t = A w sin(k.x), i.e. u = A cos(k.x - w t) with w = <k>_m.
State plane_wave(const GridSpec& grid, const Physics& physics, const std::array<int, 3>& wave_index,
                 double amplitude, bool travelling = false, double time = 0.0);

/// Radial d = 2 data: sqrt(log R) on |x| < 1, -log(|x|/R)/sqrt(log R) on 1 <= |x| <= R, 0 beyond.
State log_profile(const GridSpec& grid, const Physics& physics, double radius, const Point& center = {});

/// Gaussian whose amplitude is raised past the zero-energy threshold, so energy() < 0.
/// The threshold is bracketed by growing A by 1.25 and refined by bisection; the returned
/// amplitude is 1.1 times the negative end of the bracket unless A already gives E < 0.
/// Throws DomainError when no amplitude up to amplitude_cap works.
State negative_energy(const GridSpec& grid, const Physics& physics, double amplitude, double width,
                      const Point& center = {}, double amplitude_cap = 1e6);

/// Parameters of one entry of the initial-data library, addressed by kind name.
struct DataSpec {
  std::string kind;  ///< zero, gaussian, constant, plane_wave, log_profile, negative_energy
  double amplitude = 0.0;
  double velocity = 0.0;
  double width = 1.0;
  double radius = 0.0;
  Point center{};
  std::array<int, 3> wave_index{1, 0, 0};
  bool travelling = false;
  double time = 0.0;
};

State make_initial_data(const GridSpec& grid, const Physics& physics, const DataSpec& spec);

}  // namespace nlkg

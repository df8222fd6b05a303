#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nlkg/errors.hpp"

namespace nlkg {

/// Spatial point or vector; components beyond the grid dimension are zero.
using Point = std::array<double, 3>;

/// Periodic box [-L/2, L/2)^d sampled with n points per axis.
struct GridSpec {
  int dim = 2;
  std::size_t n = 64;
  double box_length = 1.0;

  double spacing() const { return box_length / static_cast<double>(n); }
  double cell_volume() const;
  double volume() const;
  std::size_t size() const;
  /// Number of stored coefficients of the half-spectrum (last axis n/2+1).
  std::size_t spectral_size() const;
  double coordinate(std::size_t i) const {
    return -0.5 * box_length + static_cast<double>(i) * spacing();
  }
  /// Signed wavenumber 2pi/L * k for FFT-ordered index i along a full axis.
  double wavenumber(std::size_t i) const;
  double min_frequency() const;
  double max_frequency() const;

  /// Throws DomainError unless 1 <= dim <= 3, n is a power of two >= 8 and L > 0.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

/// Displacement x - c under the minimum-image convention of the periodic box.
Point displacement(const Point& x, const Point& c, const GridSpec& grid);
double norm(const Point& x);

/// Calls fn(index, x) for every grid point in row-major order.
template <class Fn>
void for_each_point(const GridSpec& g, Fn&& fn) {
  const std::size_t n = g.n;
  Point x{0.0, 0.0, 0.0};
  std::size_t idx = 0;
  const std::size_t n0 = n;
  const std::size_t n1 = g.dim >= 2 ? n : 1;
  const std::size_t n2 = g.dim >= 3 ? n : 1;
  for (std::size_t i = 0; i < n0; ++i) {
    x[0] = g.coordinate(i);
    for (std::size_t j = 0; j < n1; ++j) {
      if (g.dim >= 2) x[1] = g.coordinate(j);
      for (std::size_t k = 0; k < n2; ++k) {
        if (g.dim >= 3) x[2] = g.coordinate(k);
        fn(idx++, x);
      }
    }
  }
}

/// One stored coefficient of the half-spectrum.
struct Mode {
  Point xi{0.0, 0.0, 0.0};
  double magnitude = 0.0;
  /// Multiplicity in the full spectrum (2 when the conjugate mode is implicit).
  double weight = 1.0;
  /// Axis index sits at the Nyquist frequency (odd symbols must vanish there).
  std::array<bool, 3> nyquist{false, false, false};
};

/// Calls fn(index, mode) for every stored coefficient of the half-spectrum.
template <class Fn>
void for_each_mode(const GridSpec& g, Fn&& fn) {
  const std::size_t n = g.n;
  const std::size_t half = n / 2 + 1;
  const double dk = 2.0 * 3.14159265358979323846 / g.box_length;
  Mode mode;
  std::size_t idx = 0;
  auto last_axis = [&](std::size_t k, int axis) {
    mode.xi[axis] = (k == n / 2 ? -static_cast<double>(n / 2) : static_cast<double>(k)) * dk;
    mode.nyquist[axis] = (k == n / 2);
    mode.weight = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    mode.magnitude = norm(mode.xi);
    fn(idx++, static_cast<const Mode&>(mode));
  };
  auto full_axis = [&](std::size_t i, int axis) {
    mode.xi[axis] = g.wavenumber(i);
    mode.nyquist[axis] = (i == n / 2);
  };
  if (g.dim == 1) {
    for (std::size_t k = 0; k < half; ++k) last_axis(k, 0);
  } else if (g.dim == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      full_axis(i, 0);
      for (std::size_t k = 0; k < half; ++k) last_axis(k, 1);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      full_axis(i, 0);
      for (std::size_t j = 0; j < n; ++j) {
        full_axis(j, 1);
        for (std::size_t k = 0; k < half; ++k) last_axis(k, 2);
      }
    }
  }
}

/// Real scalar samples on a grid, row-major.
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, double fill = 0.0);
  Field(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const;
  /// Throws CorruptionError naming `context` when a value is NaN or Inf.
  void ensure_finite(const char* context) const;
  double max_abs() const;
  /// Index of the largest |value| (first occurrence).
  std::size_t argmax_abs() const;
  Point position(std::size_t index) const;
  /// Integral over the box by the rectangle rule (spectrally exact for periodic data).
  double integral() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Half-spectrum of a real field; the conjugate half is implied (Hermitian symmetry).
struct SpectralField {
  GridSpec grid;
  std::vector<std::complex<double>> coefficients;
};

/// Unnormalized forward DFT; throws CorruptionError on non-finite input.
SpectralField forward_transform(const Field& f);
/// Inverse DFT including the 1/n^d normalization.
Field inverse_transform(const SpectralField& F);

/// h^d / n^d * sum over the full spectrum of |F|^2; equals the box L2 norm squared.
double spectral_l2_squared(const SpectralField& F);

/// sqrt(m^2 + xi^2).
double bessel_symbol(double xi_mag, double m);

/// Coefficientwise product with a radial real symbol. The zero mode uses
/// `zero_mode_value` when given, else symbol(0), which must then be finite.
SpectralField apply_multiplier(const SpectralField& F, const std::function<double(double)>& symbol,
                               std::optional<double> zero_mode_value = std::nullopt);

/// Littlewood-Paley bump: 1 on r <= 1, 0 on r >= 11/10, C2 quintic blend between.
double lp_bump(double r);

enum class LpMode { leq, gt, band };

/// P_{<=N}, P_{>N} or the band P_N = phi(xi/N) - phi(2xi/N).
Field lp_project(const Field& f, double frequency, LpMode mode);
SpectralField lp_project(const SpectralField& F, double frequency, LpMode mode);

/// Dyadic N = 2^j between the lowest nonzero grid frequency and the Nyquist frequency.
std::vector<double> dyadic_frequencies(const GridSpec& grid);

/// |grad|^s; the zero mode is annihilated unless s == 0.
Field fractional_derivative(const Field& f, double s);
/// <grad>_m^s; for m == 0 behaves like fractional_derivative on the zero mode.
Field bessel_derivative(const Field& f, double s, double m);

/// Spectral gradient (Nyquist components of each derivative set to zero).
std::vector<Field> gradient(const Field& f);
std::vector<Field> gradient(const SpectralField& F);
/// Spectral divergence of a d-component vector field.
Field divergence(std::span<const Field> components);

}  // namespace nlkg

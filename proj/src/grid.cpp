#include "nlkg/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

namespace nlkg {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanRegistry {
 public:
  struct Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
  };

  static PlanRegistry& instance() {
    static PlanRegistry registry;
    return registry;
  }

  const Plans& get(const GridSpec& g) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(g.dim, g.n);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::array<int, 3> dims{};
    for (int a = 0; a < g.dim; ++a) dims[a] = static_cast<int>(g.n);
    std::vector<double> real(g.size());
    std::vector<std::complex<double>> spec(g.spectral_size());
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p;
    p.forward = fftw_plan_dft_r2c(g.dim, dims.data(), real.data(), cplx, flags);
    p.backward = fftw_plan_dft_c2r(g.dim, dims.data(), cplx, real.data(), flags);
    return plans_.emplace(key, p).first->second;
  }

  ~PlanRegistry() {
    for (auto& [key, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t>, Plans> plans_;
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }
double GridSpec::volume() const { return std::pow(box_length, dim); }

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= n;
  return s;
}

std::size_t GridSpec::spectral_size() const { return size() / n * (n / 2 + 1); }

double GridSpec::wavenumber(std::size_t i) const {
  const auto k = i < n / 2 ? static_cast<double>(i)
                           : static_cast<double>(i) - static_cast<double>(n);
  return 2.0 * std::numbers::pi / box_length * k;
}

double GridSpec::min_frequency() const { return 2.0 * std::numbers::pi / box_length; }
double GridSpec::max_frequency() const {
  return std::numbers::pi * static_cast<double>(n) / box_length;
}

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) throw DomainError("grid: dimension must be 1, 2 or 3");
  if (!is_power_of_two(n) || n < 8) throw DomainError("grid: n must be a power of two >= 8");
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw DomainError("grid: box_length must be positive");
}

Point displacement(const Point& x, const Point& c, const GridSpec& grid) {
  Point d{0.0, 0.0, 0.0};
  const double L = grid.box_length;
  for (int a = 0; a < grid.dim; ++a) {
    double v = x[a] - c[a];
    v -= L * std::round(v / L);
    d[a] = v;
  }
  return d;
}

double norm(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

Field::Field(const GridSpec& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DomainError("field: value count must equal n^d");
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void Field::ensure_finite(const char* context) const {
  if (!all_finite()) throw CorruptionError(std::string(context) + ": non-finite field value");
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::size_t Field::argmax_abs() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values_.size(); ++i)
    if (std::abs(values_[i]) > std::abs(values_[best])) best = i;
  return best;
}

Point Field::position(std::size_t index) const {
  Point x{0.0, 0.0, 0.0};
  for (int a = grid_.dim - 1; a >= 0; --a) {
    x[a] = grid_.coordinate(index % grid_.n);
    index /= grid_.n;
  }
  return x;
}

double Field::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_volume();
}

Field& Field::operator+=(const Field& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

SpectralField forward_transform(const Field& f) {
  f.ensure_finite("forward_transform");
  const auto& g = f.grid();
  const auto& plans = PlanRegistry::instance().get(g);
  std::vector<double> in(f.values().begin(), f.values().end());
  SpectralField F{g, std::vector<std::complex<double>>(g.spectral_size())};
  fftw_execute_dft_r2c(plans.forward, in.data(),
                       reinterpret_cast<fftw_complex*>(F.coefficients.data()));
  return F;
}

Field inverse_transform(const SpectralField& F) {
  const auto& g = F.grid;
  const auto& plans = PlanRegistry::instance().get(g);
  auto scratch = F.coefficients;  // c2r destroys its input
  std::vector<double> out(g.size());
  fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(g.size());
  for (double& v : out) v *= scale;
  return Field(g, std::move(out));
}

double spectral_l2_squared(const SpectralField& F) {
  double s = 0.0;
  for_each_mode(F.grid, [&](std::size_t i, const Mode& m) { s += m.weight * std::norm(F.coefficients[i]); });
  const double N = static_cast<double>(F.grid.size());
  return s * F.grid.cell_volume() / N;
}

double bessel_symbol(double xi_mag, double m) { return std::sqrt(m * m + xi_mag * xi_mag); }

SpectralField apply_multiplier(const SpectralField& F, const std::function<double(double)>& symbol,
                               std::optional<double> zero_mode_value) {
  SpectralField out = F;
  for_each_mode(F.grid, [&](std::size_t i, const Mode& m) {
    double s;
    if (i == 0) {
      s = zero_mode_value ? *zero_mode_value : symbol(0.0);
      if (!std::isfinite(s)) throw DomainError("apply_multiplier: symbol not finite at the zero mode");
    } else {
      s = symbol(m.magnitude);
      if (!std::isfinite(s)) {
        std::ostringstream os;
        os << "apply_multiplier: symbol not finite at |xi| = " << m.magnitude;
        throw DomainError(os.str());
      }
    }
    out.coefficients[i] *= s;
  });
  return out;
}

double lp_bump(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 1.1) return 0.0;
  const double s = (r - 1.0) / 0.1;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

SpectralField lp_project(const SpectralField& F, double frequency, LpMode mode) {
  require(frequency > 0.0, "lp_project: frequency must be positive");
  const double N = frequency;
  SpectralField out = F;
  for_each_mode(F.grid, [&](std::size_t i, const Mode& m) {
    const double r = m.magnitude / N;
    double s = 0.0;
    switch (mode) {
      case LpMode::leq: s = lp_bump(r); break;
      case LpMode::gt: s = 1.0 - lp_bump(r); break;
      case LpMode::band: s = lp_bump(r) - lp_bump(2.0 * r); break;
    }
    out.coefficients[i] *= s;
  });
  return out;
}

Field lp_project(const Field& f, double frequency, LpMode mode) {
  return inverse_transform(lp_project(forward_transform(f), frequency, mode));
}

std::vector<double> dyadic_frequencies(const GridSpec& grid) {
  std::vector<double> out;
  const double lo = grid.min_frequency();
  const double hi = grid.max_frequency();
  int j = static_cast<int>(std::floor(std::log2(lo)));
  for (double N = std::ldexp(1.0, j); N <= 2.0 * hi; N *= 2.0)
    if (N * 1.1 >= lo) out.push_back(N);
  return out;
}

namespace {

Field zero_mode_aware_power(const Field& f, double s, double m) {
  const double zero = (s == 0.0) ? 1.0 : (m > 0.0 ? std::pow(m, s) : 0.0);
  auto symbol = [s, m](double xi) { return std::pow(bessel_symbol(xi, m), s); };
  return inverse_transform(apply_multiplier(forward_transform(f), symbol, zero));
}

}  // namespace

Field fractional_derivative(const Field& f, double s) {
  if (s == 0.0) return f;
  return zero_mode_aware_power(f, s, 0.0);
}

Field bessel_derivative(const Field& f, double s, double m) {
  if (s == 0.0) return f;
  return zero_mode_aware_power(f, s, m);
}

std::vector<Field> gradient(const SpectralField& F) {
  const auto& g = F.grid;
  std::vector<Field> out;
  out.reserve(g.dim);
  SpectralField D{g, std::vector<std::complex<double>>(F.coefficients.size())};
  for (int a = 0; a < g.dim; ++a) {
    for_each_mode(g, [&](std::size_t i, const Mode& m) {
      const double k = m.nyquist[a] ? 0.0 : m.xi[a];
      D.coefficients[i] = std::complex<double>(0.0, k) * F.coefficients[i];
    });
    out.push_back(inverse_transform(D));
  }
  return out;
}

std::vector<Field> gradient(const Field& f) { return gradient(forward_transform(f)); }

Field divergence(std::span<const Field> components) {
  require(!components.empty(), "divergence: no components");
  const auto& g = components[0].grid();
  require(static_cast<int>(components.size()) == g.dim, "divergence: need d components");
  SpectralField acc{g, std::vector<std::complex<double>>(g.spectral_size())};
  for (int a = 0; a < g.dim; ++a) {
    const auto F = forward_transform(components[a]);
    for_each_mode(g, [&](std::size_t i, const Mode& m) {
      const double k = m.nyquist[a] ? 0.0 : m.xi[a];
      acc.coefficients[i] += std::complex<double>(0.0, k) * F.coefficients[i];
    });
  }
  return inverse_transform(acc);
}

}  // namespace nlkg

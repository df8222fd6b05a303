#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlkg/solver.hpp"

namespace nlkg {

enum class TensorKind { energy, dilation, mod_dilation, charge, conf_energy, combined };

std::string to_string(TensorKind k);
TensorKind tensor_kind_from_string(const std::string& name);
inline constexpr TensorKind kAllTensorKinds[] = {TensorKind::energy,   TensorKind::dilation,
                                                 TensorKind::mod_dilation, TensorKind::charge,
                                                 TensorKind::conf_energy, TensorKind::combined};

/// Tensors carrying explicit t or 1/t factors; they are rejected at t <= 0.
bool time_weighted(TensorKind k);

struct TensorOptions {
  /// x and t are measured from (apex_time, apex).
  Point apex{};
  double apex_time = 0.0;
  /// false drops every |u|^(p+2) term (tensors of the linear Klein-Gordon equation).
  bool nonlinear = true;
};

/// Density z0, flux z (d components) and source of dt z0 + div z = source.
struct TensorSample {
  TensorKind kind = TensorKind::energy;
  Field density;
  std::vector<Field> flux;
  Field source;
  double eval_time = 0.0;
  Point apex{};
};

/// Evaluates the tensor pointwise from u, u_t and the spectral gradient. The modified
/// dilation and combined densities are computed in both algebraic forms and must agree
/// to 1e-10 relative; a mismatch throws Error.
TensorSample eval_tensor(const State& state, TensorKind kind, const TensorOptions& options = {});

/// The two pointwise forms of the mod_dilation or combined density:
/// (from the dilation/charge tensors plus corrections, completed-square expansion).
std::pair<Field, Field> density_two_forms(const State& state, TensorKind kind,
                                          const TensorOptions& options = {});

/// Nonnegative space-time integrand of the weighted combined identity,
/// 2 alpha |x.grad u + t u_t + 2u/p|^2 (t^2-|x|^2)^(alpha-1) + m^2 u^2 (t^2-|x|^2)^alpha on |x| < t.
Field am_mono_integrand(const State& state, const TensorOptions& options = {});

/// (z0(t+) - z0(t-)) / (t+ - t-) + div z(t) - source(t) from three equally spaced snapshots.
Field divergence_residual(std::span<const State> window, TensorKind kind, const TensorOptions& options = {});

struct ResidualNorms {
  double l2 = 0.0;
  double linf = 0.0;
};
ResidualNorms residual_norms(const Field& residual);

/// log2 of successive error ratios (one entry fewer than errors).
std::vector<double> observed_orders(std::span<const double> errors);

struct RefinementLevel {
  GridSpec grid;
  double dt = 0.0;
  ResidualNorms norms;
};

struct RefinementStudy {
  TensorKind kind = TensorKind::energy;
  double t_mid = 0.0;
  std::vector<RefinementLevel> levels;
  std::vector<double> orders_l2;
  std::vector<double> orders_linf;
};

/// Builds the window t_mid - dt, t_mid, t_mid + dt at `levels` resolutions, halving h and dt
/// together, and reports residual norms and observed orders, one study per kind. make_data
/// returns the initial state on the requested grid; (t_mid - t0) / dt must be an integer.
std::vector<RefinementStudy> refine_residual(const std::function<State(const GridSpec&)>& make_data,
                                             const GridSpec& base, const SolverConfig& base_config,
                                             double t_mid, int levels, std::span<const TensorKind> kinds,
                                             const TensorOptions& options = {});

struct SlabIdentity {
  double lhs = 0.0;  ///< time integral of the source integrated over the box
  double rhs = 0.0;  ///< change of the integrated density
  double gap = 0.0;  ///< |lhs - rhs| / max(|lhs|, |rhs|, eps)
  /// Time averages over [t0, t1] of the kinetic term and of the potential terms.
  double kinetic_average = 0.0;
  double potential_average = 0.0;
  std::size_t samples = 0;
};

/// Charge identity integrated over [t0, t1] x box with the trapezoid rule over stored snapshots.
SlabIdentity charge_slab_identity(const Trajectory& traj, double t0, double t1);

}  // namespace nlkg

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "nlkg/norms.hpp"

namespace nlkg {

/// Thrown when the L^{p+2} level of the family is below the extraction floor (epsilon_J = 0).
class ExtractionExhausted : public Error {
 public:
  using Error::Error;
};

/// Thrown when an extraction fails to lower epsilon_J.
class StagnationError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

struct FunctionFamily {
  std::vector<Field> members;

  const GridSpec& grid() const { return members.front().grid(); }
  std::size_t size() const { return members.size(); }
  /// Non-empty, common grid, finite values.
  void validate() const;
};

/// Grid index offsets, one per axis (periodic).
using Shift = std::array<long, 3>;

/// f(x - shift h), exact on the grid.
Field translate(const Field& f, const Shift& shift);
/// Grid point of a flat index, as per-axis indices.
Shift grid_index(const GridSpec& grid, std::size_t flat);

/// max(8h, separation / 4); an infinite separation (fewer than two peaks) gives L/8.
double window_radius_rule(const GridSpec& grid, double separation);

struct SobolevLevels {
  double h1_sq = 0.0;   ///< ||f||^2 in homogeneous H^1
  double hsc_sq = 0.0;  ///< ||f||^2 in homogeneous H^{s_c}
  double lp_pow = 0.0;  ///< ||f||_{p+2}^{p+2}
};
SobolevLevels sobolev_levels(const Field& f, const CriticalParams& params);

struct ExtractOptions {
  double floor = 1e-10;    ///< epsilon at or below this signals exhaustion
  double K_constant = 1.0; ///< C in K = C (M/epsilon)^((p+2)/(2p(1-s_c)))
  /// Taper radius; default max(8h, quarter of the minimum peak separation at the last member).
  std::optional<double> window_radius;
  double peak_fraction = 0.1;  ///< local maxima of |f| above this fraction of the max count as peaks
};

struct ExtractionStats {
  double epsilon = 0.0;  ///< min over n of ||f_n||_{p+2}
  double M = 0.0;        ///< max over n of (||f_n||^2_{H^1} + ||f_n||^2_{H^{s_c}})^(1/2)
  double K = 0.0;
  std::vector<double> frequencies;  ///< pigeonholed dyadic N per member
  double window_radius = 0.0;
  SobolevLevels phi;
  /// Measured exponents a in ||phi||^2 = epsilon^2 (epsilon/M)^a (L^{p+2}: epsilon^{p+2} (epsilon/M)^a).
  double alpha_h1 = 0.0, alpha_hsc = 0.0, alpha_lp = 0.0;
};

struct Extraction {
  Field phi;
  std::vector<Shift> centers;  ///< grid index of x_n per member
  ExtractionStats stats;
};

/// One inverse Gagliardo-Nirenberg step: dyadic pigeonhole, center at argmax |P_N f_n|, profile as
/// the tapered average of f_n(. + x_n) over the family.
Extraction inverse_gn_extract(const FunctionFamily& family, const CriticalParams& params,
                              const ExtractOptions& options = {});

struct Bubble {
  Field profile;
  std::vector<Shift> centers;
  ExtractionStats stats;
};

struct Decomposition {
  std::vector<Bubble> bubbles;
  std::vector<Field> residuals;  ///< r_n^J = f_n - sum_j phi^j(. - x_n^j)
  std::vector<double> epsilon;   ///< epsilon_J for J = 0..J*
  std::vector<double> sobolev;   ///< M_J for J = 0..J*
  bool converged = false;        ///< epsilon_J <= tol or exhausted (else j_max was reached)
};

/// Repeated extraction on the residuals until epsilon_J <= tol, exhaustion or j_max bubbles.
Decomposition bubble_decompose(const FunctionFamily& family, const CriticalParams& params, std::size_t j_max,
                               double tol, const ExtractOptions& options = {});

struct DecouplingGaps {
  std::size_t member = 0;  ///< index of the audited (last) member
  double h1 = 0.0;
  double hsc = 0.0;
  double lp = 0.0;
  std::vector<double> min_separation;  ///< minimum pairwise center distance per member (inf for < 2 bubbles)
  bool separation_nondecreasing = true;
};

/// Relative gaps |norm(f) - sum norm(phi^j) - norm(r)| / norm(f) at the last member.
DecouplingGaps decoupling_audit(const Decomposition& dec, const FunctionFamily& family, const CriticalParams& params);

struct SyntheticBubble {
  double amplitude = 1.0;
  double width = 1.0;  ///< Gaussian width w in exp(-|x|^2 / (2 w^2))
};

struct SyntheticFamily {
  FunctionFamily family;
  std::vector<std::vector<Shift>> centers;  ///< [member][bubble] grid index of each bubble center
};

/// Member n holds the bubbles on a triangle of side separations[n] cells (a line in d = 1),
/// placed around the grid center; at most three bubbles.
SyntheticFamily synthetic_family(const GridSpec& grid, const std::vector<SyntheticBubble>& bubbles,
                                 const std::vector<long>& separations);

}  // namespace nlkg

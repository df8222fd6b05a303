#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "nlkg/blowup.hpp"
#include "nlkg/cones.hpp"
#include "nlkg/initial_data.hpp"
#include "nlkg/profiles.hpp"

namespace nlkg::cli {

/// Invalid scenario; the message names the key and the violated precondition.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct TensorAudit {
  std::vector<TensorKind> kinds;
  TensorOptions options;  // nonlinear is taken from the solver section
};

struct ConeAudit {
  bool enabled = false;
  ConeSpec cone;
  std::optional<double> flux_t0, flux_t1;  // cone times
  double monotonicity_tol = 1e-8;
};

struct BlowupAudit {
  FitOptions fit;
  std::optional<double> mass_radius;
  Point lower_bound_center{};
};

struct ProfilesAudit {
  bool enabled = false;
  std::string source;  // synthetic or snapshots
  std::vector<SyntheticBubble> bubbles;
  std::vector<long> separations;  // cells
  std::vector<std::size_t> snapshot_indices;
  double noise = 0.0;  // band-limited noise, as a fraction of each member's max |f|
  std::size_t j_max = 0;
  double tol = 0.0;
  std::optional<double> window_radius;
};

struct OutputConfig {
  std::filesystem::path directory;
  std::size_t stride = 1;  // every stride-th stored snapshot is written
  bool snapshots = false;
};

struct ScenarioConfig {
  GridSpec grid;
  Physics physics;
  DataSpec data;
  SolverConfig solver;
  TensorAudit tensors;
  ConeAudit cones;
  BlowupAudit blowup;
  ProfilesAudit profiles;
  OutputConfig output;
  std::uint64_t seed = 0;
  YAML::Node sweep;  // dotted key -> list of values
  YAML::Node source;  // the parsed document, for sweep expansion

  CriticalParams params() const { return critical_exponent(grid.dim, physics.exponent); }
};

ScenarioConfig parse_config(const YAML::Node& root);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Checks every module precondition that can be checked before compute.
void validate(const ScenarioConfig& config, const std::string& command);
nlohmann::json to_json(const ScenarioConfig& config);

/// Scenario documents of a sweep, in cartesian order of the sweep lists.
std::vector<YAML::Node> expand_sweep(const ScenarioConfig& config);

/// Worker cap from NLKG_WORKERS (default: hardware concurrency).
std::size_t worker_count();

int run(int argc, char** argv);

}  // namespace nlkg::cli

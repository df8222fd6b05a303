#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

#include "cli.hpp"

namespace nlkg::cli {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!node) return;
  if (!node.IsMap()) fail(path, "must be a mapping");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <class T>
T required(const YAML::Node& node, const std::string& path, const char* key) {
  const std::string full = path + "." + key;
  if (!node || !node[key]) fail(full, "required (no default)");
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    fail(full, "wrong type");
  }
}

template <class T>
T optional_value(const YAML::Node& node, const std::string& path, const char* key, T fallback) {
  if (!node || !node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    fail(path + "." + key, "wrong type");
  }
}

Point point_value(const YAML::Node& node, const std::string& path, const char* key, int dim) {
  Point x{0.0, 0.0, 0.0};
  if (!node || !node[key]) return x;
  const auto seq = optional_value<std::vector<double>>(node, path, key, {});
  if (static_cast<int>(seq.size()) != dim) fail(path + "." + key, "needs exactly d coordinates");
  for (int a = 0; a < dim; ++a) x[a] = seq[a];
  return x;
}

TensorKind kind_value(const std::string& name, const std::string& path) {
  try {
    return tensor_kind_from_string(name);
  } catch (const Error&) {
    fail(path, "unknown tensor kind '" + name + "'");
  }
}

nlohmann::json point_json(const Point& x, int dim) { return std::vector<double>(x.begin(), x.begin() + dim); }

// Overrides the value at a dotted key, creating maps on the way.
void set_path(YAML::Node root, const std::string& dotted, const YAML::Node& value) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  if (parts.empty()) fail("sweep", "empty key");
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = chain.back()[parts[i]];
    if (!next || next.IsNull()) {
      chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = chain.back()[parts[i]];
    }
    chain.push_back(next);
  }
  chain.back()[parts.back()] = YAML::Clone(value);
}

}  // namespace

ScenarioConfig parse_config(const YAML::Node& root) {
  if (!root || !root.IsMap()) throw ConfigError("config: document must be a mapping");
  check_keys(root, "", {"grid", "physics", "data", "solver", "audits", "output", "seed", "sweep"});
  ScenarioConfig c;
  c.source = YAML::Clone(root);

  const auto grid = root["grid"];
  check_keys(grid, "grid", {"dim", "n", "length"});
  c.grid.dim = required<int>(grid, "grid", "dim");
  c.grid.n = required<std::size_t>(grid, "grid", "n");
  c.grid.box_length = required<double>(grid, "grid", "length");

  const auto phys = root["physics"];
  check_keys(phys, "physics", {"mass", "exponent"});
  c.physics.mass = required<double>(phys, "physics", "mass");
  c.physics.exponent = required<double>(phys, "physics", "exponent");

  const auto data = root["data"];
  check_keys(data, "data", {"kind", "amplitude", "velocity", "width", "radius", "center", "wave_index", "travelling", "time"});
  c.data.kind = required<std::string>(data, "data", "kind");
  c.data.amplitude = optional_value(data, "data", "amplitude", 0.0);
  c.data.velocity = optional_value(data, "data", "velocity", 0.0);
  c.data.width = optional_value(data, "data", "width", 1.0);
  c.data.radius = optional_value(data, "data", "radius", 0.0);
  c.data.center = point_value(data, "data", "center", c.grid.dim);
  c.data.travelling = optional_value(data, "data", "travelling", false);
  c.data.time = optional_value(data, "data", "time", 0.0);
  if (data && data["wave_index"]) {
    const auto k = optional_value<std::vector<int>>(data, "data", "wave_index", {});
    if (static_cast<int>(k.size()) != c.grid.dim) fail("data.wave_index", "needs exactly d entries");
    c.data.wave_index = {0, 0, 0};
    for (int a = 0; a < c.grid.dim; ++a) c.data.wave_index[a] = k[a];
  }

  const auto sol = root["solver"];
  check_keys(sol, "solver", {"dt_init", "dt_min", "cfl_safety", "theta", "adaptive", "blowup_threshold", "t_max",
                             "snapshot_stride", "monitor_stride", "dealias", "nonlinear"});
  auto& s = c.solver;
  s.dt_init = required<double>(sol, "solver", "dt_init");
  s.t_max = required<double>(sol, "solver", "t_max");
  s.dt_min = optional_value(sol, "solver", "dt_min", s.dt_min);
  s.cfl_safety = optional_value(sol, "solver", "cfl_safety", s.cfl_safety);
  s.theta = optional_value(sol, "solver", "theta", s.theta);
  s.adaptive = optional_value(sol, "solver", "adaptive", s.adaptive);
  s.blowup_threshold = optional_value(sol, "solver", "blowup_threshold", s.blowup_threshold);
  s.snapshot_stride = optional_value(sol, "solver", "snapshot_stride", s.snapshot_stride);
  s.monitor_stride = optional_value(sol, "solver", "monitor_stride", s.monitor_stride);
  s.nonlinear = optional_value(sol, "solver", "nonlinear", s.nonlinear);
  const auto dealias = optional_value<std::string>(sol, "solver", "dealias", "none");
  if (dealias == "none") s.dealias = Dealias::none;
  else if (dealias == "pad2x") s.dealias = Dealias::pad2x;
  else fail("solver.dealias", "must be none or pad2x");

  const auto audits = root["audits"];
  check_keys(audits, "audits", {"tensors", "cones", "blowup", "profiles"});
  if (audits) {
    const auto t = audits["tensors"];
    check_keys(t, "audits.tensors", {"kinds", "apex", "apex_time"});
    if (t) {
      for (const auto& name : optional_value<std::vector<std::string>>(t, "audits.tensors", "kinds", {}))
        c.tensors.kinds.push_back(kind_value(name, "audits.tensors.kinds"));
      c.tensors.options.apex = point_value(t, "audits.tensors", "apex", c.grid.dim);
      c.tensors.options.apex_time = optional_value(t, "audits.tensors", "apex_time", 0.0);
    }
    const auto k = audits["cones"];
    check_keys(k, "audits.cones", {"vertex", "top_time", "vertex_time", "reflected", "flux_window", "monotonicity_tol"});
    if (k) {
      c.cones.enabled = true;
      c.cones.cone.vertex = point_value(k, "audits.cones", "vertex", c.grid.dim);
      c.cones.cone.top_time = required<double>(k, "audits.cones", "top_time");
      c.cones.cone.vertex_time = required<double>(k, "audits.cones", "vertex_time");
      c.cones.cone.reflected = optional_value(k, "audits.cones", "reflected", false);
      c.cones.monotonicity_tol = optional_value(k, "audits.cones", "monotonicity_tol", c.cones.monotonicity_tol);
      if (k["flux_window"]) {
        const auto w = optional_value<std::vector<double>>(k, "audits.cones", "flux_window", {});
        if (w.size() != 2) fail("audits.cones.flux_window", "needs [t0, t1] in cone time");
        c.cones.flux_t0 = w[0];
        c.cones.flux_t1 = w[1];
      }
    }
    const auto b = audits["blowup"];
    check_keys(b, "audits.blowup", {"tail_samples", "window_fraction", "min_points", "mass_radius", "lower_bound_center"});
    if (b) {
      c.blowup.fit.tail_samples = optional_value(b, "audits.blowup", "tail_samples", c.blowup.fit.tail_samples);
      c.blowup.fit.window_fraction = optional_value(b, "audits.blowup", "window_fraction", c.blowup.fit.window_fraction);
      c.blowup.fit.min_points = optional_value(b, "audits.blowup", "min_points", c.blowup.fit.min_points);
      if (b["mass_radius"]) c.blowup.mass_radius = optional_value(b, "audits.blowup", "mass_radius", 0.0);
      c.blowup.lower_bound_center = point_value(b, "audits.blowup", "lower_bound_center", c.grid.dim);
    }
    const auto pr = audits["profiles"];
    check_keys(pr, "audits.profiles", {"source", "bubbles", "separations", "snapshot_indices", "noise", "j_max", "tol",
                                       "window_radius"});
    if (pr) {
      auto& P = c.profiles;
      P.enabled = true;
      P.source = required<std::string>(pr, "audits.profiles", "source");
      P.j_max = required<std::size_t>(pr, "audits.profiles", "j_max");
      P.tol = required<double>(pr, "audits.profiles", "tol");
      P.noise = optional_value(pr, "audits.profiles", "noise", 0.0);
      if (pr["window_radius"]) P.window_radius = optional_value(pr, "audits.profiles", "window_radius", 0.0);
      P.separations = optional_value<std::vector<long>>(pr, "audits.profiles", "separations", {});
      P.snapshot_indices = optional_value<std::vector<std::size_t>>(pr, "audits.profiles", "snapshot_indices", {});
      if (pr["bubbles"]) {
        if (!pr["bubbles"].IsSequence()) fail("audits.profiles.bubbles", "must be a list");
        for (const auto& bub : pr["bubbles"]) {
          check_keys(bub, "audits.profiles.bubbles[]", {"amplitude", "width"});
          P.bubbles.push_back({required<double>(bub, "audits.profiles.bubbles[]", "amplitude"),
                               required<double>(bub, "audits.profiles.bubbles[]", "width")});
        }
      }
    }
  }

  const auto out = root["output"];
  check_keys(out, "output", {"directory", "stride", "snapshots"});
  c.output.directory = optional_value<std::string>(out, "output", "directory", "");
  c.output.stride = optional_value(out, "output", "stride", c.output.stride);
  c.output.snapshots = optional_value(out, "output", "snapshots", false);
  c.seed = optional_value<std::uint64_t>(root, "", "seed", 0);
  c.sweep = root["sweep"] ? YAML::Clone(root["sweep"]) : YAML::Node();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError("config: cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(root);
}

void validate(const ScenarioConfig& c, const std::string& command) {
  auto guard = [](const std::string& key, auto&& check) {
    try {
      check();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(key + ": " + e.what());
    }
  };
  guard("grid", [&] { c.grid.validate(); });
  guard("physics", [&] {
    State probe = zero_state(c.grid, c.physics);
    probe.validate();
  });
  guard("data", [&] { (void)make_initial_data(c.grid, c.physics, c.data); });
  guard("solver", [&] { c.solver.validate(c.grid); });
  if (c.output.stride < 1) fail("output.stride", "must be >= 1");
  const bool stores = c.solver.store_snapshots;
  if (command == "audit-tensors") {
    if (c.tensors.kinds.empty()) fail("audits.tensors.kinds", "at least one kind is required");
    if (c.solver.adaptive && c.solver.nonlinear) fail("solver.adaptive", "residual windows need a fixed step (adaptive: false)");
    if (!stores) fail("solver", "snapshots must be stored");
  }
  if (command == "cones") {
    if (!c.cones.enabled) fail("audits.cones", "required for the cones command");
    guard("audits.cones", [&] { check_box_rule(c.cones.cone, c.grid); });
    if (c.cones.flux_t0 && !(*c.cones.flux_t0 > 0.0 && *c.cones.flux_t0 < *c.cones.flux_t1))
      fail("audits.cones.flux_window", "needs 0 < t0 < t1");
  }
  if (command == "fit" && c.blowup.mass_radius && !(*c.blowup.mass_radius > 0.0))
    fail("audits.blowup.mass_radius", "must be positive");
  if (command == "decompose") {
    const auto& P = c.profiles;
    if (!P.enabled) fail("audits.profiles", "required for the decompose command");
    if (P.j_max < 1) fail("audits.profiles.j_max", "must be >= 1");
    if (!(P.tol >= 0.0)) fail("audits.profiles.tol", "must be >= 0");
    if (!(P.noise >= 0.0)) fail("audits.profiles.noise", "must be >= 0");
    if (P.window_radius && !(*P.window_radius > 0.0 && *P.window_radius <= 0.5 * c.grid.box_length))
      fail("audits.profiles.window_radius", "must lie in (0, L/2]");
    if (P.source == "synthetic") {
      if (P.bubbles.empty() || P.bubbles.size() > 3) fail("audits.profiles.bubbles", "needs one to three bubbles");
      if (P.separations.empty()) fail("audits.profiles.separations", "needs at least one member");
      for (const auto& b : P.bubbles)
        if (!(b.width > 0.0)) fail("audits.profiles.bubbles[].width", "must be positive");
      for (long s : P.separations)
        if (s < 0 || 2 * s >= static_cast<long>(c.grid.n)) fail("audits.profiles.separations", "must lie in [0, n/2)");
    } else if (P.source == "snapshots") {
      if (P.snapshot_indices.empty()) fail("audits.profiles.snapshot_indices", "needs at least one index");
    } else {
      fail("audits.profiles.source", "must be synthetic or snapshots");
    }
  }
  if (command == "sweep") {
    if (!c.sweep || !c.sweep.IsMap() || c.sweep.size() == 0) fail("sweep", "needs a mapping of dotted keys to lists");
    for (const auto& kv : c.sweep)
      if (!kv.second.IsSequence() || kv.second.size() == 0)
        fail("sweep." + kv.first.as<std::string>(), "must be a non-empty list");
  }
}

nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  const int d = c.grid.dim;
  json j;
  j["grid"] = {{"dim", d}, {"n", c.grid.n}, {"length", c.grid.box_length}};
  j["physics"] = {{"mass", c.physics.mass}, {"exponent", c.physics.exponent}};
  j["data"] = {{"kind", c.data.kind},     {"amplitude", c.data.amplitude},       {"velocity", c.data.velocity},
               {"width", c.data.width},   {"radius", c.data.radius},             {"center", point_json(c.data.center, d)},
               {"travelling", c.data.travelling}, {"time", c.data.time},
               {"wave_index", std::vector<int>(c.data.wave_index.begin(), c.data.wave_index.begin() + d)}};
  const auto& s = c.solver;
  j["solver"] = {{"dt_init", s.dt_init},
                 {"dt_min", s.dt_min},
                 {"cfl_safety", s.cfl_safety},
                 {"theta", s.theta},
                 {"adaptive", s.adaptive},
                 {"blowup_threshold", s.blowup_threshold},
                 {"t_max", s.t_max},
                 {"snapshot_stride", s.snapshot_stride},
                 {"monitor_stride", s.monitor_stride},
                 {"dealias", to_string(s.dealias)},
                 {"nonlinear", s.nonlinear}};
  json audits = json::object();
  if (!c.tensors.kinds.empty()) {
    std::vector<std::string> kinds;
    for (auto k : c.tensors.kinds) kinds.push_back(to_string(k));
    audits["tensors"] = {{"kinds", kinds}, {"apex", point_json(c.tensors.options.apex, d)},
                         {"apex_time", c.tensors.options.apex_time}};
  }
  if (c.cones.enabled) {
    const auto& k = c.cones;
    audits["cones"] = {{"vertex", point_json(k.cone.vertex, d)}, {"top_time", k.cone.top_time},
                       {"vertex_time", k.cone.vertex_time},     {"reflected", k.cone.reflected},
                       {"monotonicity_tol", k.monotonicity_tol}};
    if (k.flux_t0) audits["cones"]["flux_window"] = {*k.flux_t0, *k.flux_t1};
  }
  audits["blowup"] = {{"tail_samples", c.blowup.fit.tail_samples},
                      {"window_fraction", c.blowup.fit.window_fraction},
                      {"min_points", c.blowup.fit.min_points},
                      {"lower_bound_center", point_json(c.blowup.lower_bound_center, d)}};
  if (c.blowup.mass_radius) audits["blowup"]["mass_radius"] = *c.blowup.mass_radius;
  if (c.profiles.enabled) {
    const auto& P = c.profiles;
    json bubbles = json::array();
    for (const auto& b : P.bubbles) bubbles.push_back({{"amplitude", b.amplitude}, {"width", b.width}});
    audits["profiles"] = {{"source", P.source}, {"bubbles", bubbles},     {"separations", P.separations},
                          {"snapshot_indices", P.snapshot_indices},     {"noise", P.noise},
                          {"j_max", P.j_max},   {"tol", P.tol}};
    if (P.window_radius) audits["profiles"]["window_radius"] = *P.window_radius;
  }
  j["audits"] = audits;
  j["output"] = {{"directory", c.output.directory.string()}, {"stride", c.output.stride}, {"snapshots", c.output.snapshots}};
  j["seed"] = c.seed;
  const auto P = c.params();
  j["derived"] = {{"s_c", P.s_c}, {"alpha", P.alpha}, {"regime", to_string(P.regime)}};
  return j;
}

std::vector<YAML::Node> expand_sweep(const ScenarioConfig& c) {
  std::vector<std::pair<std::string, YAML::Node>> axes;
  for (const auto& kv : c.sweep) axes.emplace_back(kv.first.as<std::string>(), kv.second);
  std::vector<YAML::Node> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  if (axes.empty()) return out;
  while (true) {
    YAML::Node doc = YAML::Clone(c.source);
    doc.remove("sweep");
    for (std::size_t a = 0; a < axes.size(); ++a) set_path(doc, axes[a].first, axes[a].second[idx[a]]);
    out.push_back(doc);
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

std::size_t worker_count() {
  if (const char* env = std::getenv("NLKG_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("NLKG_WORKERS: must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace nlkg::cli

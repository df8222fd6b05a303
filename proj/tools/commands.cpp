#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <variant>

#include "CLI11.hpp"
#include "cli.hpp"
#include "nlkg/snapshot.hpp"

namespace nlkg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

using Cell = std::variant<std::string, double, long long>;

// Output directory with a MANIFEST that stays "incomplete" until finish().
class Artifacts {
 public:
  Artifacts(fs::path dir, std::string command, const ScenarioConfig& config)
      : dir_(std::move(dir)), command_(std::move(command)), config_(to_json(config)) {
    fs::create_directories(dir_);
    write_manifest("incomplete", "");
    write_json("config.json", config_);
  }

  const fs::path& dir() const { return dir_; }

  void csv(const std::string& name, const std::vector<std::string>& columns, const std::vector<std::vector<Cell>>& rows,
           const std::string& description) {
    std::ofstream os(dir_ / name, std::ios::binary);
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << quote(columns[i]);
    os << "\r\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, std::string>) os << quote(v);
              else if constexpr (std::is_same_v<T, double>) os << number(v);
              else os << v;
            },
            row[i]);
      }
      os << "\r\n";
    }
    files_.push_back(name);
    const auto stem = name.substr(0, name.rfind('.'));
    write_json(stem + ".json", {{"file", name}, {"columns", columns}, {"description", description},
                                {"command", command_}, {"config", config_}});
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream os(dir_ / name, std::ios::binary);
    os << j.dump(2) << "\n";
    files_.push_back(name);
  }

  void add_file(const std::string& name) { files_.push_back(name); }

  void finish() { write_manifest("complete", ""); }
  void abort(const std::string& error) { write_manifest("incomplete", error); }

 private:
  void write_manifest(const std::string& status, const std::string& error) {
    std::ofstream os(dir_ / "MANIFEST", std::ios::binary);
    os << "status: " << status << "\n" << "command: " << command_ << "\n";
    if (!error.empty()) os << "error: " << error << "\n";
    os << "files:\n";
    for (const auto& f : files_) os << "  - " << f << "\n";
  }

  fs::path dir_;
  std::string command_;
  json config_;
  std::vector<std::string> files_;
};

std::vector<std::vector<Cell>> long_rows(const std::map<std::string, Series>& series) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& [name, s] : series)
    for (std::size_t i = 0; i < s.size(); ++i) rows.push_back({name, s.times[i], s.values[i]});
  return rows;
}

std::vector<std::vector<Cell>> diagnostic_rows(const std::vector<DiagnosticSeries>& list) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& s : list)
    for (std::size_t i = 0; i < s.size(); ++i) rows.push_back({s.name, s.times[i], s.values[i]});
  return rows;
}

json run_summary(const Trajectory& traj, const CriticalParams& P) {
  const auto& en = traj.at("energy");
  return {{"termination", to_string(traj.termination)},
          {"steps", traj.steps},
          {"final_time", traj.last.time},
          {"snapshots", traj.snapshots.size()},
          {"nonlinear", traj.nonlinear},
          {"dim", P.dim},
          {"exponent", P.exponent},
          {"s_c", P.s_c},
          {"regime", to_string(P.regime)},
          {"energy_initial", en.values.front()},
          {"energy_final", en.values.back()},
          {"sup_final", traj.at("sup_norm").values.back()}};
}

std::vector<Monitor> standard_monitors(const CriticalParams& P) {
  const double q = P.exponent + 2.0;
  return {{"lp_norm", [q](const State& s) { return lebesgue_norm(s.u, q).value; }},
          {"l2_squared", [](const State& s) { return std::pow(lebesgue_norm(s.u, 2.0).value, 2); }}};
}

Trajectory simulate_into(const ScenarioConfig& c, Artifacts& art, std::vector<Monitor> extra = {}) {
  auto monitors = standard_monitors(c.params());
  for (auto& m : extra) monitors.push_back(std::move(m));
  const auto traj = evolve(make_initial_data(c.grid, c.physics, c.data), c.solver, monitors);
  art.csv("series.csv", {"series", "time", "value"}, long_rows(traj.series),
          "solver and monitor time series in long format");
  if (c.output.snapshots) {
    fs::create_directories(art.dir() / "snapshots");
    std::vector<std::vector<Cell>> rows;
    for (std::size_t i = 0; i < traj.snapshots.size(); i += c.output.stride) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "state_%06zu", i);
      write_state(art.dir() / "snapshots" / stem, traj.snapshots[i]);
      art.add_file(std::string("snapshots/") + stem + ".u.snap");
      art.add_file(std::string("snapshots/") + stem + ".v.snap");
      rows.push_back({static_cast<long long>(i), traj.snapshots[i].time, std::string("snapshots/") + stem});
    }
    art.csv("snapshots.csv", {"index", "time", "stem"}, rows, "stored states, two snapshot files per stem");
  }
  art.write_json("summary.json", run_summary(traj, c.params()));
  return traj;
}

// Minimal RFC-4180 reader for the files written above.
std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  char ch;
  while (is.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (is.peek() == '"') cell += static_cast<char>(is.get());
        else quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (ch == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  if (!cell.empty() || !row.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

Termination termination_from(const std::string& s) {
  for (auto t : {Termination::reached_t_max, Termination::blowup_detected, Termination::dt_underflow,
                 Termination::corrupted})
    if (to_string(t) == s) return t;
  throw DomainError("unknown termination '" + s + "'");
}

// Rebuilds a trajectory from a simulate directory written with output.snapshots.
Trajectory load_trajectory(const fs::path& dir) {
  Trajectory traj;
  const auto rows = read_csv(dir / "series.csv");
  for (std::size_t i = 1; i < rows.size(); ++i)
    traj.series[rows[i].at(0)].push(std::stod(rows[i].at(1)), std::stod(rows[i].at(2)));
  if (!fs::exists(dir / "snapshots.csv")) throw DomainError(dir.string() + ": no stored snapshots (output.snapshots)");
  const auto snaps = read_csv(dir / "snapshots.csv");
  for (std::size_t i = 1; i < snaps.size(); ++i) traj.snapshots.push_back(read_state(dir / snaps[i].at(2)));
  if (traj.snapshots.empty()) throw DomainError(dir.string() + ": snapshot index is empty");
  std::ifstream is(dir / "summary.json");
  const auto summary = json::parse(is);
  traj.termination = termination_from(summary.at("termination").get<std::string>());
  traj.steps = summary.at("steps").get<std::size_t>();
  traj.nonlinear = summary.at("nonlinear").get<bool>();
  traj.last = traj.snapshots.back();
  return traj;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void audit_tensors(const ScenarioConfig& c, Artifacts& art) {
  const auto traj = simulate_into(c, art);
  auto opts = c.tensors.options;
  opts.nonlinear = c.solver.nonlinear;
  std::vector<std::vector<Cell>> rows;
  const auto& snaps = traj.snapshots;
  for (auto kind : c.tensors.kinds) {
    for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
      const double dl = snaps[i].time - snaps[i - 1].time, dr = snaps[i + 1].time - snaps[i].time;
      if (std::abs(dl - dr) > 1e-9 * std::max(dl, dr)) continue;  // clipped last step
      if (time_weighted(kind) && !(snaps[i - 1].time - opts.apex_time > 0.0)) continue;
      const auto norms = residual_norms(divergence_residual(std::span(snaps).subspan(i - 1, 3), kind, opts));
      rows.push_back({to_string(kind), snaps[i].time, norms.l2, norms.linf});
    }
  }
  art.csv("tensors.csv", {"kind", "time", "residual_l2", "residual_linf"}, rows,
          "divergence residual of each tensor over consecutive snapshot triples");
  const auto slab = charge_slab_identity(traj, snaps.front().time, snaps.back().time);
  art.csv("slab.csv", {"t0", "t1", "lhs", "rhs", "gap", "kinetic_average", "potential_average", "samples"},
          {{snaps.front().time, snaps.back().time, slab.lhs, slab.rhs, slab.gap, slab.kinetic_average,
            slab.potential_average, static_cast<long long>(slab.samples)}},
          "charge identity integrated over the stored time slab");
}

void cones(const ScenarioConfig& c, Artifacts& art) {
  auto cone = c.cones.cone;
  cone.nonlinear = c.solver.nonlinear;
  const auto P = c.params();
  auto extra = cone_monitors(cone, P);
  extra.push_back(lyapunov_monitor(cone, P));
  const auto traj = simulate_into(c, art, extra);
  auto list = cone_monitor(traj, cone);
  const auto lyap = lyapunov_series(traj, cone);
  list.push_back(lyap);
  art.csv("cone_series.csv", {"series", "time", "value"}, diagnostic_rows(list),
          "normalized cone diagnostics in cone time");
  json summary = {{"regime", to_string(P.regime)}, {"s_c", P.s_c}, {"lyapunov", lyap.name}};
  const auto mono = monotonicity(lyap, c.cones.monotonicity_tol);
  summary["monotonicity"] = {{"violations", mono.violations},
                             {"worst_decrease", mono.worst_decrease},
                             {"min_relative", finite_or_null(mono.min_relative)},
                             {"tol", c.cones.monotonicity_tol}};
  json bands = json::object();
  for (const auto& s : list)
    if (s.size() > 0) bands[s.name] = finite_or_null(band_width(s, s.times.front(), s.times.back()));
  summary["band_width"] = bands;
  if (c.cones.flux_t0) {
    const auto flux = energy_flux_check(traj, cone, *c.cones.flux_t0, *c.cones.flux_t1);
    art.csv("flux.csv", {"t0", "t1", "lhs", "rhs", "gap"},
            {{*c.cones.flux_t0, *c.cones.flux_t1, flux.lhs, flux.rhs, flux.gap}}, "energy flux identity on the cone");
  }
  art.write_json("cone_summary.json", summary);
}

void fit(const ScenarioConfig& c, Artifacts& art, const std::optional<fs::path>& from) {
  const auto traj = from ? load_trajectory(*from) : simulate_into(c, art);
  const auto report = detect_and_fit(traj, c.blowup.fit);
  json j = {{"detected", report.detected},
            {"t_star", report.t_star},
            {"fit_window", report.fit_window},
            {"fit_residual", report.fit_residual},
            {"rate_exponents", report.rate_exponents},
            {"diagnostics", report.diagnostics},
            {"tail_samples", c.blowup.fit.tail_samples},
            {"window_fraction", c.blowup.fit.window_fraction}};
  const auto mass = mass_diagnostics(traj);
  std::vector<std::vector<Cell>> rows;
  for (std::size_t i = 0; i < mass.size(); ++i)
    rows.push_back({mass.times[i], mass.M[i], mass.M_prime[i], mass.M_doubleprime[i], mass.energy[i], mass.grad_sq[i]});
  art.csv("mass.csv", {"time", "M", "M_prime", "M_doubleprime", "energy", "grad_sq"}, rows,
          "mass functional and closed-form derivatives per snapshot");
  const auto resolved = resolved_window(mass);
  const auto conc = concavity_check(resolved);
  j["concavity"] = {{"resolved_samples", resolved.size()},
                    {"inequality_violations", conc.inequality_violations},
                    {"concavity_violations", conc.concavity_violations},
                    {"worst_inequality", conc.worst_inequality},
                    {"worst_concavity", conc.worst_concavity},
                    {"checked", conc.checked},
                    {"t0_index", resolved.t0_index ? json(*resolved.t0_index) : json(nullptr)}};
  if (c.blowup.mass_radius) {
    const auto tm = truncated_mass(traj, *c.blowup.mass_radius);
    std::vector<std::vector<Cell>> trows;
    for (std::size_t i = 0; i < tm.size(); ++i)
      trows.push_back({tm.times[i], tm.M[i], tm.M_prime[i], tm.M_doubleprime[i], tm.second_difference[i]});
    art.csv("truncated_mass.csv", {"time", "M", "M_prime", "M_doubleprime", "second_difference"}, trows,
            "cut-off mass with the expanded second-derivative identity");
    j["truncated_identity_gap"] = tm.identity_gap;
  }
  art.csv("critical_norm.csv", {"series", "time", "value"}, diagnostic_rows({critical_norm_series(traj)}),
          "critical Sobolev norm of (u, u_t) per snapshot");
  if (report.detected) {
    const auto lb = lower_bound_check(traj, report.t_star, c.blowup.lower_bound_center);
    art.csv("lower_bound.csv", {"series", "time", "value"}, diagnostic_rows({lb}),
            "scaled local norm on balls of radius T* - t");
  }
  art.write_json("fit.json", j);
}

void decompose(const ScenarioConfig& c, Artifacts& art, const std::optional<fs::path>& from) {
  const auto& P = c.profiles;
  const auto params = c.params();
  FunctionFamily family;
  json truth = nullptr;
  if (P.source == "synthetic") {
    auto synth = synthetic_family(c.grid, P.bubbles, P.separations);
    if (P.noise > 0.0) {
      std::mt19937_64 rng(c.seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (auto& f : synth.family.members) {
        // smooth noise: white noise restricted to |xi| <= 4
        Field w(c.grid);
        for (auto& v : w.values()) v = gauss(rng);
        auto W = forward_transform(w);
        for_each_mode(c.grid, [&](std::size_t i, const Mode& m) {
          if (m.magnitude > 4.0) W.coefficients[i] = 0.0;
        });
        auto noise = inverse_transform(W);
        const double scale = noise.max_abs();
        if (scale > 0.0) f += (P.noise * f.max_abs() / scale) * noise;
      }
    }
    truth = json::array();
    for (const auto& member : synth.centers) {
      json m = json::array();
      for (const auto& s : member) m.push_back(std::vector<long>(s.begin(), s.begin() + c.grid.dim));
      truth.push_back(m);
    }
    family = std::move(synth.family);
  } else {
    if (!from) throw ConfigError("audits.profiles.source: snapshots needs --from <simulate directory>");
    const auto traj = load_trajectory(*from);
    for (auto i : P.snapshot_indices) {
      if (i >= traj.snapshots.size()) throw ConfigError("audits.profiles.snapshot_indices: index out of range");
      family.members.push_back(traj.snapshots[i].u);
    }
  }
  ExtractOptions opts;
  opts.window_radius = P.window_radius;
  const auto dec = bubble_decompose(family, params, P.j_max, P.tol, opts);
  const auto gaps = decoupling_audit(dec, family, params);

  std::vector<std::vector<Cell>> levels;
  for (std::size_t j = 0; j < dec.epsilon.size(); ++j)
    levels.push_back({static_cast<long long>(j), dec.epsilon[j], dec.sobolev[j]});
  art.csv("levels.csv", {"J", "epsilon", "M"}, levels, "L^{p+2} and Sobolev levels of the residuals");

  std::vector<std::vector<Cell>> centers;
  fs::create_directories(art.dir() / "profiles");
  json bubbles = json::array();
  for (std::size_t j = 0; j < dec.bubbles.size(); ++j) {
    const auto& b = dec.bubbles[j];
    for (std::size_t n = 0; n < b.centers.size(); ++n) {
      std::vector<Cell> row{static_cast<long long>(j), static_cast<long long>(n)};
      for (int a = 0; a < 3; ++a) row.push_back(static_cast<long long>(a < c.grid.dim ? b.centers[n][a] : 0));
      for (int a = 0; a < 3; ++a)
        row.push_back(a < c.grid.dim ? c.grid.coordinate(static_cast<std::size_t>(b.centers[n][a])) : 0.0);
      centers.push_back(row);
    }
    char name[32];
    std::snprintf(name, sizeof name, "profiles/profile_%02zu.snap", j);
    write_snapshot(art.dir() / name, b.profile, 0.0, c.physics);
    art.add_file(name);
    const auto& st = b.stats;
    bubbles.push_back({{"file", name},
                       {"epsilon", st.epsilon},
                       {"M", st.M},
                       {"K", st.K},
                       {"frequencies", st.frequencies},
                       {"window_radius", st.window_radius},
                       {"phi_h1_sq", st.phi.h1_sq},
                       {"phi_hsc_sq", st.phi.hsc_sq},
                       {"phi_lp_pow", st.phi.lp_pow},
                       {"alpha_h1", st.alpha_h1},
                       {"alpha_hsc", st.alpha_hsc},
                       {"alpha_lp", st.alpha_lp}});
  }
  art.csv("centers.csv", {"bubble", "member", "i", "j", "k", "x", "y", "z"}, centers,
          "grid index and coordinates of each bubble center per family member");
  json seps = json::array();
  for (double s : gaps.min_separation) seps.push_back(finite_or_null(s));
  art.write_json("decomposition.json", {{"bubbles", bubbles},
                                        {"converged", dec.converged},
                                        {"audit", {{"member", gaps.member},
                                                   {"h1", gaps.h1},
                                                   {"hsc", gaps.hsc},
                                                   {"lp", gaps.lp},
                                                   {"min_separation", seps},
                                                   {"separation_nondecreasing", gaps.separation_nondecreasing}}},
                                        {"true_centers", truth},
                                        {"regime", to_string(params.regime)}});
}

struct Scenario {
  ScenarioConfig config;
  fs::path dir;
};

void sweep(const ScenarioConfig& c, Artifacts& art) {
  std::vector<Scenario> scenarios;
  std::vector<std::string> keys;
  for (const auto& kv : c.sweep) keys.push_back(kv.first.as<std::string>());
  for (const auto& doc : expand_sweep(c)) {
    Scenario s{parse_config(doc), {}};
    char name[32];
    std::snprintf(name, sizeof name, "scenario_%03zu", scenarios.size());
    s.dir = art.dir() / name;
    try {
      validate(s.config, "simulate");
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(name) + ": " + e.what());
    }
    scenarios.push_back(std::move(s));
  }
  std::vector<std::string> errors(scenarios.size());
  std::vector<json> summaries(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      Artifacts sub(scenarios[i].dir, "simulate", scenarios[i].config);
      try {
        const auto traj = simulate_into(scenarios[i].config, sub);
        summaries[i] = run_summary(traj, scenarios[i].config.params());
        sub.write_json("report.json", summaries[i]);
        sub.finish();
      } catch (const std::exception& e) {
        errors[i] = e.what();
        sub.abort(e.what());
      }
    }
  };
  const std::size_t workers = std::min(worker_count(), scenarios.size());
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();

  std::vector<std::string> columns{"scenario"};
  for (const auto& k : keys) columns.push_back(k);
  for (const char* k : {"dim", "exponent", "s_c", "regime", "termination", "final_time", "sup_final", "error"})
    columns.push_back(k);
  std::vector<std::vector<Cell>> rows;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& sc = scenarios[i].config;
    std::vector<Cell> row{scenarios[i].dir.filename().string()};
    for (const auto& k : keys) {
      YAML::Node v = sc.source;
      std::stringstream ss(k);
      for (std::string part; std::getline(ss, part, '.');) v = v[part];
      row.push_back(v.as<std::string>());
    }
    const auto P = sc.params();
    row.push_back(static_cast<long long>(P.dim));
    row.push_back(P.exponent);
    row.push_back(P.s_c);
    row.push_back(to_string(P.regime));
    if (errors[i].empty()) {
      row.push_back(summaries[i]["termination"].get<std::string>());
      row.push_back(summaries[i]["final_time"].get<double>());
      row.push_back(summaries[i]["sup_final"].get<double>());
      row.push_back(std::string());
    } else {
      row.insert(row.end(), {std::string(), std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN(), errors[i]});
    }
    rows.push_back(row);
  }
  art.csv("sweep.csv", columns, rows, "one row per scenario with its regime tag and run outcome");
  for (const auto& e : errors)
    if (!e.empty()) throw Error("sweep: at least one scenario failed");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Focusing nonlinear Klein-Gordon simulator and diagnostics"};
  app.require_subcommand(1);
  std::string config_path, out_override, from_dir;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"simulate", "evolve the scenario and write solver and monitor series"},
      {"audit-tensors", "divergence residuals of the conserved tensors and the charge slab identity"},
      {"cones", "Lyapunov functionals, cone monitors and the energy flux identity"},
      {"fit", "blowup time, rate exponents, mass concavity and critical norm"},
      {"decompose", "bubble decomposition of a synthetic or stored family"},
      {"sweep", "run the cartesian product of the sweep lists concurrently (NLKG_WORKERS caps threads)"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "scenario file (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_override, "output directory (overrides output.directory)");
    if (std::string(name) == "fit" || std::string(name) == "decompose")
      sub->add_option("--from", from_dir, "simulate directory with stored snapshots")->check(CLI::ExistingDirectory);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  ScenarioConfig config;
  try {
    config = load_config(config_path);
    if (!out_override.empty()) config.output.directory = out_override;
    if (config.output.directory.empty()) throw ConfigError("output.directory: required (or pass --out)");
    validate(config, command);
  } catch (const ConfigError& e) {
    std::cerr << "nlkg: invalid config: " << e.what() << "\n";
    return 2;
  }

  const std::optional<fs::path> from = from_dir.empty() ? std::nullopt : std::optional<fs::path>(from_dir);
  Artifacts art(config.output.directory, command, config);
  try {
    if (command == "simulate") simulate_into(config, art);
    else if (command == "audit-tensors") audit_tensors(config, art);
    else if (command == "cones") cones(config, art);
    else if (command == "fit") fit(config, art, from);
    else if (command == "decompose") decompose(config, art, from);
    else if (command == "sweep") sweep(config, art);
    art.finish();
  } catch (const ConfigError& e) {
    art.abort(e.what());
    std::cerr << "nlkg: invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    art.abort(e.what());
    std::cerr << "nlkg: " << command << " failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace nlkg::cli

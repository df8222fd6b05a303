#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("nlkg_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "nlkg");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return nlkg::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::ifstream is(p);
  for (std::string line; std::getline(is, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

const char* kGaussian = R"(grid: {dim: 2, n: 16, length: 8.0}
physics: {mass: 0.5, exponent: 2.0}
data: {kind: gaussian, amplitude: 0.8, width: 0.8}
solver: {dt_init: 0.05, t_max: 0.5, snapshot_stride: 2}
output: {snapshots: true}
seed: 3
)";

}  // namespace

TEST(Cli, ZeroDataGivesZeroSeries) {
  const auto dir = scratch("zero");
  const auto cfg = write(dir, "zero.yaml", R"(grid: {dim: 2, n: 16, length: 8.0}
physics: {mass: 0.5, exponent: 2.0}
data: {kind: zero}
solver: {dt_init: 0.05, t_max: 0.5}
)");
  ASSERT_EQ(run({"simulate", cfg.string(), "-o", (dir / "out").string()}), 0);
  const auto table = rows(dir / "out" / "series.csv");
  ASSERT_GT(table.size(), 1u);
  EXPECT_EQ(table[0], (std::vector<std::string>{"series", "time", "value"}));
  for (std::size_t i = 1; i < table.size(); ++i)
    if (table[i][0] != "dt") EXPECT_EQ(std::stod(table[i][2]), 0.0) << table[i][0];
  EXPECT_NE(slurp(dir / "out" / "MANIFEST").find("status: complete"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "series.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "config.json"));
}

TEST(Cli, RunsAreByteIdentical) {
  const auto dir = scratch("determinism");
  const auto cfg = write(dir, "g.yaml", kGaussian);
  ASSERT_EQ(run({"simulate", cfg.string(), "-o", (dir / "a").string()}), 0);
  ASSERT_EQ(run({"simulate", cfg.string(), "-o", (dir / "b").string()}), 0);
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    const auto ext = e.path().extension();
    if (ext != ".csv" && ext != ".snap") continue;
    const auto other = dir / "b" / fs::relative(e.path(), dir / "a");
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path();
    ++compared;
  }
  EXPECT_GT(compared, 3u);
}

TEST(Cli, SweepTagsRegimes) {
  const auto dir = scratch("sweep");
  const auto cfg = write(dir, "s.yaml", R"(grid: {dim: 3, n: 16, length: 8.0}
physics: {mass: 0.0, exponent: 2.0}
data: {kind: gaussian, amplitude: 0.5, width: 1.0}
solver: {dt_init: 0.05, t_max: 0.1}
sweep: {physics.exponent: [1.8, 2.0, 2.2]}
)");
  setenv("NLKG_WORKERS", "2", 1);
  ASSERT_EQ(run({"sweep", cfg.string(), "-o", (dir / "out").string()}), 0);
  unsetenv("NLKG_WORKERS");
  const auto table = rows(dir / "out" / "sweep.csv");
  ASSERT_EQ(table.size(), 4u);
  const auto& head = table[0];
  const auto col = std::find(head.begin(), head.end(), "regime") - head.begin();
  EXPECT_EQ(table[1][col], "sub_conformal");
  EXPECT_EQ(table[2][col], "conformal");
  EXPECT_EQ(table[3][col], "super_conformal");
  for (int i = 0; i < 3; ++i) {
    const auto sub = dir / "out" / ("scenario_00" + std::to_string(i));
    EXPECT_TRUE(fs::exists(sub / "report.json"));
    EXPECT_NE(slurp(sub / "MANIFEST").find("status: complete"), std::string::npos);
  }
}

TEST(Cli, ValidationNamesThePrecondition) {
  const auto dir = scratch("validation");
  std::string text = kGaussian;
  const auto missing = write(dir, "m.yaml", text.replace(text.find("physics: {mass: 0.5, exponent: 2.0}"), 35,
                                                         "physics: {mass: 0.5}"));
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"simulate", missing.string(), "-o", (dir / "m").string()}), 2);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("physics.exponent"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "m"));

  std::string big = kGaussian;
  const auto cfl = write(dir, "c.yaml", big.replace(big.find("dt_init: 0.05"), 13, "dt_init: 0.9"));
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"simulate", cfl.string(), "-o", (dir / "c").string()}), 2);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("cfl_safety"), std::string::npos);

  setenv("NLKG_WORKERS", "zero", 1);
  EXPECT_THROW(nlkg::cli::worker_count(), nlkg::cli::ConfigError);
  unsetenv("NLKG_WORKERS");
}

TEST(Cli, FailedRunLeavesIncompleteManifest) {
  const auto dir = scratch("partial");
  const auto cfg = write(dir, "f.yaml", R"(grid: {dim: 2, n: 16, length: 8.0}
physics: {mass: 0.0, exponent: 2.0}
data: {kind: constant, amplitude: 1.0}
solver: {dt_init: 0.01, t_max: 3.0, blowup_threshold: 1.0e4}
audits:
  blowup: {mass_radius: 1.0}
)");
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"fit", cfg.string(), "-o", (dir / "out").string()}), 1);
  testing::internal::GetCapturedStderr();
  const auto manifest = slurp(dir / "out" / "MANIFEST");
  EXPECT_NE(manifest.find("status: incomplete"), std::string::npos);
  EXPECT_NE(manifest.find("error: truncated_mass"), std::string::npos);
}

TEST(Cli, FitReadsStoredTrajectory) {
  const auto dir = scratch("fit");
  const auto cfg = write(dir, "b.yaml", R"(grid: {dim: 2, n: 16, length: 8.0}
physics: {mass: 0.0, exponent: 2.0}
data: {kind: constant, amplitude: 1.0}
solver: {dt_init: 0.001, t_max: 3.0, blowup_threshold: 1.0e6, snapshot_stride: 20}
output: {snapshots: true}
)");
  ASSERT_EQ(run({"simulate", cfg.string(), "-o", (dir / "sim").string()}), 0);
  ASSERT_EQ(run({"fit", cfg.string(), "--from", (dir / "sim").string(), "-o", (dir / "fit").string()}), 0);
  const auto fit = nlohmann::json::parse(slurp(dir / "fit" / "fit.json"));
  EXPECT_TRUE(fit["detected"].get<bool>());
  // constant data: the T* of the spatially homogeneous ODE, 1.854074677
  EXPECT_NEAR(fit["t_star"].get<double>(), 1.854074677, 1e-3);
}

TEST(Cli, DecomposeSynthetic) {
  const auto dir = scratch("decompose");
  const auto cfg = write(dir, "d.yaml", R"(grid: {dim: 2, n: 256, length: 32.0}
physics: {mass: 0.0, exponent: 2.0}
data: {kind: zero}
solver: {dt_init: 0.01, t_max: 0.0}
audits:
  profiles: {source: synthetic, bubbles: [{amplitude: 1.0, width: 0.75}, {amplitude: 0.8, width: 1.125}], separations: [40, 80], j_max: 2, tol: 1.0e-6}
)");
  ASSERT_EQ(run({"decompose", cfg.string(), "-o", (dir / "out").string()}), 0);
  const auto dec = nlohmann::json::parse(slurp(dir / "out" / "decomposition.json"));
  ASSERT_EQ(dec["bubbles"].size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "out" / "profiles" / "profile_00.snap"));
  EXPECT_TRUE(dec["audit"]["separation_nondecreasing"].get<bool>());
  const auto table = rows(dir / "out" / "centers.csv");
  EXPECT_EQ(table.size(), 5u);
}

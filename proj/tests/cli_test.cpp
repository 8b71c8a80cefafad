#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "scars/io/config.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = SCARS_CLI_PATH;
const std::string configs = SCARS_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("scars_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

/// Runs the CLI with output discarded and returns its exit status.
int run(const std::string& args) {
  const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> sidecar(const fs::path& p) {
  std::map<std::string, std::string> m;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

void expect_identical_trees(const fs::path& a, const fs::path& b) {
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const fs::path other = b / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
  }
  EXPECT_GT(files, 0u);
  EXPECT_EQ(files, static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{})));
}

}  // namespace

TEST(Cli, CatScarsReportsPaperTraces) {
  const auto out = scratch("cat");
  ASSERT_EQ(run("cat-scars --config " + configs + "/cat_scars.conf --out " + out.string()), 0);
  const auto n1 = sidecar(out / "diagonal_n1.txt");
  const auto n3 = sidecar(out / "diagonal_n3.txt");
  EXPECT_NEAR(std::stod(n1.at("trace")), 2.0, 1e-6);
  EXPECT_NEAR(std::stod(n3.at("trace")), 50.0, 1e-6);
  EXPECT_EQ(n1.at("config.dimension"), "60");
  EXPECT_EQ(n1.at("seed"), "1");
  EXPECT_LT(std::stod(n1.at("identity_residual")), 1e-8);
  EXPECT_EQ(n1.at("point_hit_rate"), "1");
  EXPECT_TRUE(fs::exists(out / "diagonal_n1.ppm"));
  EXPECT_TRUE(fs::exists(out / "diagonal_n1.csv"));
  EXPECT_TRUE(fs::exists(out / "markers_n3.csv"));
}

TEST(Cli, CatScarsAtZeroStepsIsUniform) {
  const auto out = scratch("cat0");
  ASSERT_EQ(run("cat-scars --config " + configs + "/cat_uniform.conf --out " + out.string()), 0);
  const auto m = sidecar(out / "diagonal_n0.txt");
  EXPECT_EQ(m.at("trace"), "3600");
  EXPECT_NEAR(std::stod(m.at("min")), std::stod(m.at("max")), 1e-12);
}

TEST(Cli, OscillatorAtZeroTimeIsUniform) {
  const auto out = scratch("osc0");
  ASSERT_EQ(run("oscillator-scars --config " + configs + "/oscillator_uniform.conf --out " + out.string()), 0);
  for (const char* f : {"quantum_n0.txt", "classical_n0.txt"}) {
    const auto m = sidecar(out / f);
    EXPECT_NEAR(std::stod(m.at("min")), std::stod(m.at("max")), 1e-12 * std::abs(std::stod(m.at("max")))) << f;
  }
}

TEST(Cli, HarmonicLimitDiscrepancyBelowTolerance) {
  const auto out = scratch("harm");
  ASSERT_EQ(run("oscillator-scars --config " + configs + "/harmonic_limit.conf --set grid_n=512 --set box_length=60 --out " +
                out.string()),
            0);
  const auto m = sidecar(out / "quantum_n1.txt");
  EXPECT_LT(std::stod(m.at("normalized_l1")), 1e-2);
}

TEST(Cli, FormFactorIdentityResiduals) {
  const auto out = scratch("ff");
  ASSERT_EQ(run("form-factor --config " + configs + "/form_factor_cat.conf --out " + out.string()), 0);
  const auto m = sidecar(out / "form_factor.txt");
  EXPECT_LT(std::stod(m.at("identity_residual_max")), 1e-8);
  EXPECT_NEAR(std::stod(m.at("K_n0")), 60.0, 1e-9);
  const std::string csv = slurp(out / "form_factor.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,tau,K,two_over_beta_tau_Pcl,ratio");
  EXPECT_NE(csv.find("\n0,0,0,0,0\n"), std::string::npos);
}

TEST(Cli, MidpointSurfaceMeshes) {
  const auto out = scratch("mid");
  ASSERT_EQ(run("midpoint-surface --set curve=circle --set samples=2 --out " + out.string()), 0);
  EXPECT_EQ(sidecar(out / "surface.txt").at("vertices"), "1");
  ASSERT_EQ(run("midpoint-surface --config " + configs + "/midpoint_knot.conf --out " + out.string()), 0);
  const auto m = sidecar(out / "surface.txt");
  EXPECT_EQ(m.at("vertices"), std::to_string(120 * 119 / 2));
  EXPECT_NE(slurp(out / "surface.obj").find("\nf "), std::string::npos);
}

TEST(Cli, PeriodicPointsAndPoincare) {
  const auto out = scratch("pp");
  ASSERT_EQ(run("periodic-points --config " + configs + "/periodic_points_cat.conf --out " + out.string()), 0);
  const std::string csv = slurp(out / "points_n3.csv");
  std::size_t fixed = 0;
  for (std::size_t pos = csv.find(",fixed,"); pos != std::string::npos; pos = csv.find(",fixed,", pos + 1)) ++fixed;
  EXPECT_EQ(fixed, 50u);
  ASSERT_EQ(run("poincare --set seed_count=3 --set section_periods=10 --out " + out.string()), 0);
  EXPECT_EQ(sidecar(out / "section.txt").at("points"), "33");
}

TEST(Cli, ExitCodes) {
  const auto out = scratch("codes");
  EXPECT_EQ(run("cat-scars --set bogus=1 --out " + out.string()), 1);
  EXPECT_EQ(run("cat-scars --set dimension=61 --out " + out.string()), 1);
  EXPECT_EQ(run("cat-scars --set map=1,1,1,1 --out " + out.string()), 1);
  EXPECT_EQ(run("cat-scars --config /nonexistent.conf --out " + out.string()), 1);
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("oscillator-scars --set grid_n=100 --out " + out.string()), 1);
  EXPECT_EQ(run("oscillator-scars --set grid_n=128 --out " + out.string()), 1);  // window beyond Nyquist
  // An impossible tolerance turns the trace-identity self-check into a failure.
  EXPECT_EQ(run("cat-scars --set tolerance=1e-300 --out " + out.string()), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, DeterministicOutputs) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    ASSERT_EQ(run("cat-scars --config " + configs + "/cat_scars.conf --seed 7 --out " + dir.string() + "/cat"), 0);
    ASSERT_EQ(run("oscillator-scars --config " + configs + "/oscillator_small.conf --seed 7 --out " + dir.string() +
                  "/osc"),
              0);
    ASSERT_EQ(run("poincare --config " + configs + "/poincare.conf --set section_periods=20 --seed 7 --out " +
                  dir.string() + "/sec"),
              0);
  }
  for (const char* sub : {"cat", "osc", "sec"}) expect_identical_trees(a / sub, b / sub);
}

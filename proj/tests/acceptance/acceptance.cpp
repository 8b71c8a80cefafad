// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracles.hpp"
#include "scars/analysis/spectral.hpp"
#include "scars/continuum/classical.hpp"
#include "scars/continuum/quantum.hpp"
#include "scars/continuum/scars.hpp"
#include "scars/torus/classical.hpp"
#include "scars/torus/quantum.hpp"

namespace fs = std::filesystem;
using namespace scars;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const torus::TorusMap cat{2, 1, 3, 2};

Outcome cat_traces() {
  const auto u = torus::quantize_cat(cat, 60);
  const double t1 = torus::trace_field(torus::diagonal_wigner_field(torus::discrete_weyl_symbol(u, 1)));
  const double t3 = torus::trace_field(torus::diagonal_wigner_field(torus::discrete_weyl_symbol(u, 3)));
  const double r1 = std::abs(t1 - 2.0) / 2.0, r3 = std::abs(t3 - 50.0) / 50.0;
  return {r1 < 1e-5 && r3 < 1e-5, "n=1 sum " + fmt("%.12g", t1) + ", n=3 sum " + fmt("%.12g", t3)};
}

/// Floquet operator at N = 512 with paper parameters, shared by criteria 2 and 6.
const continuum::FloquetOperator& floquet512() {
  static const continuum::FloquetOperator op =
      continuum::build_floquet({}, {512, 120.0, 1.5}, {2, 512}, 1, 1.0);  // unitarity asserted by criterion 6
  return op;
}

Outcome trace_identity() {
  double worst_cat = 0.0;
  for (Eigen::Index d : {30, 60, 120}) {
    const auto u = torus::quantize_cat(cat, d);
    const analysis::SpectralSeries s{continuum::eigenphases(u.unitary), 2};
    for (int n = 0; n <= 6; ++n) {
      const double p = torus::trace_field(torus::diagonal_wigner_field(torus::discrete_weyl_symbol(u, n)));
      worst_cat = std::max({worst_cat, weyl::relative_residual(p, torus::trace_power_squared(u, n)),
                            analysis::identity_check(p, s, n)});
    }
  }
  const auto& op = floquet512();
  double worst_floquet = 0.0;
  Eigen::MatrixXcd kn = Eigen::MatrixXcd::Identity(op.grid.n, op.grid.n);
  for (int n = 1; n <= 3; ++n) {
    kn = op.matrix * kn;
    const auto f = continuum::continuum_diagonal_field(kn, op.grid, 1.0);
    worst_floquet = std::max({worst_floquet, f.trace_residual, f.imag_residual});
  }
  return {worst_cat < 1e-8 && worst_floquet < 1e-8,
          "cat max residual " + fmt("%.2e", worst_cat) + ", Floquet N=512 max residual " + fmt("%.2e", worst_floquet)};
}

Outcome periodic_point_oracle() {
  const std::vector<std::size_t> expected{2, 12, 50};
  std::string detail = "counts";
  bool ok = true;
  for (int n = 1; n <= 3; ++n) {
    const auto set = torus::enumerate_periodic_points(cat, n);
    auto scan = oracle::lattice_scan(cat, n, set.denom);
    std::sort(scan.begin(), scan.end());
    ok = ok && scan == set.points && set.points.size() == expected[static_cast<std::size_t>(n - 1)];
    detail += " " + std::to_string(set.points.size());
  }
  return {ok, detail + " (brute-force scan identical)"};
}

Outcome peak_localization() {
  const auto u = torus::quantize_cat(cat, 60);
  double rate[4] = {0, 0, 0, 0};
  for (int n : {1, 3}) {
    const auto f = torus::diagonal_wigner_field(torus::discrete_weyl_symbol(u, n));
    const auto report = torus::peak_match(f, torus::enumerate_periodic_points(cat, n), nullptr, 1.0);
    rate[n] = torus::PeakMatchReport::hit_rate(report.points);
  }
  return {rate[1] == 1.0 && rate[3] >= 0.9,
          "n=1 hit rate " + fmt("%.3f", rate[1]) + ", n=3 hit rate " + fmt("%.3f", rate[3]) + " (1 pixel)"};
}

Outcome superoperator_oracle() {
  const auto u = torus::quantize_cat(cat, 4);
  double worst = 0.0;
  for (int n = 0; n <= 3; ++n) {
    const auto fast = torus::diagonal_wigner_field(torus::discrete_weyl_symbol(u, n)).field.values;
    const auto brute = oracle::superoperator_diagonal(torus::unitary_power(u, n));
    worst = std::max({worst, (fast - brute.real()).cwiseAbs().maxCoeff(), brute.imag().cwiseAbs().maxCoeff()});
  }
  return {worst < 1e-10, "D=4 max entry difference " + fmt("%.2e", worst)};
}

Outcome unitarity() {
  double worst_cat = 0.0;
  for (Eigen::Index d : {4, 30, 60, 120, 256}) worst_cat = std::max(worst_cat, torus::unitarity_residual(torus::quantize_cat(cat, d).unitary));
  const double fl = floquet512().unitarity;
  return {worst_cat < 1e-10 && fl < 1e-8, "cat " + fmt("%.2e", worst_cat) + ", Floquet N=512 " + fmt("%.2e", fl)};
}

Outcome classical_integrity() {
  continuum::DrivenQuarticParams undriven;
  undriven.S = 0.0;
  double drift = 0.0;
  for (const continuum::PhasePoint s : {continuum::PhasePoint{3.0, 30.0, 0.0}, continuum::PhasePoint{12.0, -20.0, 0.0}}) {
    const double e0 = undriven.static_energy(s.p, s.q);
    const auto e = continuum::integrate(undriven, s, 10 * undriven.period(), undriven.period() / 2048);
    drift = std::max(drift, std::abs(undriven.static_energy(e.p, e.q) - e0) / std::abs(e0));
  }
  const continuum::DrivenQuarticParams paper;
  const auto found = continuum::find_periodic_points(
      paper, {}, continuum::guess_grid(-45.0, 45.0, -12.0, 12.0, 19, 9), 1);
  double det_err = found.records.empty() ? 1.0 : 0.0;
  for (const auto& r : found.records) det_err = std::max(det_err, std::abs(r.monodromy.determinant() - 1.0));
  const double qmin = std::sqrt(8.0 * paper.Eb);
  const double depth = std::abs(paper.static_potential(qmin) + paper.Eb) / paper.Eb;
  return {drift < 1e-8 && det_err < 1e-6 && depth < 1e-12,
          "energy drift " + fmt("%.2e", drift) + ", |det M - 1| " + fmt("%.2e", det_err) + " over " +
              std::to_string(found.records.size()) + " orbits, well depth error " + fmt("%.1e", depth)};
}

Outcome quadratic_transport() {
  continuum::DrivenQuarticParams h;
  h.kind = continuum::PotentialKind::harmonic;
  h.S = 0.0;
  const continuum::PositionGrid grid;  // default grid
  const double sigma = std::sqrt(grid.hbar / (h.m * h.Omega));
  const auto rep = continuum::coherent_state_transport_check(h, grid, {2, 512}, sigma, 10.0, 0.0, h.period());
  return {rep.l1_error < 1e-3, "L1 after one period " + fmt("%.2e", rep.l1_error) + " on N=1024, L=120, hbar=1.5"};
}

Outcome fig4_structure() {
  continuum::ScarSettings s;  // paper parameters, right-well window
  s.periods = {1};            // t = T
  const auto run = continuum::run_scars(s);
  const auto& panel = run.panels.front();
  const bool ok = !panel.markers.empty() && panel.min_contrast() > 5.0 && panel.jaccard > 0.2;
  return {ok, std::to_string(panel.markers.size()) + " verified points, min value/median " +
                  fmt("%.3g", panel.min_contrast()) + ", top-decile Jaccard " + fmt("%.3f", panel.jaccard)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "scars_acceptance_determinism";
  fs::remove_all(root);
  const std::string cli = SCARS_CLI_PATH, cfg = SCARS_CONFIG_DIR;
  const std::vector<std::pair<std::string, std::string>> runs{{"cat-scars", "cat_scars.conf"},
                                                              {"oscillator-scars", "oscillator_small.conf"}};
  for (const char* rep : {"a", "b"}) {
    for (const auto& [sub, conf] : runs) {
      const std::string cmd = cli + " " + sub + " --config " + cfg + "/" + conf + " --seed 11 --out " +
                              (root / rep / sub).string() + " > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "run failed: " + sub};
    }
  }
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path twin = root / "b" / fs::relative(e.path(), root / "a");
    if (!fs::exists(twin) || slurp(e.path()) != slurp(twin)) ++differ;
  }
  fs::remove_all(root);
  return {files > 0 && differ == 0, std::to_string(files) + " files compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"cat-map trace reproduction (2.0 and 50.0)", cat_traces},
      {"exact trace identity (cat map and Floquet)", trace_identity},
      {"periodic-point oracle equivalence", periodic_point_oracle},
      {"peak localization at D=60", peak_localization},
      {"small-D superoperator oracle", superoperator_oracle},
      {"unitarity", unitarity},
      {"classical integrity", classical_integrity},
      {"quadratic-limit coherent-state transport", quadratic_transport},
      {"driven-oscillator scar structure at t=T", fig4_structure},
      {"determinism of CLI outputs", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%zu] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

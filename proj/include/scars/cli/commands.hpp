#pragma once

// Subcommands behind the `scars` executable. Each command declares its
// configuration keys with defaults, reads and validates all of them before
// computing, writes its files into the output directory and prints a short
// summary. Every image is accompanied by a key=value sidecar holding the
// effective configuration, the seed, the tolerances and the residuals.
// Failed self-checks raise numerical_error after the files are written, so
// a failing run still leaves its evidence behind.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "scars/analysis/spectral.hpp"
#include "scars/continuum/classical.hpp"
#include "scars/continuum/midpoints.hpp"
#include "scars/continuum/quantum.hpp"
#include "scars/continuum/scars.hpp"
#include "scars/core/errors.hpp"
#include "scars/io/config.hpp"
#include "scars/io/output.hpp"
#include "scars/torus/classical.hpp"
#include "scars/torus/quantum.hpp"

namespace scars::cli {

struct RunOptions {
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct Command {
  const char* name;
  const char* summary;
  void (*declare)(io::Config&);
  void (*run)(const io::Config&, const RunOptions&, std::ostream&);
};

namespace detail {

using io::format_real;

inline io::Metadata base_metadata(const char* command, const io::Config& cfg, const RunOptions& opt) {
  io::Metadata m{{"command", command}, {"seed", std::to_string(opt.seed)}};
  for (const auto& [k, v] : cfg.entries()) m.emplace_back("config." + k, v);
  return m;
}

inline long long int_in(const io::Config& cfg, const std::string& key, long long lo, long long hi) {
  const long long v = cfg.integer(key);
  require(v >= lo && v <= hi,
          "config: '" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

inline std::vector<int> int_list(const io::Config& cfg, const std::string& key, int lo, int hi) {
  std::vector<int> out;
  for (long long v : cfg.integers(key)) {
    require(v >= lo && v <= hi,
            "config: entries of '" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out.push_back(static_cast<int>(v));
  }
  require(!out.empty(), "config: '" + key + "' must not be empty");
  return out;
}

inline std::string choice(const io::Config& cfg, const std::string& key, const std::vector<std::string>& allowed) {
  const std::string& v = cfg.text(key);
  std::string list;
  for (const auto& a : allowed) {
    if (v == a) return v;
    list += (list.empty() ? "" : ", ") + a;
  }
  throw validation_error("config: '" + key + "' must be one of " + list + ", got '" + v + "'");
}

// ---- cat map -------------------------------------------------------------

inline void declare_cat(io::Config& c) { c.declare("map", "2,1,3,2").declare("dimension", "60"); }

inline torus::TorusMap read_cat(const io::Config& c) {
  const auto v = c.integers("map");
  require(v.size() == 4, "config: 'map' must list four integers a,b,c,d");
  torus::TorusMap m{v[0], v[1], v[2], v[3]};
  m.validate(true);
  return m;
}

// ---- driven oscillator ---------------------------------------------------

inline void declare_oscillator(io::Config& c) {
  c.declare("potential", "quartic")
      .declare("mass", "1")
      .declare("omega0", "1")
      .declare("drive_frequency", "0.95")
      .declare("drive_phase", "1.0471975511965976")
      .declare("drive_amplitude", "0.07")
      .declare("barrier_energy", "192")
      .declare("harmonic_frequency", "1")
      .declare("phase_origin", "0")
      .declare("classical_order", "4")
      .declare("classical_steps", "512");
}

inline continuum::DrivenQuarticParams read_params(const io::Config& c) {
  continuum::DrivenQuarticParams p;
  p.kind = choice(c, "potential", {"quartic", "harmonic"}) == "harmonic" ? continuum::PotentialKind::harmonic
                                                                          : continuum::PotentialKind::quartic;
  p.m = c.real("mass");
  p.omega0 = c.real("omega0");
  p.omega = c.real("drive_frequency");
  p.phi = c.real("drive_phase");
  p.S = c.real("drive_amplitude");
  p.Eb = c.real("barrier_energy");
  p.Omega = c.real("harmonic_frequency");
  p.t0 = c.real("phase_origin");
  p.validate();
  return p;
}

inline continuum::Integrator read_classical(const io::Config& c) {
  continuum::Integrator s{static_cast<int>(int_in(c, "classical_order", 2, 4)),
                          static_cast<int>(int_in(c, "classical_steps", 1, 1 << 20))};
  s.validate();
  return s;
}

inline void declare_grid(io::Config& c) {
  c.declare("grid_n", "1024")
      .declare("box_length", "120")
      .declare("hbar", "1.5")
      .declare("quantum_order", "2")
      .declare("quantum_steps", "512");
}

inline continuum::PositionGrid read_grid(const io::Config& c) {
  continuum::PositionGrid g{static_cast<Eigen::Index>(int_in(c, "grid_n", 4, 8192)), c.real("box_length"),
                            c.real("hbar")};
  g.validate();
  return g;
}

inline continuum::QuantumScheme read_quantum(const io::Config& c) {
  continuum::QuantumScheme s{static_cast<int>(int_in(c, "quantum_order", 2, 4)),
                             static_cast<int>(int_in(c, "quantum_steps", 1, 1 << 20))};
  s.validate();
  return s;
}

inline void declare_window(io::Config& c) {
  c.declare("q_min", "20").declare("q_max", "60").declare("p_min", "-20").declare("p_max", "20").declare(
      "newton_grid", "41");
}

inline continuum::PhaseWindow read_window(const io::Config& c) {
  continuum::PhaseWindow w{c.real("q_min"), c.real("q_max"), c.real("p_min"), c.real("p_max")};
  w.validate();
  return w;
}

/// Settings shared by every command that searches the window for periodic points.
inline continuum::ScarSettings read_search(const io::Config& c, const RunOptions& opt) {
  continuum::ScarSettings s;
  s.params = read_params(c);
  s.classical = read_classical(c);
  s.window = read_window(c);
  s.newton_grid = static_cast<int>(int_in(c, "newton_grid", 2, 1000));
  s.threads = opt.threads;
  return s;
}

inline void write_periodic_csv(std::ostream& o, const continuum::DrivenQuarticParams& prm,
                               const continuum::Integrator& scheme,
                               const std::vector<continuum::PeriodicPointRecord>& records) {
  o << "period,q,p,trace_monodromy,stability,primitive_period,residual,weight\n";
  for (const auto& r : records) {
    const int prim = continuum::primitive_periods(prm, scheme, r);
    const double det = (r.monodromy - Eigen::Matrix2d::Identity()).determinant();
    const std::string weight =
        std::abs(det) < 1e-9 ? "marginal"
                             : format_real(analysis::orbit_weight(r.monodromy, prim, analysis::WeightKind::map));
    o << r.periods << ',' << format_real(r.point.q) << ',' << format_real(r.point.p) << ','
      << format_real(r.monodromy.trace()) << ',' << continuum::to_string(r.kind) << ',' << prim << ','
      << format_real(r.residual) << ',' << weight << '\n';
  }
}

}  // namespace detail

// ---- cat-scars -------------------------------------------------------------

inline void declare_cat_scars(io::Config& c) {
  detail::declare_cat(c);
  c.declare("periods", "1,3")
      .declare("midpoints", "true")
      .declare("match_tolerance", "1")
      .declare("color_limit", "0")
      .declare("tolerance", "1e-8");
}

inline void run_cat_scars(const io::Config& c, const RunOptions& opt, std::ostream& log) {
  using detail::format_real;
  const auto map = detail::read_cat(c);
  const auto dim = static_cast<Eigen::Index>(detail::int_in(c, "dimension", 2, 4096));
  const auto periods = detail::int_list(c, "periods", 0, 64);
  const bool midpoints = c.boolean("midpoints");
  const double match_tol = c.real("match_tolerance");
  const double limit = c.real("color_limit");
  const double tol = c.real("tolerance");
  require(match_tol >= 0.0, "config: 'match_tolerance' must be non-negative");
  require(tol > 0.0, "config: 'tolerance' must be positive");

  const auto u = torus::quantize_cat(map, dim);
  const double unitarity = torus::unitarity_residual(u.unitary);
  const io::OutputDir out(opt.out);
  std::string failure;
  for (int n : periods) {
    const auto field = torus::diagonal_wigner_field(torus::discrete_weyl_symbol(u, n));
    const double trace = torus::trace_field(field);
    const double direct = torus::trace_power_squared(u, n);
    const double residual = weyl::relative_residual(trace, direct);
    auto meta = detail::base_metadata("cat-scars", c, opt);
    meta.insert(meta.end(), {{"n", std::to_string(n)},
                             {"trace", format_real(trace)},
                             {"trace_direct", format_real(direct)},
                             {"identity_residual", format_real(residual)},
                             {"imag_residual", format_real(field.imag_residual)},
                             {"unitarity_residual", format_real(unitarity)},
                             {"tolerance", format_real(tol)},
                             {"unitarity_tolerance", "1e-10"}});
    std::string peaks;
    if (n >= 1) {
      const auto set = torus::enumerate_periodic_points(map, n);
      const bool with_mid = midpoints && set.points.size() <= torus::max_catalog_points;
      torus::MidpointCatalog catalog;
      if (with_mid) catalog = torus::build_midpoint_catalog(set);
      const auto report = torus::peak_match(field, set, with_mid ? &catalog : nullptr, match_tol);
      const double pair_total = torus::pair_contribution_total(map, n);
      meta.insert(meta.end(),
                  {{"periodic_points", std::to_string(set.points.size())},
                   {"classical_pair_total", format_real(pair_total)},
                   {"classical_pair_residual", format_real(weyl::relative_residual(trace, pair_total))},
                   {"point_hit_rate", format_real(torus::PeakMatchReport::hit_rate(report.points))},
                   {"midpoint_hit_rate",
                    with_mid ? format_real(torus::PeakMatchReport::hit_rate(report.midpoints)) : "skipped"},
                   {"match_tolerance_pixels", format_real(match_tol)}});
      out.write("markers_n" + std::to_string(n) + ".csv",
                [&](std::ostream& o) { torus::write_points_csv(o, set, with_mid ? &catalog : nullptr); });
      peaks = " points=" + std::to_string(set.points.size()) +
              " hit_rate=" + format_real(torus::PeakMatchReport::hit_rate(report.points));
    }
    out.write_field("diagonal_n" + std::to_string(n), field.field, meta, limit);
    log << "cat-scars n=" << n << " trace=" << format_real(trace) << " identity_residual=" << format_real(residual)
        << peaks << '\n';
    if (!(residual < tol) || !(field.imag_residual < tol))
      failure = "cat-scars: trace identity or reality check failed at n = " + std::to_string(n);
  }
  if (!(unitarity < 1e-10)) failure = "cat-scars: unitarity residual above 1e-10";
  if (!failure.empty()) throw numerical_error(failure);
}

// ---- oscillator-scars ------------------------------------------------------

inline void declare_oscillator_scars(io::Config& c) {
  detail::declare_oscillator(c);
  detail::declare_grid(c);
  detail::declare_window(c);
  c.declare("periods", "1")
      .declare("filter_cut", "0")
      .declare("filter_width", "10")
      .declare("liouville_cut", "0")
      .declare("liouville_width", "10")
      .declare("eps", "0.25")
      .declare("chords", "open")
      .declare("top_fraction", "0.1")
      .declare("blur", "2")
      .declare("marker_radius", "1")
      .declare("color_limit", "0")
      .declare("tolerance", "1e-8")
      .declare("quadratic_tolerance", "1e-2")
      .declare("section_seeds", "0")
      .declare("section_periods", "200")
      .declare("quasienergies", "false");
}

inline void run_oscillator_scars(const io::Config& c, const RunOptions& opt, std::ostream& log) {
  using detail::format_real;
  continuum::ScarSettings s = detail::read_search(c, opt);
  s.grid = detail::read_grid(c);
  s.quantum = detail::read_quantum(c);
  s.periods = detail::int_list(c, "periods", 0, 64);
  s.filter = {c.real("filter_cut"), c.real("filter_width")};
  s.liouville_weight = {c.real("liouville_cut"), c.real("liouville_width")};
  s.eps = c.real("eps");
  s.chords = detail::choice(c, "chords", {"open", "periodic"}) == "open" ? weyl::ChordTopology::open
                                                                        : weyl::ChordTopology::periodic;
  s.top_fraction = c.real("top_fraction");
  s.blur = c.real("blur");
  s.marker_radius = static_cast<int>(detail::int_in(c, "marker_radius", 0, 10));
  s.tolerance = c.real("tolerance");
  require(s.tolerance > 0.0, "config: 'tolerance' must be positive");
  const double limit = c.real("color_limit");
  const double quad_tol = c.real("quadratic_tolerance");
  const auto section_seeds = static_cast<int>(detail::int_in(c, "section_seeds", 0, 100000));
  const auto section_periods = static_cast<int>(detail::int_in(c, "section_periods", 0, 1000000));
  const bool quasi = c.boolean("quasienergies");
  const bool harmonic = s.params.kind == continuum::PotentialKind::harmonic;
  s.validate();

  const auto run = continuum::run_scars(s);
  const io::OutputDir out(opt.out);
  std::string failure;
  for (const auto& panel : run.panels) {
    const std::string tag = "_n" + std::to_string(panel.n);
    auto meta = detail::base_metadata("oscillator-scars", c, opt);
    meta.insert(meta.end(), {{"n", std::to_string(panel.n)},
                             {"unitarity_residual", format_real(run.unitarity)},
                             {"trace", format_real(panel.trace)},
                             {"identity_residual", format_real(panel.trace_residual)},
                             {"imag_residual", format_real(panel.imag_residual)},
                             {"tolerance", format_real(s.tolerance)},
                             {"median_abs", format_real(panel.median_abs)},
                             {"jaccard_top_fraction", format_real(panel.jaccard)},
                             {"normalized_l1", format_real(panel.l1)},
                             {"periodic_points", std::to_string(panel.markers.size())},
                             {"min_marker_contrast",
                              panel.markers.empty() ? "none" : format_real(panel.min_contrast())}});
    if (harmonic) meta.emplace_back("quadratic_tolerance", format_real(quad_tol));
    auto qmeta = meta;
    qmeta.emplace_back("field", "diagonal_wigner");
    auto cmeta = meta;
    cmeta.emplace_back("field", "liouville");
    out.write_field("quantum" + tag, panel.quantum, qmeta, limit);
    out.write_field("classical" + tag, panel.classical, cmeta, 0.0);
    out.write("markers" + tag + ".csv", [&](std::ostream& o) {
      o << "kind,period,q,p,trace_monodromy,stability,field_value,contrast\n";
      for (const auto& m : panel.markers)
        o << "point," << panel.n << ',' << format_real(m.record.point.q) << ',' << format_real(m.record.point.p)
          << ',' << format_real(m.record.monodromy.trace()) << ',' << continuum::to_string(m.record.kind) << ','
          << format_real(m.field_value) << ',' << format_real(m.field_value / panel.median_abs) << '\n';
      for (const auto& m : panel.midpoints) {
        const double v = continuum::value_near(panel.quantum, m.q, m.p, s.marker_radius);
        o << "midpoint," << panel.n << ',' << format_real(m.q) << ',' << format_real(m.p) << ",,,"
          << format_real(v) << ',' << format_real(v / panel.median_abs) << '\n';
      }
    });
    log << "oscillator-scars n=" << panel.n << " trace=" << format_real(panel.trace)
        << " identity_residual=" << format_real(panel.trace_residual) << " jaccard=" << format_real(panel.jaccard)
        << " l1=" << format_real(panel.l1) << " points=" << panel.markers.size();
    if (!panel.markers.empty()) log << " min_contrast=" << format_real(panel.min_contrast());
    log << '\n';
    if (harmonic && panel.n > 0) {
      log << "quadratic-limit discrepancy n=" << panel.n << ": " << format_real(panel.l1) << " (tolerance "
          << format_real(quad_tol) << ")\n";
      if (!(panel.l1 < quad_tol))
        failure = "oscillator-scars: quadratic-limit discrepancy above tolerance at n = " + std::to_string(panel.n);
    }
  }
  if (section_seeds > 0) {
    std::vector<continuum::PhasePoint> seeds;
    for (int i = 0; i < section_seeds; ++i) {
      const double f = section_seeds == 1 ? 0.5 : static_cast<double>(i) / (section_seeds - 1);
      seeds.push_back({0.0, s.window.q_min + f * (s.window.q_max - s.window.q_min), 0.0});
    }
    const auto cloud = continuum::stroboscopic_section(s.params, s.classical, seeds, section_periods, s.threads);
    out.write("section.csv", [&](std::ostream& o) {
      o << "period,q,p\n";
      for (const auto& r : cloud.points)
        o << static_cast<long long>(r.t) << ',' << format_real(r.q) << ',' << format_real(r.p) << '\n';
    });
    log << "section points=" << cloud.points.size() << " dropped_seeds=" << cloud.dropped << '\n';
  }
  if (quasi) {
    const auto theta = continuum::eigenphases(run.floquet);
    out.write("quasienergies.csv", [&](std::ostream& o) {
      o << "quasienergy\n";
      for (double t : theta) o << format_real(t) << '\n';
    });
  }
  if (!failure.empty()) throw numerical_error(failure);
}

// ---- form-factor -----------------------------------------------------------

inline void declare_form_factor(io::Config& c) {
  c.declare("system", "cat");
  detail::declare_cat(c);
  detail::declare_oscillator(c);
  detail::declare_grid(c);
  c.declare("n_min", "0")
      .declare("n_max", "6")
      .declare("beta", "2")
      .declare("smoothing", "0")
      .declare("tolerance", "1e-8")
      .declare("return_energy_min", "-150")
      .declare("return_energy_max", "0")
      .declare("return_eps", "0.5")
      .declare("return_samples", "20000");
}

inline void run_form_factor(const io::Config& c, const RunOptions& opt, std::ostream& log) {
  using detail::format_real;
  const bool cat = detail::choice(c, "system", {"cat", "oscillator"}) == "cat";
  const auto n_min = static_cast<int>(detail::int_in(c, "n_min", 0, 100000));
  const auto n_max = static_cast<int>(detail::int_in(c, "n_max", n_min, 100000));
  const auto beta = static_cast<int>(detail::int_in(c, "beta", 1, 4));
  const auto smoothing = static_cast<int>(detail::int_in(c, "smoothing", 0, 100000));
  const double tol = c.real("tolerance");
  require(beta != 3, "config: 'beta' must be 1, 2 or 4");
  require(tol > 0.0, "config: 'tolerance' must be positive");

  std::vector<double> traces, p_cl;
  analysis::SpectralSeries series;
  series.beta = beta;
  double unitarity = 0.0;
  if (cat) {
    const auto map = detail::read_cat(c);
    const auto dim = static_cast<Eigen::Index>(detail::int_in(c, "dimension", 2, 4096));
    require(n_max <= 64, "config: cat-map traces are limited to n_max <= 64");
    const auto u = torus::quantize_cat(map, dim);
    unitarity = torus::unitarity_residual(u.unitary);
    series.phases = continuum::eigenphases(u.unitary);
    for (int n = n_min; n <= n_max; ++n) {
      traces.push_back(torus::trace_field(torus::diagonal_wigner_field(torus::discrete_weyl_symbol(u, n))));
      p_cl.push_back(n == 0 ? 0.0 : torus::classical_return_probability_map(map, n));
    }
  } else {
    const auto prm = detail::read_params(c);
    const auto classical = detail::read_classical(c);
    const auto grid = detail::read_grid(c);
    const auto quantum = detail::read_quantum(c);
    const double e_lo = c.real("return_energy_min"), e_hi = c.real("return_energy_max");
    const double eps = c.real("return_eps");
    const auto samples = static_cast<std::size_t>(detail::int_in(c, "return_samples", 1, 100000000));
    require(n_max <= 256, "config: Floquet powers are limited to n_max <= 256");
    const auto op = continuum::build_floquet(prm, grid, quantum, opt.threads, tol);
    unitarity = op.unitarity;
    series.phases = continuum::eigenphases(op.matrix);
    Eigen::MatrixXcd kn = Eigen::MatrixXcd::Identity(grid.n, grid.n);
    for (int n = 0; n < n_min; ++n) kn = op.matrix * kn;
    for (int n = n_min; n <= n_max; ++n) {
      if (n > n_min) kn = op.matrix * kn;
      traces.push_back(continuum::continuum_diagonal_field(kn, grid, tol).field.values.sum());
      p_cl.push_back(n == 0 ? 0.0
                            : continuum::classical_return_probability(prm, classical, e_lo, e_hi, n * prm.period(),
                                                                       eps, samples, opt.seed + static_cast<std::uint64_t>(n),
                                                                       opt.threads)
                                  .value);
    }
  }
  const auto rows = analysis::diagonal_approximation_report(series, p_cl, n_min, beta, smoothing);
  const io::OutputDir out(opt.out);
  out.write("form_factor.csv", [&](std::ostream& o) { analysis::write_report_csv(o, rows); });
  auto meta = detail::base_metadata("form-factor", c, opt);
  meta.emplace_back("unitarity_residual", format_real(unitarity));
  meta.emplace_back("tolerance", format_real(tol));
  meta.emplace_back("beta", std::to_string(beta));
  double worst = 0.0;
  for (int n = n_min; n <= n_max; ++n) {
    const double p = traces[static_cast<std::size_t>(n - n_min)];
    const double r = analysis::identity_check(p, series, n);
    worst = std::max(worst, r);
    meta.emplace_back("diagonal_trace_n" + std::to_string(n), format_real(p));
    meta.emplace_back("K_n" + std::to_string(n), format_real(analysis::form_factor(series, n)));
    meta.emplace_back("identity_residual_n" + std::to_string(n), format_real(r));
    log << "form-factor n=" << n << " K=" << format_real(analysis::form_factor(series, n))
        << " identity_residual=" << format_real(r) << '\n';
  }
  meta.emplace_back("identity_residual_max", format_real(worst));
  out.write("form_factor.txt", [&](std::ostream& o) { io::write_sidecar(o, meta); });
  out.write("quasienergies.csv", [&](std::ostream& o) {
    o << "quasienergy\n";
    for (double t : series.phases) o << format_real(t) << '\n';
  });
  if (!(worst < tol)) throw numerical_error("form-factor: identity residual above tolerance");
}

// ---- midpoint-surface -------------------------------------------------------

inline void declare_midpoint_surface(io::Config& c) {
  detail::declare_oscillator(c);
  c.declare("curve", "circle")
      .declare("samples", "120")
      .declare("radius", "1")
      .declare("lobe", "0.2")
      .declare("orbit_q", "38.8")
      .declare("orbit_p", "0.6")
      .declare("orbit_periods", "1");
}

inline void run_midpoint_surface(const io::Config& c, const RunOptions& opt, std::ostream& log) {
  using detail::format_real;
  const std::string curve = detail::choice(c, "curve", {"circle", "lobed", "knot", "orbit"});
  const auto m = static_cast<std::size_t>(detail::int_in(c, "samples", 2, 2000));
  const double radius = c.real("radius");
  const double lobe = c.real("lobe");
  require(radius > 0.0, "config: 'radius' must be positive");

  std::vector<continuum::Vec<3>> pts;
  io::Metadata extra;
  if (curve == "orbit") {
    const auto prm = detail::read_params(c);
    const auto scheme = detail::read_classical(c);
    const auto k = static_cast<int>(detail::int_in(c, "orbit_periods", 1, 64));
    const auto found = continuum::find_periodic_points(
        prm, scheme, {{c.real("orbit_p"), c.real("orbit_q"), prm.t0}}, k, {}, 1);
    if (found.records.empty()) throw numerical_error("midpoint-surface: Newton search did not converge to an orbit");
    const auto& rec = found.records.front();
    const double span = k * prm.period();
    const auto inner = static_cast<int>(
        std::max<std::size_t>(1, (static_cast<std::size_t>(scheme.steps_per_period) * k + m - 1) / m));
    continuum::PhasePoint s = rec.point;
    for (std::size_t i = 0; i < m; ++i) {
      pts.push_back({s.q, s.p, 0.0});
      const double t_next = prm.t0 + span * static_cast<double>(i + 1) / static_cast<double>(m);
      s = continuum::integrate(prm, s, t_next, (t_next - s.t) / inner, scheme.order);
    }
    extra = {{"orbit_q", format_real(rec.point.q)},
             {"orbit_p", format_real(rec.point.p)},
             {"orbit_stability", continuum::to_string(rec.kind)},
             {"orbit_residual", format_real(rec.residual)}};
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
      if (curve == "circle")
        pts.push_back({radius * std::cos(t), radius * std::sin(t), 0.0});
      else if (curve == "lobed")
        pts.push_back({radius * (std::cos(t) + lobe * std::cos(2 * t)), radius * (std::sin(t) - lobe * std::sin(2 * t)),
                       0.0});
      else  // trefoil knot: a non-planar closed curve
        pts.push_back({radius * (std::sin(t) + 2 * std::sin(2 * t)), radius * (std::cos(t) - 2 * std::cos(2 * t)),
                       -radius * std::sin(3 * t)});
    }
  }
  const auto surface = continuum::midpoint_surface<3>(pts);
  double cx = 0.0, cy = 0.0, extent = 0.0;
  for (const auto& p : surface.orbit) {
    cx += p[0] / static_cast<double>(surface.samples());
    cy += p[1] / static_cast<double>(surface.samples());
  }
  for (const auto& p : surface.orbit) extent = std::max(extent, std::hypot(p[0] - cx, p[1] - cy));
  // Probe slightly off the centroid so the count never lands on a mesh edge.
  const int leaves = continuum::leaf_count(surface, cx + 1e-3 * extent, cy + 0.5e-3 * extent);

  const io::OutputDir out(opt.out);
  out.write("surface.obj", [&](std::ostream& o) { continuum::write_obj(o, surface); });
  out.write("orbit.csv", [&](std::ostream& o) {
    o << "index,x,y,z\n";
    for (std::size_t i = 0; i < surface.orbit.size(); ++i)
      o << i << ',' << format_real(surface.orbit[i][0]) << ',' << format_real(surface.orbit[i][1]) << ','
        << format_real(surface.orbit[i][2]) << '\n';
  });
  auto meta = detail::base_metadata("midpoint-surface", c, opt);
  meta.insert(meta.end(), extra.begin(), extra.end());
  meta.insert(meta.end(), {{"orbit_samples", std::to_string(surface.samples())},
                           {"vertices", std::to_string(surface.vertices.size())},
                           {"faces", std::to_string(surface.faces.size())},
                           {"center_leaves", std::to_string(leaves)}});
  out.write("surface.txt", [&](std::ostream& o) { io::write_sidecar(o, meta); });
  log << "midpoint-surface curve=" << curve << " vertices=" << surface.vertices.size()
      << " faces=" << surface.faces.size() << " center_leaves=" << leaves << '\n';
}

// ---- poincare ----------------------------------------------------------------

inline void declare_poincare(io::Config& c) {
  detail::declare_oscillator(c);
  c.declare("seed_q_min", "-50")
      .declare("seed_q_max", "50")
      .declare("seed_count", "21")
      .declare("seed_p", "0")
      .declare("random_seeds", "0")
      .declare("random_q_min", "-55")
      .declare("random_q_max", "55")
      .declare("random_p_min", "-20")
      .declare("random_p_max", "20")
      .declare("section_periods", "200")
      .declare("escape_radius", "1e6");
}

inline void run_poincare(const io::Config& c, const RunOptions& opt, std::ostream& log) {
  using detail::format_real;
  const auto prm = detail::read_params(c);
  const auto scheme = detail::read_classical(c);
  const auto count = static_cast<int>(detail::int_in(c, "seed_count", 0, 100000));
  const auto random = static_cast<int>(detail::int_in(c, "random_seeds", 0, 100000));
  const auto periods = static_cast<int>(detail::int_in(c, "section_periods", 0, 1000000));
  const double q0 = c.real("seed_q_min"), q1 = c.real("seed_q_max"), p = c.real("seed_p");
  const double rq0 = c.real("random_q_min"), rq1 = c.real("random_q_max");
  const double rp0 = c.real("random_p_min"), rp1 = c.real("random_p_max");
  const double escape = c.real("escape_radius");
  require(count + random > 0, "config: at least one section seed is required");
  require(rq0 <= rq1 && rp0 <= rp1, "config: random seed box bounds must satisfy min <= max");
  require(escape > 0.0, "config: 'escape_radius' must be positive");

  std::vector<continuum::PhasePoint> seeds;
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
    seeds.push_back({p, q0 + f * (q1 - q0), prm.t0});
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < random; ++i) {
    const double uq = unit(rng), up = unit(rng);
    seeds.push_back({rp0 + up * (rp1 - rp0), rq0 + uq * (rq1 - rq0), prm.t0});
  }
  const auto cloud = continuum::stroboscopic_section(prm, scheme, seeds, periods, opt.threads, escape);
  const io::OutputDir out(opt.out);
  out.write("section.csv", [&](std::ostream& o) {
    o << "trajectory,period,q,p\n";
    long long traj = -1;
    for (const auto& r : cloud.points) {
      if (r.t == 0.0) ++traj;
      o << traj << ',' << static_cast<long long>(r.t) << ',' << format_real(r.q) << ',' << format_real(r.p) << '\n';
    }
  });
  auto meta = detail::base_metadata("poincare", c, opt);
  meta.insert(meta.end(), {{"seeds", std::to_string(seeds.size())},
                           {"points", std::to_string(cloud.points.size())},
                           {"dropped_seeds", std::to_string(cloud.dropped)}});
  out.write("section.txt", [&](std::ostream& o) { io::write_sidecar(o, meta); });
  log << "poincare seeds=" << seeds.size() << " points=" << cloud.points.size() << " dropped=" << cloud.dropped
      << '\n';
}

// ---- periodic-points -----------------------------------------------------------

inline void declare_periodic_points(io::Config& c) {
  c.declare("system", "cat");
  detail::declare_cat(c);
  detail::declare_oscillator(c);
  detail::declare_window(c);
  c.declare("periods", "1,2,3").declare("midpoints", "true");
}

inline void run_periodic_points(const io::Config& c, const RunOptions& opt, std::ostream& log) {
  using detail::format_real;
  const bool cat = detail::choice(c, "system", {"cat", "oscillator"}) == "cat";
  const auto periods = detail::int_list(c, "periods", 1, cat ? 64 : 16);
  const bool midpoints = c.boolean("midpoints");
  const io::OutputDir out(opt.out);
  if (cat) {
    const auto map = detail::read_cat(c);
    for (int n : periods) {
      const auto set = torus::enumerate_periodic_points(map, n);
      const bool with_mid = midpoints && set.points.size() <= torus::max_catalog_points;
      torus::MidpointCatalog catalog;
      if (with_mid) catalog = torus::build_midpoint_catalog(set);
      out.write("points_n" + std::to_string(n) + ".csv",
                [&](std::ostream& o) { torus::write_points_csv(o, set, with_mid ? &catalog : nullptr); });
      log << "periodic-points n=" << n << " points=" << set.points.size() << " orbits=" << set.orbits.size()
          << " pair_total=" << format_real(torus::pair_contribution_total(map, n)) << '\n';
    }
    return;
  }
  const auto s = detail::read_search(c, opt);
  for (int n : periods) {
    const auto found = continuum::window_periodic_points(s, n);
    out.write("points_n" + std::to_string(n) + ".csv",
              [&](std::ostream& o) { detail::write_periodic_csv(o, s.params, s.classical, found.records); });
    if (midpoints) {
      out.write("midpoints_n" + std::to_string(n) + ".csv", [&](std::ostream& o) {
        o << "q,p,first,second\n";
        for (std::size_t i = 0; i < found.records.size(); ++i)
          for (std::size_t j = i + 1; j < found.records.size(); ++j) {
            const auto& a = found.records[i].point;
            const auto& b = found.records[j].point;
            o << format_real(0.5 * (a.q + b.q)) << ',' << format_real(0.5 * (a.p + b.p)) << ',' << i << ',' << j
              << '\n';
          }
      });
    }
    log << "periodic-points n=" << n << " points=" << found.records.size() << " discarded=" << found.discarded
        << '\n';
  }
}

inline const std::vector<Command>& commands() {
  static const std::vector<Command> list{
      {"cat-scars", "Diagonal Wigner propagator of the quantized cat map with periodic-point markers",
       declare_cat_scars, run_cat_scars},
      {"oscillator-scars", "Diagonal Wigner and Liouville propagators of the driven oscillator",
       declare_oscillator_scars, run_oscillator_scars},
      {"form-factor", "Spectral form factor, trace identity and diagonal-approximation table", declare_form_factor,
       run_form_factor},
      {"midpoint-surface", "Midpoint surface mesh of a closed curve or periodic orbit", declare_midpoint_surface,
       run_midpoint_surface},
      {"poincare", "Stroboscopic section of the driven oscillator", declare_poincare, run_poincare},
      {"periodic-points", "Periodic points of the cat map or the driven oscillator", declare_periodic_points,
       run_periodic_points},
  };
  return list;
}

}  // namespace scars::cli

#pragma once

// Time-domain scar pipeline for the driven oscillator: diagonal Wigner
// propagators of the (energy-filtered) Floquet powers next to the matching
// Liouville fields, periodic-point markers and their midpoints inside a
// phase-space window, and the structural comparison measures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scars/continuum/classical.hpp"
#include "scars/continuum/quantum.hpp"
#include "scars/core/errors.hpp"
#include "scars/core/field.hpp"
#include "scars/weyl/doubled_grid.hpp"

namespace scars::continuum {

struct PhaseWindow {
  double q_min = 20.0, q_max = 60.0;
  double p_min = -20.0, p_max = 20.0;

  void validate() const {
    require(q_min < q_max && p_min < p_max, "window: bounds must satisfy min < max");
  }
  [[nodiscard]] bool contains(double q, double p) const {
    return q >= q_min && q <= q_max && p >= p_min && p <= p_max;
  }
};

struct ScarSettings {
  DrivenQuarticParams params;
  PositionGrid grid;
  QuantumScheme quantum;
  Integrator classical{4, 512};
  std::vector<int> periods{1, 2, 3};
  EnergyWeight filter{0.0, 10.0};          // quantum energy window; width <= 0 disables
  EnergyWeight liouville_weight{0.0, 10.0};  // classical counterpart
  double eps = 0.25;                       // Liouville kernel width
  PhaseWindow window;
  weyl::ChordTopology chords = weyl::ChordTopology::open;
  double top_fraction = 0.1;
  double blur = 2.0;           // smoothing width for the L1 comparison
  int newton_grid = 41;        // Newton seeds per window axis
  int marker_radius = 1;       // pixels searched around a marker
  double tolerance = 1e-8;
  unsigned threads = 1;

  void validate() const {
    params.validate();
    grid.validate();
    quantum.validate();
    classical.validate();
    window.validate();
    grid.check_nyquist(std::max(std::abs(window.p_min), std::abs(window.p_max)));
    require(std::abs(window.q_min) <= 0.5 * grid.length && std::abs(window.q_max) <= 0.5 * grid.length,
            "window: position range must lie inside the box");
    require(!periods.empty(), "scars: at least one period count is required");
    for (int n : periods) require(n >= 0 && n <= 64, "scars: period counts must lie in [0, 64]");
    require(eps > 0.0, "scars: eps must be positive");
    require(top_fraction > 0.0 && top_fraction < 1.0, "scars: top fraction must lie in (0, 1)");
    require(blur >= 0.0, "scars: blur width must be non-negative");
    require(newton_grid >= 2 && newton_grid <= 1000, "scars: newton grid must lie in [2, 1000]");
    require(marker_radius >= 0 && marker_radius <= 10, "scars: marker radius must lie in [0, 10]");
  }
};

/// Largest field value within `radius` nodes of the node nearest to (q, p).
[[nodiscard]] inline double value_near(const RealField& f, double q, double p, int radius) {
  const Eigen::Index i0 = f.q.nearest(q), j0 = f.p.nearest(p);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = i0 - radius; i <= i0 + radius; ++i)
    for (Eigen::Index j = j0 - radius; j <= j0 + radius; ++j)
      if (i >= 0 && i < f.q.size && j >= 0 && j < f.p.size) best = std::max(best, f.values(i, j));
  return best;
}

/// Liouville fields w(E) k_eps(|Phi^n(r) - r|) for n = 1..n_max, obtained by
/// composing the one-period stroboscopic map node by node.
[[nodiscard]] inline std::vector<RealField> liouville_series(const DrivenQuarticParams& prm, const Integrator& scheme,
                                                             const Axis& q_axis, const Axis& p_axis, int n_max,
                                                             double eps, const EnergyWeight& weight,
                                                             unsigned threads = 1) {
  prm.validate();
  scheme.validate();
  require(n_max >= 0, "liouville: period count must be non-negative");
  require(eps > 0.0, "liouville: eps must be positive");
  std::vector<RealField> out(static_cast<std::size_t>(n_max) + 1,
                             RealField{q_axis, p_axis, Eigen::MatrixXd(q_axis.size, p_axis.size)});
  const double dt = prm.period() / scheme.steps_per_period;
  parallel_for(static_cast<std::size_t>(q_axis.size), threads, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    const double q = q_axis.coord(i);
    for (Eigen::Index j = 0; j < p_axis.size; ++j) {
      const double p = p_axis.coord(j);
      const double w = fermi_weight(prm.static_energy(p, q), weight.cut, weight.width);
      PhasePoint r{p, q, prm.t0};
      out[0].values(i, j) = w * gaussian_kernel(0.0, eps);
      for (int n = 1; n <= n_max; ++n) {
        r = integrate(prm, {r.p, r.q, prm.t0}, prm.t0 + prm.period(), dt, scheme.order);
        const double d2 = (r.p - p) * (r.p - p) + (r.q - q) * (r.q - q);
        out[static_cast<std::size_t>(n)].values(i, j) = w * gaussian_kernel(d2, eps);
      }
    }
  });
  return out;
}

struct ScarMarker {
  PeriodicPointRecord record;
  double field_value = 0.0;  // largest quantum field value near the point
};

struct MidpointMarker {
  double q = 0.0, p = 0.0;
  std::size_t first = 0, second = 0;  // indices into the period's marker list
};

struct ScarPanel {
  int n = 0;
  RealField quantum;    // windowed diagonal Wigner propagator
  RealField classical;  // windowed Liouville field on the same nodes
  double trace = 0.0;             // full-grid field sum
  double trace_residual = 0.0;    // against |tr K^n|^2
  double imag_residual = 0.0;
  double median_abs = 0.0;        // median |quantum| in the window
  double jaccard = 0.0;           // top-fraction supports
  double l1 = 0.0;                // normalized L1 after smoothing
  std::vector<ScarMarker> markers;          // Newton-verified points in the window
  std::vector<MidpointMarker> midpoints;    // pair midpoints in the window
  std::size_t newton_discarded = 0;
  [[nodiscard]] double min_contrast() const {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& m : markers) c = std::min(c, m.field_value / median_abs);
    return c;
  }
};

struct ScarRun {
  Eigen::MatrixXcd floquet;  // one-period operator (identity when only n = 0 is requested)
  double unitarity = 0.0;
  std::vector<ScarPanel> panels;
};

/// Newton search for period-n points seeded on a grid over the window; only
/// records lying inside the window are kept.
[[nodiscard]] inline PeriodicSearch window_periodic_points(const ScarSettings& s, int n) {
  const auto seeds = guess_grid(s.window.q_min, s.window.q_max, s.window.p_min, s.window.p_max,
                                s.newton_grid, s.newton_grid);
  PeriodicSearch found = find_periodic_points(s.params, s.classical, seeds, n, NewtonOptions{}, s.threads);
  PeriodicSearch kept;
  kept.discarded = found.discarded;
  for (auto& r : found.records) {
    if (s.window.contains(r.point.q, r.point.p))
      kept.records.push_back(std::move(r));
    else
      ++kept.discarded;
  }
  return kept;
}

[[nodiscard]] inline ScarRun run_scars(const ScarSettings& s) {
  s.validate();
  ScarRun run;
  const int n_max = *std::max_element(s.periods.begin(), s.periods.end());
  if (n_max > 0) {
    FloquetOperator op = build_floquet(s.params, s.grid, s.quantum, s.threads, s.tolerance);
    run.unitarity = op.unitarity;
    run.floquet = std::move(op.matrix);
  } else {
    run.floquet = Eigen::MatrixXcd::Identity(s.grid.n, s.grid.n);
  }

  const auto base_axes = RealField{s.grid.doubled_q_axis(), s.grid.doubled_p_axis(), Eigen::MatrixXd(1, 1)};
  RealField probe{base_axes.q, base_axes.p, Eigen::MatrixXd::Zero(base_axes.q.size, base_axes.p.size)};
  const RealField win = probe.window(s.window.q_min, s.window.q_max, s.window.p_min, s.window.p_max);
  const auto classical =
      liouville_series(s.params, s.classical, win.q, win.p, n_max, s.eps, s.liouville_weight, s.threads);

  Eigen::MatrixXcd kn = Eigen::MatrixXcd::Identity(s.grid.n, s.grid.n);
  int power = 0;
  std::vector<int> order = s.periods;
  std::sort(order.begin(), order.end());
  for (int n : order) {
    while (power < n) {
      kn = run.floquet * kn;
      ++power;
    }
    const Eigen::MatrixXcd filtered = energy_filter(kn, s.params, s.grid, s.filter);
    const ComplexField sym{s.grid.doubled_q_axis(), s.grid.doubled_p_axis(), weyl::symbol(filtered, s.chords)};
    auto g = weyl::diagonal_field(sym.values, s.chords);
    ScarPanel panel;
    panel.n = n;
    panel.trace = g.values.sum();
    panel.trace_residual = weyl::relative_residual(panel.trace, std::norm(filtered.trace()));
    panel.imag_residual = g.imag_residual;
    if (!(panel.trace_residual < s.tolerance))
      throw numerical_error("scars: trace identity residual above tolerance at n = " + std::to_string(n));
    if (!(panel.imag_residual < s.tolerance))
      throw numerical_error("scars: diagonal field is not real at n = " + std::to_string(n));
    const RealField full{sym.q, sym.p, std::move(g.values)};
    panel.quantum = full.window(s.window.q_min, s.window.q_max, s.window.p_min, s.window.p_max);
    panel.classical = classical[static_cast<std::size_t>(n)];
    panel.median_abs = median_abs(panel.quantum.values);
    panel.jaccard = top_fraction_jaccard(panel.quantum.values, panel.classical.values, s.top_fraction);
    const Eigen::MatrixXd a = s.blur > 0 ? gaussian_blur(panel.quantum, s.blur) : panel.quantum.values;
    const Eigen::MatrixXd b = s.blur > 0 ? gaussian_blur(panel.classical, s.blur) : panel.classical.values;
    panel.l1 = normalized_l1(a, b);

    if (n > 0) {
      const auto search = window_periodic_points(s, n);
      panel.newton_discarded = search.discarded;
      for (const auto& r : search.records)
        panel.markers.push_back({r, value_near(panel.quantum, r.point.q, r.point.p, s.marker_radius)});
      for (std::size_t i = 0; i < panel.markers.size(); ++i)
        for (std::size_t j = i + 1; j < panel.markers.size(); ++j) {
          const auto& a1 = panel.markers[i].record.point;
          const auto& a2 = panel.markers[j].record.point;
          const double q = 0.5 * (a1.q + a2.q), p = 0.5 * (a1.p + a2.p);
          if (s.window.contains(q, p)) panel.midpoints.push_back({q, p, i, j});
        }
    }
    run.panels.push_back(std::move(panel));
  }
  return run;
}

}  // namespace scars::continuum

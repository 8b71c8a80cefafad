#pragma once

// Classical stroboscopic dynamics of the driven oscillator: symplectic
// integration with exact discrete tangent maps, periodic-point search,
// Liouville diagonal fields and Monte Carlo return probabilities.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "scars/core/errors.hpp"
#include "scars/core/field.hpp"
#include "scars/core/parallel.hpp"
#include "scars/continuum/params.hpp"

namespace scars::continuum {

struct PhasePoint {
  double p = 0.0;
  double q = 0.0;
  double t = 0.0;
};

/// Splitting scheme: order 2 is one drift-kick-drift (Strang) step with the
/// drive at the step midpoint; order 4 composes three such steps (Yoshida).
struct Integrator {
  int order = 4;
  int steps_per_period = 2048;

  void validate() const {
    require(order == 2 || order == 4, "integrator: order must be 2 or 4");
    require(steps_per_period >= 1, "integrator: steps per period must be positive");
  }

  [[nodiscard]] std::vector<double> substeps() const {
    if (order == 2) return {1.0};
    const double c = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - c);
    return {w1, -c * w1, w1};
  }
};

namespace detail {

inline void require_finite(const PhasePoint& s) {
  if (!std::isfinite(s.p) || !std::isfinite(s.q)) throw numerical_error("integration produced a non-finite state");
}

/// Advances (p, q, t) by one step h; when `tangent` is non-null it is
/// left-multiplied by the exact Jacobian of the discrete step.
inline void step(const DrivenQuarticParams& prm, const std::vector<double>& weights, double h, PhasePoint& s,
                 Eigen::Matrix2d* tangent) {
  for (const double w : weights) {
    const double hs = w * h;
    const double half = 0.5 * hs / prm.m;
    s.q += half * s.p;
    const double force = prm.static_force(s.q) - prm.drive(s.t + 0.5 * hs);
    if (tangent != nullptr) {
      // Rows/cols ordered (p, q).
      Eigen::Matrix2d drift;
      drift << 1.0, 0.0, half, 1.0;
      Eigen::Matrix2d kick;
      kick << 1.0, prm.force_gradient(s.q) * hs, 0.0, 1.0;
      *tangent = drift * kick * drift * *tangent;
    }
    s.p += hs * force;
    s.q += half * s.p;
    s.t += hs;
  }
}

inline std::int64_t step_count(double span, double dt) {
  require(dt != 0.0 && std::isfinite(dt), "integrate: dt must be finite and non-zero");
  const double ratio = span / dt;
  require(ratio >= -1e-9, "integrate: dt must point from the start time towards t_end");
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  require(std::abs(ratio - static_cast<double>(n)) <= 1e-6, "integrate: dt must divide the integration interval");
  return n;
}

}  // namespace detail

/// State at t_end from `state` (which carries its own start time). A negative
/// dt integrates backwards in time.
[[nodiscard]] inline PhasePoint integrate(const DrivenQuarticParams& prm, PhasePoint state, double t_end, double dt,
                                          int order = 4) {
  Integrator scheme{order, 1};
  scheme.validate();
  const auto weights = scheme.substeps();
  const std::int64_t n = detail::step_count(t_end - state.t, dt);
  const double t_start = state.t;
  for (std::int64_t k = 0; k < n; ++k) {
    state.t = t_start + static_cast<double>(k) * dt;
    detail::step(prm, weights, dt, state, nullptr);
  }
  state.t = t_end;
  detail::require_finite(state);
  return state;
}

struct TangentResult {
  PhasePoint state;
  Eigen::Matrix2d monodromy = Eigen::Matrix2d::Identity();  // d(p, q)_end / d(p, q)_start
};

[[nodiscard]] inline TangentResult tangent_integrate(const DrivenQuarticParams& prm, PhasePoint state, double t_end,
                                                     double dt, int order = 4) {
  Integrator scheme{order, 1};
  scheme.validate();
  const auto weights = scheme.substeps();
  const std::int64_t n = detail::step_count(t_end - state.t, dt);
  TangentResult r;
  const double t_start = state.t;
  for (std::int64_t k = 0; k < n; ++k) {
    state.t = t_start + static_cast<double>(k) * dt;
    detail::step(prm, weights, dt, state, &r.monodromy);
  }
  state.t = t_end;
  detail::require_finite(state);
  r.state = state;
  return r;
}

/// The k-period stroboscopic map from the phase origin t0.
[[nodiscard]] inline PhasePoint stroboscopic_map(const DrivenQuarticParams& prm, const Integrator& scheme, double p,
                                                 double q, int periods = 1) {
  const double period = prm.period();
  const double dt = period / scheme.steps_per_period;
  return integrate(prm, {p, q, prm.t0}, prm.t0 + periods * period, dt, scheme.order);
}

struct SectionCloud {
  std::vector<PhasePoint> points;  // t holds the period index
  std::size_t dropped = 0;         // seeds whose trajectories diverged
};

/// Stroboscopic samples of each seed at t0 + k T for k = 0 .. n_periods.
[[nodiscard]] inline SectionCloud stroboscopic_section(const DrivenQuarticParams& prm, const Integrator& scheme,
                                                       const std::vector<PhasePoint>& seeds, int n_periods,
                                                       unsigned threads = 1, double escape_radius = 1e6) {
  prm.validate();
  scheme.validate();
  require(n_periods >= 0, "section: period count must be non-negative");
  const double dt = prm.period() / scheme.steps_per_period;
  std::vector<std::vector<PhasePoint>> per_seed(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    PhasePoint s{seeds[i].p, seeds[i].q, prm.t0};
    std::vector<PhasePoint> out{{s.p, s.q, 0.0}};
    try {
      for (int k = 1; k <= n_periods; ++k) {
        s = integrate(prm, s, prm.t0 + k * prm.period(), dt, scheme.order);
        if (std::hypot(s.p, s.q) > escape_radius) throw numerical_error("escaped");
        out.push_back({s.p, s.q, static_cast<double>(k)});
      }
    } catch (const numerical_error&) {
      out.clear();
    }
    per_seed[i] = std::move(out);
  });
  SectionCloud cloud;
  for (auto& v : per_seed) {
    if (v.empty()) ++cloud.dropped;
    cloud.points.insert(cloud.points.end(), v.begin(), v.end());
  }
  return cloud;
}

enum class StabilityKind { elliptic, hyperbolic, marginal };

inline const char* to_string(StabilityKind k) {
  switch (k) {
    case StabilityKind::elliptic: return "elliptic";
    case StabilityKind::hyperbolic: return "hyperbolic";
    default: return "marginal";
  }
}

[[nodiscard]] inline StabilityKind classify(const Eigen::Matrix2d& m, double margin = 1e-9) {
  const double tr = std::abs(m.trace());
  if (tr < 2.0 - margin) return StabilityKind::elliptic;
  if (tr > 2.0 + margin) return StabilityKind::hyperbolic;
  return StabilityKind::marginal;
}

struct PeriodicPointRecord {
  PhasePoint point;  // at t = t0
  int periods = 1;   // k, multiple of the drive period
  Eigen::Matrix2d monodromy = Eigen::Matrix2d::Identity();
  StabilityKind kind = StabilityKind::marginal;
  double residual = 0.0;
};

struct NewtonOptions {
  int max_iterations = 60;
  double tolerance = 1e-10;     // accepted |Phi_kT(r) - r|
  double dedup_radius = 1e-6;   // phase-space distance merging duplicate roots
  double max_step = 5.0;        // trust radius of one Newton step
};

struct PeriodicSearch {
  std::vector<PeriodicPointRecord> records;
  std::size_t discarded = 0;  // guesses that failed to converge
};

/// Damped Newton iteration on r -> Phi_kT(r) - r from every guess, with
/// backtracking on the residual norm; converged roots are deduplicated.
[[nodiscard]] inline PeriodicSearch find_periodic_points(const DrivenQuarticParams& prm, const Integrator& scheme,
                                                         const std::vector<PhasePoint>& guesses, int k,
                                                         const NewtonOptions& opt = {}, unsigned threads = 1) {
  prm.validate();
  scheme.validate();
  require(k >= 1, "periodic points: period multiple k must be positive");
  const double span = k * prm.period();
  const double dt = prm.period() / scheme.steps_per_period;

  auto evaluate = [&](double p, double q, Eigen::Vector2d& f, Eigen::Matrix2d* m) {
    if (m != nullptr) {
      const auto r = tangent_integrate(prm, {p, q, prm.t0}, prm.t0 + span, dt, scheme.order);
      *m = r.monodromy;
      f << r.state.p - p, r.state.q - q;
    } else {
      const auto s = integrate(prm, {p, q, prm.t0}, prm.t0 + span, dt, scheme.order);
      f << s.p - p, s.q - q;
    }
  };

  std::vector<std::vector<PeriodicPointRecord>> found(guesses.size());
  parallel_for(guesses.size(), threads, [&](std::size_t g) {
    try {
      Eigen::Vector2d x(guesses[g].p, guesses[g].q);
      Eigen::Vector2d f;
      Eigen::Matrix2d m;
      evaluate(x(0), x(1), f, &m);
      for (int it = 0; it < opt.max_iterations; ++it) {
        if (f.norm() < opt.tolerance) break;
        const Eigen::Matrix2d jac = m - Eigen::Matrix2d::Identity();
        if (std::abs(jac.determinant()) < 1e-14) return;
        Eigen::Vector2d dx = -jac.inverse() * f;
        if (dx.norm() > opt.max_step) dx *= opt.max_step / dx.norm();
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt, lambda *= 0.5) {
          Eigen::Vector2d ft;
          const Eigen::Vector2d xt = x + lambda * dx;
          evaluate(xt(0), xt(1), ft, nullptr);
          if (ft.norm() < f.norm() || ft.norm() < opt.tolerance) {
            x = xt;
            accepted = true;
            break;
          }
        }
        if (!accepted) return;
        evaluate(x(0), x(1), f, &m);
      }
      if (!(f.norm() < opt.tolerance)) return;
      PeriodicPointRecord rec;
      rec.point = {x(0), x(1), prm.t0};
      rec.periods = k;
      rec.monodromy = m;
      rec.kind = classify(m);
      rec.residual = f.norm();
      found[g].push_back(rec);
    } catch (const numerical_error&) {
    }
  });

  PeriodicSearch out;
  for (std::size_t g = 0; g < guesses.size(); ++g) {
    if (found[g].empty()) {
      ++out.discarded;
      continue;
    }
    const auto& rec = found[g].front();
    const bool duplicate = std::any_of(out.records.begin(), out.records.end(), [&](const PeriodicPointRecord& r) {
      return std::hypot(r.point.p - rec.point.p, r.point.q - rec.point.q) < opt.dedup_radius;
    });
    if (!duplicate) out.records.push_back(rec);
  }
  std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
    return a.point.q != b.point.q ? a.point.q < b.point.q : a.point.p < b.point.p;
  });
  return out;
}

/// Smallest j >= 1 dividing k with Phi_jT(r) = r within `tolerance`.
[[nodiscard]] inline int primitive_periods(const DrivenQuarticParams& prm, const Integrator& scheme,
                                           const PeriodicPointRecord& rec, double tolerance = 1e-7) {
  for (int j = 1; j < rec.periods; ++j) {
    if (rec.periods % j != 0) continue;
    const auto s = stroboscopic_map(prm, scheme, rec.point.p, rec.point.q, j);
    if (std::hypot(s.p - rec.point.p, s.q - rec.point.q) < tolerance) return j;
  }
  return rec.periods;
}

/// Regular grid of guesses covering a (q, p) rectangle.
[[nodiscard]] inline std::vector<PhasePoint> guess_grid(double q_min, double q_max, double p_min, double p_max,
                                                        int nq, int np) {
  require(nq >= 1 && np >= 1, "guess grid: counts must be positive");
  std::vector<PhasePoint> out;
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < np; ++j)
      out.push_back({np == 1 ? 0.5 * (p_min + p_max) : p_min + (p_max - p_min) * j / (np - 1),
                     nq == 1 ? 0.5 * (q_min + q_max) : q_min + (q_max - q_min) * i / (nq - 1), 0.0});
  return out;
}

/// Normalized plane Gaussian 1/(2 pi eps^2) exp(-d^2 / (2 eps^2)).
[[nodiscard]] inline double gaussian_kernel(double d2, double eps) {
  return std::exp(-d2 / (2.0 * eps * eps)) / (2.0 * std::numbers::pi * eps * eps);
}

/// Fermi occupation 1 / (1 + exp((E - cut) / width)); width <= 0 disables it.
[[nodiscard]] inline double fermi_weight(double energy, double cut, double width) {
  if (width <= 0.0) return 1.0;
  const double x = std::clamp((energy - cut) / width, -700.0, 700.0);
  return 1.0 / (1.0 + std::exp(x));
}

struct EnergyWeight {
  double cut = 0.0;
  double width = 0.0;  // <= 0: unweighted
};

/// Liouville diagonal field w(E(r)) k_eps(|Phi_t(r) - r|) on the given axes
/// (rows q, columns p). `span` is the evolution time measured from t0.
[[nodiscard]] inline RealField liouville_diagonal(const DrivenQuarticParams& prm, const Integrator& scheme,
                                                  const Axis& q_axis, const Axis& p_axis, double span, double eps,
                                                  const EnergyWeight& weight = {}, unsigned threads = 1) {
  prm.validate();
  scheme.validate();
  require(eps > 0.0, "liouville: eps must be positive");
  RealField out{q_axis, p_axis, Eigen::MatrixXd(q_axis.size, p_axis.size)};
  const double dt = prm.period() / scheme.steps_per_period;
  parallel_for(static_cast<std::size_t>(q_axis.size), threads, [&](std::size_t i) {
    const double q = q_axis.coord(static_cast<Eigen::Index>(i));
    for (Eigen::Index j = 0; j < p_axis.size; ++j) {
      const double p = p_axis.coord(j);
      double d2 = 0.0;
      if (span != 0.0) {
        const auto s = integrate(prm, {p, q, prm.t0}, prm.t0 + span, span > 0 ? dt : -dt, scheme.order);
        d2 = (s.p - p) * (s.p - p) + (s.q - q) * (s.q - q);
      }
      out.values(static_cast<Eigen::Index>(i), j) =
          fermi_weight(prm.static_energy(p, q), weight.cut, weight.width) * gaussian_kernel(d2, eps);
    }
  });
  return out;
}

struct ReturnEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::size_t in_shell = 0;
};

/// Monte Carlo estimate of  int rho(E(r)) k_eps(|Phi_t(r) - r|) d^2r / int rho(E(r)) d^2r
/// for the flat energy window rho = 1 on [e_lo, e_hi]. Samples are drawn in
/// fixed-size blocks, each seeded from (seed, block), so the result does
/// not depend on the thread count.
[[nodiscard]] inline ReturnEstimate classical_return_probability(const DrivenQuarticParams& prm,
                                                                 const Integrator& scheme, double e_lo, double e_hi,
                                                                 double span, double eps, std::size_t samples,
                                                                 std::uint64_t seed, unsigned threads = 1) {
  prm.validate();
  scheme.validate();
  require(e_hi > e_lo, "return probability: energy window must have e_hi > e_lo");
  require(eps > 0.0, "return probability: eps must be positive");
  require(samples > 0, "return probability: sample count must be positive");

  // Bounding box of the undriven shell E <= e_hi.
  // Grow until both walls exceed e_hi and the potential is increasing outward.
  double q_bound = 1.0;
  while (prm.static_potential(q_bound) <= e_hi || prm.static_potential(-q_bound) <= e_hi ||
         prm.static_force(q_bound) >= 0.0 || prm.static_force(-q_bound) <= 0.0) {
    q_bound *= 2.0;
    if (q_bound > 1e12) throw numerical_error("return probability: energy shell is unbounded");
  }
  double v_min = prm.static_potential(0.0);
  for (int i = 0; i <= 4096; ++i) v_min = std::min(v_min, prm.static_potential(-q_bound + 2.0 * q_bound * i / 4096));
  require(e_hi > v_min, "return probability: energy window lies below the potential minimum");
  const double p_bound = std::sqrt(2.0 * prm.m * (e_hi - v_min));

  constexpr std::size_t block = 1024;
  const std::size_t blocks = (samples + block - 1) / block;
  std::vector<std::array<double, 4>> partial(blocks, {0.0, 0.0, 0.0, 0.0});  // sum rho, sum x, sum x^2, count
  const double dt = prm.period() / scheme.steps_per_period;
  parallel_for(blocks, threads, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uq(-q_bound, q_bound), up(-p_bound, p_bound);
    const std::size_t count = std::min(block, samples - b * block);
    auto& acc = partial[b];
    for (std::size_t s = 0; s < count; ++s) {
      const double q = uq(rng), p = up(rng);
      const double e = prm.static_energy(p, q);
      if (e < e_lo || e > e_hi) continue;
      double d2 = 0.0;
      if (span != 0.0) {
        const auto r = integrate(prm, {p, q, prm.t0}, prm.t0 + span, span > 0 ? dt : -dt, scheme.order);
        d2 = (r.p - p) * (r.p - p) + (r.q - q) * (r.q - q);
      }
      const double x = gaussian_kernel(d2, eps);
      acc[0] += 1.0;
      acc[1] += x;
      acc[2] += x * x;
    }
    acc[3] = static_cast<double>(count);
  });
  double n_in = 0.0, sx = 0.0, sxx = 0.0;
  for (const auto& a : partial) {
    n_in += a[0];
    sx += a[1];
    sxx += a[2];
  }
  if (n_in < 2.0) throw numerical_error("return probability: no samples fell inside the energy shell");
  ReturnEstimate r;
  r.samples = samples;
  r.in_shell = static_cast<std::size_t>(n_in);
  r.value = sx / n_in;
  const double var = std::max(0.0, sxx / n_in - r.value * r.value);
  r.standard_error = std::sqrt(var / n_in);
  return r;
}

}  // namespace scars::continuum

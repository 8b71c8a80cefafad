#pragma once

// Spectral form factor bookkeeping: K(tau) from eigenphases, the exact
// identity between the diagonal-field trace and D_H K, the diagonal
// approximation comparison table, and per-orbit semiclassical weights.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "scars/core/errors.hpp"

namespace scars::analysis {

struct SpectralSeries {
  std::vector<double> phases;  // eigenphases in [0, 2 pi)
  int beta = 2;                // symmetry class label, metadata only

  [[nodiscard]] double dimension() const { return static_cast<double>(phases.size()); }

  /// tr U^n = sum_k exp(-i n theta_k) (sign convention irrelevant for |.|^2).
  [[nodiscard]] std::complex<double> trace_power(int n) const {
    std::complex<double> s(0.0, 0.0);
    for (double th : phases) s += std::polar(1.0, -static_cast<double>(n) * th);
    return s;
  }
};

/// K(n / D_H) = |tr U^n|^2 / D_H.
[[nodiscard]] inline double form_factor(const SpectralSeries& s, int n) {
  require(n >= 0, "form factor: n must be non-negative");
  require(!s.phases.empty(), "form factor: empty spectrum");
  return std::norm(s.trace_power(n)) / s.dimension();
}

/// Boxcar average of K over n - half_width .. n + half_width (clipped at 0).
[[nodiscard]] inline double smoothed_form_factor(const SpectralSeries& s, int n, int half_width) {
  require(half_width >= 0, "form factor: smoothing half width must be non-negative");
  double sum = 0.0;
  int count = 0;
  for (int k = std::max(0, n - half_width); k <= n + half_width; ++k, ++count) sum += form_factor(s, k);
  return sum / count;
}

/// |P - D_H K(n / D_H)| / max(|P|, 1): relative for traces above one and
/// absolute below, so vanishing traces (e.g. even D, odd n) stay well posed.
[[nodiscard]] inline double identity_check(double diagonal_trace, const SpectralSeries& s, int n) {
  const double rhs = s.dimension() * form_factor(s, n);
  return std::abs(diagonal_trace - rhs) / std::max(std::abs(diagonal_trace), 1.0);
}

struct ComparisonRow {
  int n = 0;
  double tau = 0.0;
  double K = 0.0;
  double diagonal = 0.0;  // (2 / beta) tau P_cl
  double ratio = 0.0;     // K / diagonal, 0 when undefined
};

/// Rows for n in [n_min, n_max]; p_cl[i] is the classical return probability
/// at n = n_min + i. The n = 0 row uses K(0+) = 0 by convention.
[[nodiscard]] inline std::vector<ComparisonRow> diagonal_approximation_report(const SpectralSeries& s,
                                                                              const std::vector<double>& p_cl,
                                                                              int n_min, int beta,
                                                                              int smoothing = 0) {
  require(beta == 1 || beta == 2 || beta == 4, "diagonal approximation: beta must be 1, 2 or 4");
  require(n_min >= 0, "diagonal approximation: n_min must be non-negative");
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < p_cl.size(); ++i) {
    ComparisonRow r;
    r.n = n_min + static_cast<int>(i);
    r.tau = r.n / s.dimension();
    r.K = r.n == 0 ? 0.0 : (smoothing > 0 ? smoothed_form_factor(s, r.n, smoothing) : form_factor(s, r.n));
    r.diagonal = (2.0 / beta) * r.tau * p_cl[i];
    r.ratio = r.diagonal != 0.0 ? r.K / r.diagonal : 0.0;
    rows.push_back(r);
  }
  return rows;
}

inline void write_report_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "n,tau,K,two_over_beta_tau_Pcl,ratio\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g\n", r.n, r.tau, r.K, r.diagonal, r.ratio);
    out << buf;
  }
}

enum class WeightKind {
  map,         // N_j^2 / |det(M_j - I)|
  continuous,  // (T_j / 2 pi hbar) / |det(M_perp - I)|, reference only
};

/// Semiclassical orbit weight. For `map`, `length` is the primitive period
/// N_j in map steps (or drive periods); for `continuous`, the primitive
/// period T_j and `hbar` enter as T_j / (2 pi hbar).
[[nodiscard]] inline double orbit_weight(const Eigen::Matrix2d& monodromy, double length, WeightKind kind,
                                         double hbar = 1.0) {
  const double det = (monodromy - Eigen::Matrix2d::Identity()).determinant();
  require(std::abs(det) >= 1e-9, "orbit weight: |det(M - I)| below 1e-9 (marginal orbit)");
  require(length > 0.0, "orbit weight: period must be positive");
  if (kind == WeightKind::map) return length * length / std::abs(det);
  require(hbar > 0.0, "orbit weight: hbar must be positive");
  return length / (2.0 * std::numbers::pi * hbar) / std::abs(det);
}

}  // namespace scars::analysis

#pragma once

// Quantized cat maps on a D-dimensional Hilbert space and their diagonal
// Wigner propagators on the 2D x 2D doubled grid. Grid node (m, l) sits at
// torus coordinates q = m / (2D), p = l / (2D).

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "scars/core/errors.hpp"
#include "scars/core/field.hpp"
#include "scars/torus/classical.hpp"
#include "scars/weyl/doubled_grid.hpp"

namespace scars::torus {

struct QuantizedMap {
  TorusMap map;
  Eigen::Index dimension = 0;
  Eigen::MatrixXcd unitary;  // unitary(k, j) = <k|U|j>

  [[nodiscard]] double effective_hbar() const {
    return 1.0 / (2.0 * std::numbers::pi * static_cast<double>(dimension));
  }
};

/// Max-norm residual of U^dagger U - I.
[[nodiscard]] inline double unitarity_residual(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd e = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return e.cwiseAbs().maxCoeff();
}

/// <k|U|j> = (iD)^{-1/2} exp[i pi / (b D) (a j^2 - 2 j k + d k^2)].
[[nodiscard]] inline QuantizedMap quantize_cat(const TorusMap& map, Eigen::Index dim) {
  map.validate(false);
  require(map.quantizable(), "quantize cat: parity condition a*b even and c*d even violated");
  require(map.b == 1 || map.b == -1, "quantize cat: closed-form kernel requires |b| = 1");
  require(dim >= 2 && dim % 2 == 0, "quantize cat: dimension must be even and at least 2");
  require(dim <= 4096, "quantize cat: dimension above 4096 is not supported");

  QuantizedMap out{map, dim, Eigen::MatrixXcd(dim, dim)};
  const int_t period = 2 * map.b * dim;  // exponent is defined modulo 2 b D
  const std::complex<double> prefactor =
      1.0 / std::sqrt(std::complex<double>(0.0, static_cast<double>(dim)));
  for (int_t k = 0; k < dim; ++k) {
    for (int_t j = 0; j < dim; ++j) {
      const int_t e = checked_add(checked_sub(checked_mul(map.a, checked_mul(j, j)), 2 * j * k),
                                  checked_mul(map.d, checked_mul(k, k)));
      const double phase = std::numbers::pi * static_cast<double>(floor_mod(e, period)) /
                           static_cast<double>(map.b * dim);
      out.unitary(k, j) = prefactor * std::polar(1.0, phase);
    }
  }
  return out;
}

/// U^n by repeated multiplication (n >= 0).
[[nodiscard]] inline Eigen::MatrixXcd unitary_power(const QuantizedMap& u, int n) {
  require(n >= 0, "unitary power: n must be non-negative");
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(u.dimension, u.dimension);
  for (int i = 0; i < n; ++i) r = u.unitary * r;
  return r;
}

struct DiscreteWeylSymbol {
  int n = 0;
  Eigen::MatrixXcd grid;  // 2D x 2D
};

[[nodiscard]] inline DiscreteWeylSymbol discrete_weyl_symbol(const QuantizedMap& u, int n) {
  return {n, weyl::symbol(unitary_power(u, n), weyl::ChordTopology::periodic)};
}

struct DiagonalWignerField {
  int n = 0;
  RealField field;
  double imag_residual = 0.0;
};

[[nodiscard]] inline Axis torus_axis(Eigen::Index dim) {
  return {0.0, 1.0 / (2.0 * static_cast<double>(dim)), 2 * dim, true, false};
}

[[nodiscard]] inline DiagonalWignerField diagonal_wigner_field(const DiscreteWeylSymbol& sym) {
  const Eigen::Index dim = sym.grid.rows() / 2;
  weyl::DiagonalField g = weyl::diagonal_field(sym.grid, weyl::ChordTopology::periodic);
  DiagonalWignerField out;
  out.n = sym.n;
  out.field.q = torus_axis(dim);
  out.field.p = torus_axis(dim);
  out.field.values = std::move(g.values);
  out.imag_residual = g.imag_residual;
  return out;
}

/// Grid sum of the diagonal field; equals |tr U^n|^2.
[[nodiscard]] inline double trace_field(const DiagonalWignerField& f) { return f.field.values.sum(); }

/// |tr U^n|^2 directly from the matrix.
[[nodiscard]] inline double trace_power_squared(const QuantizedMap& u, int n) {
  return std::norm(unitary_power(u, n).trace());
}

struct PeakMatch {
  double q = 0.0;
  double p = 0.0;
  double distance = std::numeric_limits<double>::infinity();  // pixels (Chebyshev), inf if none nearby
  bool matched = false;
};

struct PeakMatchReport {
  std::vector<PeakMatch> points;
  std::vector<PeakMatch> midpoints;  // one per distinct midpoint coordinate

  [[nodiscard]] static double hit_rate(const std::vector<PeakMatch>& v) {
    if (v.empty()) return 1.0;
    std::size_t hits = 0;
    for (const auto& m : v) hits += m.matched ? 1u : 0u;
    return static_cast<double>(hits) / static_cast<double>(v.size());
  }
};

/// True where |field| is a (periodic, 8-neighbour, non-strict) local maximum
/// and above `floor_fraction` of the global max |field|.
[[nodiscard]] inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> local_maxima(const Eigen::MatrixXd& v,
                                                                                       double floor_fraction = 1e-6) {
  const Eigen::Index nr = v.rows(), nc = v.cols();
  const Eigen::MatrixXd a = v.cwiseAbs();
  const double floor = floor_fraction * a.maxCoeff();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> out(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      bool peak = a(i, j) > floor;
      for (int di = -1; di <= 1 && peak; ++di)
        for (int dj = -1; dj <= 1 && peak; ++dj)
          if ((di != 0 || dj != 0) && a((i + di + nr) % nr, (j + dj + nc) % nc) > a(i, j)) peak = false;
      out(i, j) = peak;
    }
  }
  return out;
}

/// Chebyshev pixel distance from torus point (q, p) to the nearest local
/// maximum of |field|, searched within `radius` pixels.
[[nodiscard]] inline PeakMatch match_point(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& peaks,
                                           double q, double p, double tolerance = 1.0, int radius = 3) {
  const Eigen::Index n2 = peaks.rows();
  const double fq = q * static_cast<double>(n2);
  const double fp = p * static_cast<double>(n2);
  const auto cq = static_cast<Eigen::Index>(std::llround(fq));
  const auto cp = static_cast<Eigen::Index>(std::llround(fp));
  PeakMatch m{q, p};
  for (Eigen::Index di = -radius; di <= radius; ++di) {
    for (Eigen::Index dj = -radius; dj <= radius; ++dj) {
      const Eigen::Index i = cq + di, j = cp + dj;
      if (!peaks(weyl::detail::wrap(i, n2), weyl::detail::wrap(j, n2))) continue;
      const double dist = std::max(std::abs(static_cast<double>(i) - fq), std::abs(static_cast<double>(j) - fp));
      m.distance = std::min(m.distance, dist);
    }
  }
  m.matched = m.distance <= tolerance;
  return m;
}

[[nodiscard]] inline PeakMatchReport peak_match(const DiagonalWignerField& f, const PeriodicPointSet& points,
                                                const MidpointCatalog* catalog, double tolerance = 1.0) {
  PeakMatchReport report;
  if (points.points.empty()) return report;
  const auto peaks = local_maxima(f.field.values);
  for (const TorusPoint& r : points.points) report.points.push_back(match_point(peaks, r.q(), r.p(), tolerance));
  if (catalog != nullptr)
    for (const auto& [r, count] : catalog->multiplicity)
      report.midpoints.push_back(match_point(peaks, r.q(), r.p(), tolerance));
  return report;
}

}  // namespace scars::torus

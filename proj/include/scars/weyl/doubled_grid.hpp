#pragma once

// Weyl symbols and diagonal Wigner propagators on the doubled phase-space
// grid of an N-dimensional position basis.
//
// Grid node (m, l), 0 <= m, l < 2N, sits at position index m/2 and momentum
// index l/2; half-integer positions carry the midpoints of basis pairs. The
// symbol of an operator A is
//
//     S(m, l) = 1/2 * sum_{nu = m mod 2} exp(-i pi l nu / N) A[(m+nu)/2, (m-nu)/2]
//
// and the diagonal Wigner propagator is the phase-space autocorrelation
//
//     G(r) = c * sum_s conj(S(r - s)) * S(r + s),
//
// evaluated for all r at once through one FFT convolution. The constant c is
// fixed so that sum_r G(r) = |tr A|^2 holds as an algebraic identity:
//   periodic chords: c = 1/(4 N^2)   (chord and midpoint indices wrap mod N)
//   open chords:     c = 1/N^2       (no wrap in position; momentum stays periodic)

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "scars/core/errors.hpp"
#include "scars/core/fft.hpp"

namespace scars::weyl {

enum class ChordTopology {
  periodic,  // finite periodic Hilbert space (torus); every feature has 4 half-shift images
  open,      // position chords never wrap; for localized operators on a box
};

namespace detail {

inline Eigen::Index wrap(Eigen::Index k, Eigen::Index n) { return ((k % n) + n) % n; }

/// Scatters operator entries into the (midpoint, chord) table that the
/// momentum transform consumes: row m, column nu mod 2N.
inline Eigen::MatrixXcd chord_table(const Eigen::MatrixXcd& op, ChordTopology topology) {
  const Eigen::Index n = op.rows();
  const Eigen::Index n2 = 2 * n;
  Eigen::MatrixXcd table = Eigen::MatrixXcd::Zero(n2, n2);
  for (Eigen::Index m = 0; m < n2; ++m) {
    if (topology == ChordTopology::periodic) {
      for (Eigen::Index nu = m % 2; nu < n2; nu += 2) {
        const Eigen::Index j = wrap((m + nu) / 2, n);
        const Eigen::Index k = wrap((m - nu) / 2, n);
        table(m, nu) = op(j, k);
      }
    } else {
      for (Eigen::Index nu = -(n - 1); nu <= n - 1; ++nu) {
        if (((m - nu) & 1) != 0) continue;
        const Eigen::Index j = (m + nu) / 2;
        const Eigen::Index k = (m - nu) / 2;
        if (j < 0 || j >= n || k < 0 || k >= n) continue;
        table(m, wrap(nu, n2)) = op(j, k);
      }
    }
  }
  return table;
}

}  // namespace detail

/// Weyl symbol of a square operator on the 2N x 2N doubled grid.
inline Eigen::MatrixXcd symbol(const Eigen::MatrixXcd& op, ChordTopology topology) {
  require(op.rows() == op.cols() && op.rows() > 0, "weyl symbol: operator must be square and non-empty");
  Eigen::MatrixXcd table = detail::chord_table(op, topology);
  fft::rows(table);
  table *= 0.5;
  return table;
}

/// Normalization constant c of the diagonal autocorrelation for dimension n.
inline double diagonal_constant(Eigen::Index n, ChordTopology topology) {
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  return topology == ChordTopology::periodic ? 1.0 / (4.0 * nn) : 1.0 / nn;
}

struct DiagonalField {
  Eigen::MatrixXd values;     // 2N x 2N, same node layout as the symbol
  double imag_residual = 0.0; // max |Im G| / max |G|
};

/// Diagonal Wigner propagator from a doubled-grid symbol.
inline DiagonalField diagonal_field(const Eigen::MatrixXcd& sym, ChordTopology topology) {
  const Eigen::Index n2 = sym.rows();
  require(sym.cols() == n2 && n2 % 2 == 0, "diagonal field: symbol must be a 2N x 2N grid");
  const Eigen::Index n = n2 / 2;
  const Eigen::Index rows = topology == ChordTopology::periodic ? n2 : 2 * n2;

  Eigen::MatrixXcd work = Eigen::MatrixXcd::Zero(rows, n2);
  work.topRows(n2) = sym;
  fft::forward2(work);

  // Spectrum of S (*) conj(S) is F(k) * conj(F(-k)); pairs (k, -k) update in place.
  for (Eigen::Index a = 0; a < rows; ++a) {
    const Eigen::Index ma = detail::wrap(-a, rows);
    for (Eigen::Index b = 0; b < n2; ++b) {
      const Eigen::Index mb = detail::wrap(-b, n2);
      if (ma < a || (ma == a && mb < b)) continue;
      const std::complex<double> x = work(a, b);
      const std::complex<double> y = work(ma, mb);
      work(a, b) = x * std::conj(y);
      work(ma, mb) = y * std::conj(x);
    }
  }
  fft::inverse2(work);

  const double scale =
      diagonal_constant(n, topology) / (static_cast<double>(rows) * static_cast<double>(n2));
  DiagonalField out;
  out.values.resize(n2, n2);
  double max_abs = 0.0, max_imag = 0.0;
  for (Eigen::Index m = 0; m < n2; ++m) {
    const Eigen::Index x = topology == ChordTopology::periodic ? detail::wrap(2 * m, n2) : 2 * m;
    for (Eigen::Index l = 0; l < n2; ++l) {
      const std::complex<double> g = work(x, detail::wrap(2 * l, n2)) * scale;
      out.values(m, l) = g.real();
      max_abs = std::max(max_abs, std::abs(g));
      max_imag = std::max(max_imag, std::abs(g.imag()));
    }
  }
  out.imag_residual = max_abs > 0.0 ? max_imag / max_abs : 0.0;
  return out;
}

/// Relative mismatch |a - b| / max(|a|, |b|, floor).
inline double relative_residual(double a, double b, double floor = 1.0) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace scars::weyl

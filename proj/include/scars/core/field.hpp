#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "scars/core/errors.hpp"

namespace scars {

/// One coordinate axis of a rectangular phase-space grid.
///
/// `fft_order` axes store non-negative offsets first and negative ones in the
/// upper half, as produced by a discrete Fourier transform. `periodic` axes
/// identify index `size` with index 0.
struct Axis {
  double origin = 0.0;
  double step = 1.0;
  Eigen::Index size = 0;
  bool periodic = false;
  bool fft_order = false;

  [[nodiscard]] double coord(Eigen::Index i) const {
    const Eigen::Index k = (fft_order && i >= size / 2) ? i - size : i;
    return origin + static_cast<double>(k) * step;
  }

  /// Fractional index of coordinate x (not wrapped into [0, size)).
  [[nodiscard]] double fractional_index(double x) const { return (x - origin) / step; }

  /// Index of the node closest to x, or -1 when x lies off a non-periodic axis.
  [[nodiscard]] Eigen::Index nearest(double x) const {
    auto k = static_cast<Eigen::Index>(std::llround(fractional_index(x)));
    if (periodic || fft_order) return ((k % size) + size) % size;
    return (k < 0 || k >= size) ? -1 : k;
  }

  /// Signed index distance |i - j| honoring periodicity.
  [[nodiscard]] Eigen::Index distance(Eigen::Index i, Eigen::Index j) const {
    Eigen::Index d = std::abs(i - j);
    if (periodic || fft_order) d = std::min(d, size - d);
    return d;
  }

  /// Node order that lists coordinates in ascending order.
  [[nodiscard]] std::vector<Eigen::Index> ascending_order() const {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(size));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (fft_order) std::rotate(order.begin(), order.begin() + size / 2, order.end());
    return order;
  }
};

/// Scalar field sampled on a (q, p) grid: rows index q, columns index p.
template <class Scalar>
struct PhaseSpaceField {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Axis q;
  Axis p;
  Matrix values;

  [[nodiscard]] Scalar sum() const { return values.sum(); }

  [[nodiscard]] double cell_area() const { return q.step * p.step; }

  /// Copy with both axes in ascending coordinate order and fft ordering removed.
  [[nodiscard]] PhaseSpaceField ascending() const {
    PhaseSpaceField out;
    out.q = q;
    out.p = p;
    const auto qo = q.ascending_order();
    const auto po = p.ascending_order();
    out.values.resize(values.rows(), values.cols());
    for (std::size_t i = 0; i < qo.size(); ++i)
      for (std::size_t j = 0; j < po.size(); ++j)
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values(qo[i], po[j]);
    if (q.fft_order) out.q = Axis{q.coord(qo.front()), q.step, q.size, q.periodic, false};
    if (p.fft_order) out.p = Axis{p.coord(po.front()), p.step, p.size, p.periodic, false};
    return out;
  }

  /// Sub-grid whose node coordinates fall inside the closed rectangle.
  [[nodiscard]] PhaseSpaceField window(double q_min, double q_max, double p_min, double p_max) const {
    const PhaseSpaceField sorted = ascending();
    auto span = [](const Axis& a, double lo, double hi) {
      Eigen::Index first = a.size, last = -1;
      for (Eigen::Index i = 0; i < a.size; ++i) {
        const double x = a.coord(i);
        if (x >= lo && x <= hi) {
          first = std::min(first, i);
          last = std::max(last, i);
        }
      }
      return std::pair{first, last};
    };
    const auto [q0, q1] = span(sorted.q, q_min, q_max);
    const auto [p0, p1] = span(sorted.p, p_min, p_max);
    require(q1 >= q0 && p1 >= p0, "window does not intersect the field grid");
    PhaseSpaceField out;
    out.q = Axis{sorted.q.coord(q0), sorted.q.step, q1 - q0 + 1, false, false};
    out.p = Axis{sorted.p.coord(p0), sorted.p.step, p1 - p0 + 1, false, false};
    out.values = sorted.values.block(q0, p0, out.q.size, out.p.size);
    return out;
  }
};

using RealField = PhaseSpaceField<double>;
using ComplexField = PhaseSpaceField<std::complex<double>>;

/// Median of |values|.
inline double median_abs(const Eigen::MatrixXd& values) {
  std::vector<double> a(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(values.data()[i]);
  if (a.empty()) return 0.0;
  const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
  std::nth_element(a.begin(), mid, a.end());
  if (a.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(a.begin(), mid);
  return 0.5 * (lower + upper);
}

/// Value below which (1 - fraction) of the entries lie; entries >= it form the
/// top `fraction` of the field.
inline double upper_quantile(const Eigen::MatrixXd& values, double fraction) {
  std::vector<double> a(values.data(), values.data() + values.size());
  require(!a.empty(), "quantile of an empty field");
  auto k = static_cast<std::size_t>(std::floor((1.0 - fraction) * static_cast<double>(a.size())));
  k = std::min(k, a.size() - 1);
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end());
  return a[k];
}

/// Jaccard index of the top-`fraction` supports of two equally shaped fields.
inline double top_fraction_jaccard(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double fraction) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "jaccard: field shapes differ");
  const double ta = upper_quantile(a, fraction);
  const double tb = upper_quantile(b, fraction);
  std::size_t both = 0, either = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const bool in_a = a.data()[i] >= ta;
    const bool in_b = b.data()[i] >= tb;
    both += (in_a && in_b) ? 1u : 0u;
    either += (in_a || in_b) ? 1u : 0u;
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace scars

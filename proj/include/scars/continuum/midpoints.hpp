#pragma once

// Midpoint surfaces of closed orbits: (r(s') + r(s'')) / 2 over all pairs of
// orbit parameters. The full (s', s'') torus double-covers the surface; the
// exported mesh keeps one vertex per unordered pair s' != s''.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <vector>

#include "scars/core/errors.hpp"

namespace scars::continuum {

template <std::size_t Dim>
using Vec = std::array<double, Dim>;

template <std::size_t Dim>
double distance(const Vec<Dim>& a, const Vec<Dim>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < Dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

template <std::size_t Dim>
Vec<Dim> midpoint(const Vec<Dim>& a, const Vec<Dim>& b) {
  Vec<Dim> m;
  for (std::size_t k = 0; k < Dim; ++k) m[k] = 0.5 * (a[k] + b[k]);
  return m;
}

template <std::size_t Dim>
struct MidpointSurface {
  std::vector<Vec<Dim>> orbit;                   // closed orbit samples, endpoint not repeated
  std::vector<Vec<Dim>> vertices;                // one per unordered pair i < j
  std::vector<std::array<std::size_t, 3>> faces; // indices into vertices

  [[nodiscard]] std::size_t samples() const { return orbit.size(); }

  /// Vertex index of the unordered pair {i, j}, i != j.
  [[nodiscard]] std::size_t vertex_index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    const std::size_t m = orbit.size();
    return i * m - i * (i + 1) / 2 + (j - i - 1);
  }

  /// Midpoint for any ordered parameter pair, including the diagonal.
  [[nodiscard]] Vec<Dim> at(std::size_t i, std::size_t j) const { return midpoint(orbit[i % samples()], orbit[j % samples()]); }
};

/// Validates closure and drops an explicitly repeated endpoint.
///
/// A sampled orbit is closed when its last sample coincides with the first
/// (within `tolerance` times the orbit extent) or when the closing gap is no
/// larger than twice the largest step between consecutive samples.
template <std::size_t Dim>
std::vector<Vec<Dim>> close_orbit(std::vector<Vec<Dim>> samples, double tolerance = 1e-9) {
  require(samples.size() >= 2, "midpoint surface: at least two orbit samples are required");
  double extent = 0.0, max_step = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    extent = std::max(extent, distance(samples[i], samples[0]));
    if (i > 0) max_step = std::max(max_step, distance(samples[i], samples[i - 1]));
  }
  const double gap = distance(samples.back(), samples.front());
  if (samples.size() > 2 && gap <= tolerance * std::max(extent, 1.0)) {
    samples.pop_back();
    return samples;
  }
  require(gap <= 2.0 * max_step + tolerance, "midpoint surface: orbit samples do not close");
  return samples;
}

template <std::size_t Dim>
MidpointSurface<Dim> midpoint_surface(std::vector<Vec<Dim>> samples, double tolerance = 1e-9) {
  MidpointSurface<Dim> s;
  s.orbit = close_orbit(std::move(samples), tolerance);
  const std::size_t m = s.orbit.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) s.vertices.push_back(midpoint(s.orbit[i], s.orbit[j]));
  if (m < 3) return s;
  // Quad cells of the periodic parameter grid, folded onto i < j. Cells that
  // touch the diagonal once keep their off-diagonal triangle.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t jm = i + 1; jm < m; ++jm) {  // cell (j, i) mirrors cell (i, j)
      const std::array<std::array<std::size_t, 2>, 4> c{{{i, jm}, {(i + 1) % m, jm}, {(i + 1) % m, (jm + 1) % m}, {i, (jm + 1) % m}}};
      std::array<bool, 4> diag{};
      int n_diag = 0;
      for (int k = 0; k < 4; ++k) {
        diag[k] = c[k][0] == c[k][1];
        n_diag += diag[k] ? 1 : 0;
      }
      auto v = [&](int k) { return s.vertex_index(c[k][0], c[k][1]); };
      if (n_diag == 0) {
        s.faces.push_back({v(0), v(1), v(2)});
        s.faces.push_back({v(0), v(2), v(3)});
      } else if (n_diag == 1) {
        std::array<std::size_t, 3> tri{};
        int t = 0;
        for (int k = 0; k < 4; ++k)
          if (!diag[k]) tri[t++] = v(k);
        s.faces.push_back(tri);
      }
    }
  }
  return s;
}

/// Number of mesh triangles (projected to the first two coordinates) that
/// contain the point; the number of surface leaves over it.
template <std::size_t Dim>
int leaf_count(const MidpointSurface<Dim>& s, double x, double y) {
  static_assert(Dim >= 2);
  int count = 0;
  for (const auto& f : s.faces) {
    const auto& a = s.vertices[f[0]];
    const auto& b = s.vertices[f[1]];
    const auto& c = s.vertices[f[2]];
    const double d1 = (x - b[0]) * (a[1] - b[1]) - (a[0] - b[0]) * (y - b[1]);
    const double d2 = (x - c[0]) * (b[1] - c[1]) - (b[0] - c[0]) * (y - c[1]);
    const double d3 = (x - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (y - a[1]);
    const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
    if (!(neg && pos)) ++count;
  }
  return count;
}

/// Indexed triangle mesh in OBJ text form (1-based face indices).
template <std::size_t Dim>
void write_obj(std::ostream& out, const MidpointSurface<Dim>& s) {
  out << "# midpoint surface: " << s.orbit.size() << " orbit samples, " << s.vertices.size() << " vertices, "
      << s.faces.size() << " faces\n";
  char buf[128];
  for (const auto& v : s.vertices) {
    std::snprintf(buf, sizeof buf, "v %.10g %.10g %.10g\n", v[0], Dim > 1 ? v[1] : 0.0, Dim > 2 ? v[2] : 0.0);
    out << buf;
  }
  for (const auto& f : s.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace scars::continuum

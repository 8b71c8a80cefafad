#pragma once

// Exact classical dynamics of hyperbolic SL(2, Z) torus maps.
//
// Convention: the map acts on column vectors (q, p),
//     q' = a q + b p,  p' = c q + d p   (mod 1).
// Periodic points of period n live on the lattice (1/Delta) Z^2 with
// Delta = |det(T^n - I)|, so every point of a PeriodicPointSet shares that
// common denominator and all arithmetic stays in checked 64-bit integers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "scars/core/errors.hpp"
#include "scars/torus/lattice.hpp"

namespace scars::torus {

struct TorusMap {
  int_t a = 2, b = 1, c = 3, d = 2;

  [[nodiscard]] IntMatrix2 matrix() const { return {a, b, c, d}; }
  [[nodiscard]] bool hyperbolic() const { return std::abs(a + d) > 2; }
  [[nodiscard]] bool quantizable() const { return (a * b) % 2 == 0 && (c * d) % 2 == 0; }

  /// Throws validation_error unless det = 1; `need_hyperbolic` adds |a+d| > 2.
  void validate(bool need_hyperbolic = true) const {
    require(matrix().det() == 1, "torus map: determinant a*d - b*c must equal 1");
    if (need_hyperbolic) require(hyperbolic(), "torus map: |a + d| must exceed 2 (hyperbolic map required)");
  }

  [[nodiscard]] TorusMap inverse() const { return {d, -b, -c, a}; }
};

/// Rational torus point (q_num / denom, p_num / denom) with 0 <= num < denom.
struct TorusPoint {
  int_t q_num = 0;
  int_t p_num = 0;
  int_t denom = 1;

  [[nodiscard]] double q() const { return static_cast<double>(q_num) / static_cast<double>(denom); }
  [[nodiscard]] double p() const { return static_cast<double>(p_num) / static_cast<double>(denom); }

  void validate() const {
    require(denom > 0, "torus point: denominator must be positive");
    require(q_num >= 0 && q_num < denom && p_num >= 0 && p_num < denom,
            "torus point: coordinates must lie in [0, 1)");
  }

  /// The same point written over a multiple of its denominator.
  [[nodiscard]] TorusPoint rescaled(int_t new_denom) const {
    require(new_denom % denom == 0, "torus point: new denominator must be a multiple");
    const int_t f = new_denom / denom;
    return {checked_mul(q_num, f), checked_mul(p_num, f), new_denom};
  }

  /// Reduced-fraction equality (different denominators allowed).
  [[nodiscard]] bool same_as(const TorusPoint& o) const {
    return checked_mul(q_num, o.denom) == checked_mul(o.q_num, denom) &&
           checked_mul(p_num, o.denom) == checked_mul(o.p_num, denom);
  }

  auto operator<=>(const TorusPoint&) const = default;
};

/// One application of an integer matrix to a rational point, reduced mod 1.
[[nodiscard]] inline TorusPoint apply(const IntMatrix2& m, const TorusPoint& r) {
  const int_t q = checked_add(checked_mul(m.a, r.q_num), checked_mul(m.b, r.p_num));
  const int_t p = checked_add(checked_mul(m.c, r.q_num), checked_mul(m.d, r.p_num));
  return {floor_mod(q, r.denom), floor_mod(p, r.denom), r.denom};
}

[[nodiscard]] inline IntMatrix2 matrix_power(const TorusMap& map, int_t n) { return power(map.matrix(), n); }

/// Image of `point` under n applications of the map; negative n uses the inverse.
[[nodiscard]] inline TorusPoint iterate(const TorusMap& map, const TorusPoint& point, int_t n) {
  point.validate();
  map.validate(false);
  const IntMatrix2 step = n >= 0 ? map.matrix() : map.inverse().matrix();
  return apply(power(step, n >= 0 ? n : -n), point);
}

/// |det(T^n - I)|, the number of fixed points of T^n on the torus.
[[nodiscard]] inline int_t fixed_point_count(const TorusMap& map, int_t n) {
  map.validate(true);
  require(n >= 1, "fixed point count: period must be positive");
  const int_t det = matrix_power(map, n).minus_identity().det();
  return det < 0 ? -det : det;
}

struct Orbit {
  std::vector<std::size_t> members;  // indices into PeriodicPointSet::points, in map order
  int_t primitive_period = 1;
};

struct PeriodicPointSet {
  int_t period = 1;
  int_t denom = 1;  // common denominator |det(T^n - I)|
  std::vector<TorusPoint> points;
  std::vector<Orbit> orbits;
  std::vector<std::size_t> orbit_of;  // point index -> orbit index

  [[nodiscard]] int_t primitive_period(std::size_t i) const { return orbits[orbit_of[i]].primitive_period; }
};

/// All solutions of (T^n - I) r = 0 (mod 1), grouped into cycles.
///
/// The solutions form the lattice adj(T^n - I) Z^2 / Delta modulo Z^2. Its
/// Hermite basis [[alpha, beta], [0, gamma]] enumerates the Delta cosets
/// directly: q = (alpha i + beta j) mod Delta, p = gamma j.
[[nodiscard]] inline PeriodicPointSet enumerate_periodic_points(const TorusMap& map, int_t n) {
  map.validate(true);
  require(n >= 1, "periodic points: period must be positive");
  const IntMatrix2 tn = matrix_power(map, n);
  const IntMatrix2 a = tn.minus_identity();
  const int_t delta = fixed_point_count(map, n);
  const HermiteBasis h = hermite_basis(a.adjugate());
  if (checked_mul(h.alpha, h.gamma) != delta)
    throw numerical_error("periodic points: lattice index disagrees with |det(T^n - I)|");

  PeriodicPointSet set;
  set.period = n;
  set.denom = delta;
  set.points.reserve(static_cast<std::size_t>(delta));
  for (int_t j = 0; j < h.alpha; ++j)
    for (int_t i = 0; i < h.gamma; ++i)
      set.points.push_back({floor_mod(checked_add(checked_mul(h.alpha, i), checked_mul(h.beta, j)), delta),
                            floor_mod(checked_mul(h.gamma, j), delta), delta});
  std::sort(set.points.begin(), set.points.end());

  // Self-checks: exact periodicity and distinctness.
  for (const TorusPoint& r : set.points)
    if (apply(tn, r) != r) throw numerical_error("periodic points: enumerated point is not periodic");
  if (std::adjacent_find(set.points.begin(), set.points.end()) != set.points.end())
    throw numerical_error("periodic points: duplicate lattice point");
  if (static_cast<int_t>(set.points.size()) != delta)
    throw numerical_error("periodic points: count disagrees with |det(T^n - I)|");

  std::map<TorusPoint, std::size_t> index;
  for (std::size_t i = 0; i < set.points.size(); ++i) index.emplace(set.points[i], i);
  constexpr std::size_t unassigned = static_cast<std::size_t>(-1);
  set.orbit_of.assign(set.points.size(), unassigned);
  const IntMatrix2 t = map.matrix();
  for (std::size_t start = 0; start < set.points.size(); ++start) {
    if (set.orbit_of[start] != unassigned) continue;
    Orbit orbit;
    std::size_t cur = start;
    do {
      set.orbit_of[cur] = set.orbits.size();
      orbit.members.push_back(cur);
      cur = index.at(apply(t, set.points[cur]));
    } while (cur != start);
    orbit.primitive_period = static_cast<int_t>(orbit.members.size());
    if (n % orbit.primitive_period != 0) throw numerical_error("periodic points: primitive period does not divide n");
    set.orbits.push_back(std::move(orbit));
  }
  return set;
}

/// Four half-integer torus images (sigma_q/2, sigma_p/2) of a midpoint.
struct HalfShift {
  int sigma_q = 0;
  int sigma_p = 0;
  auto operator<=>(const HalfShift&) const = default;
};

struct MidpointEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  TorusPoint midpoint;  // denominator 2 * Delta
  HalfShift shift;
};

struct MidpointCatalog {
  int_t period = 1;
  std::vector<MidpointEntry> entries;
  /// Distinct midpoint coordinates with the number of catalog entries landing on each.
  std::map<TorusPoint, std::size_t> multiplicity;
};

/// Midpoint catalogs grow as 4 P (P - 1); larger requests are rejected.
inline constexpr std::size_t max_catalog_points = 2048;

/// Every ordered pair i != j with all four half-shift images of (r_i + r_j) / 2.
[[nodiscard]] inline MidpointCatalog build_midpoint_catalog(const PeriodicPointSet& set) {
  require(!set.points.empty(), "midpoint catalog: point set is empty");
  require(set.points.size() <= max_catalog_points, "midpoint catalog: too many points for an explicit catalog");
  MidpointCatalog cat;
  cat.period = set.period;
  const int_t den = checked_mul(2, set.denom);
  const std::size_t np = set.points.size();
  cat.entries.reserve(4 * np * (np - 1));
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      if (i == j) continue;
      const int_t q = set.points[i].q_num + set.points[j].q_num;
      const int_t p = set.points[i].p_num + set.points[j].p_num;
      for (int sq = 0; sq < 2; ++sq) {
        for (int sp = 0; sp < 2; ++sp) {
          const TorusPoint mid{floor_mod(q + sq * set.denom, den), floor_mod(p + sp * set.denom, den), den};
          cat.entries.push_back({i, j, mid, {sq, sp}});
          ++cat.multiplicity[mid];
        }
      }
    }
  }
  return cat;
}

/// Sum over ordered pairs of fixed points of T^n of 1/|det(T^n - I)|.
[[nodiscard]] inline double pair_contribution_total(const TorusMap& map, int_t n) {
  const auto count = static_cast<double>(fixed_point_count(map, n));
  return count * count / count;
}

/// Sum over fixed points of 1/|det(T^n - I)|; identically one for linear maps.
[[nodiscard]] inline double classical_return_probability_map(const TorusMap& map, int_t n) {
  const int_t count = fixed_point_count(map, n);
  double total = 0.0;
  for (int_t k = 0; k < count; ++k) total += 1.0 / static_cast<double>(count);
  return total;
}

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Coarse-grained return probability: the fraction of uniform samples whose
/// n-step image returns to within a box of half-width eps (torus distance),
/// divided by the box area (2 eps)^2.
[[nodiscard]] inline MonteCarloEstimate classical_return_probability_mc(const TorusMap& map, int_t n, double eps,
                                                                        std::size_t samples, std::uint64_t seed) {
  require(eps > 0.0 && eps < 0.25, "return probability: eps must lie in (0, 1/4)");
  require(samples > 0, "return probability: sample count must be positive");
  const IntMatrix2 tn = matrix_power(map, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto torus_gap = [](double x) { return std::abs(x - std::round(x)); };
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double q = unit(rng);
    const double p = unit(rng);
    const double dq = static_cast<double>(tn.a - 1) * q + static_cast<double>(tn.b) * p;
    const double dp = static_cast<double>(tn.c) * q + static_cast<double>(tn.d - 1) * p;
    if (torus_gap(dq) < eps && torus_gap(dp) < eps) ++hits;
  }
  const double f = static_cast<double>(hits) / static_cast<double>(samples);
  const double area = 4.0 * eps * eps;
  return {f / area, std::sqrt(f * (1.0 - f) / static_cast<double>(samples)) / area};
}

/// CSV rows `period,kind,p_num,q_num,denom,shift_p,shift_q,primitive_period`.
/// Midpoint rows list each distinct (coordinate, shift) once; their
/// primitive_period column is 0.
inline void write_points_csv(std::ostream& out, const PeriodicPointSet& set, const MidpointCatalog* catalog) {
  out << "period,kind,p_num,q_num,denom,shift_p,shift_q,primitive_period\n";
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    const TorusPoint& r = set.points[i];
    out << set.period << ",fixed," << r.p_num << ',' << r.q_num << ',' << r.denom << ",0,0,"
        << set.primitive_period(i) << '\n';
  }
  if (catalog == nullptr) return;
  std::map<std::pair<TorusPoint, HalfShift>, bool> seen;
  for (const MidpointEntry& e : catalog->entries) seen.emplace(std::pair{e.midpoint, e.shift}, true);
  for (const auto& [key, unused] : seen) {
    const auto& [r, s] = key;
    out << set.period << ",midpoint," << r.p_num << ',' << r.q_num << ',' << r.denom << ',' << s.sigma_p << ','
        << s.sigma_q << ",0\n";
  }
}

}  // namespace scars::torus

#pragma once

// Overflow-checked 2x2 integer linear algebra for SL(2, Z) torus maps.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "scars/core/errors.hpp"

namespace scars::torus {

using int_t = std::int64_t;

[[nodiscard]] inline int_t checked_add(int_t a, int_t b) {
  int_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in addition");
  return r;
}

[[nodiscard]] inline int_t checked_sub(int_t a, int_t b) {
  int_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("integer overflow in subtraction");
  return r;
}

[[nodiscard]] inline int_t checked_mul(int_t a, int_t b) {
  int_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in multiplication");
  return r;
}

[[nodiscard]] inline int_t floor_mod(int_t a, int_t m) {
  const int_t r = a % m;
  return r < 0 ? r + m : r;
}

/// Integer 2x2 matrix with rows (a, b) and (c, d).
struct IntMatrix2 {
  int_t a = 1, b = 0, c = 0, d = 1;

  static constexpr IntMatrix2 identity() { return {1, 0, 0, 1}; }

  [[nodiscard]] int_t det() const { return checked_sub(checked_mul(a, d), checked_mul(b, c)); }
  [[nodiscard]] int_t trace() const { return checked_add(a, d); }

  [[nodiscard]] IntMatrix2 operator*(const IntMatrix2& o) const {
    return {checked_add(checked_mul(a, o.a), checked_mul(b, o.c)),
            checked_add(checked_mul(a, o.b), checked_mul(b, o.d)),
            checked_add(checked_mul(c, o.a), checked_mul(d, o.c)),
            checked_add(checked_mul(c, o.b), checked_mul(d, o.d))};
  }

  [[nodiscard]] IntMatrix2 minus_identity() const { return {checked_sub(a, 1), b, c, checked_sub(d, 1)}; }

  /// Adjugate: adj(M) * M = det(M) * I.
  [[nodiscard]] IntMatrix2 adjugate() const { return {d, -b, -c, a}; }

  bool operator==(const IntMatrix2&) const = default;
};

/// Exact M^n by binary exponentiation; throws std::overflow_error rather than wrap.
[[nodiscard]] inline IntMatrix2 power(IntMatrix2 base, int_t n) {
  require(n >= 0, "matrix power: exponent must be non-negative");
  IntMatrix2 result = IntMatrix2::identity();
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

/// Extended Euclid: returns (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0.
[[nodiscard]] inline std::tuple<int_t, int_t, int_t> extended_gcd(int_t a, int_t b) {
  int_t old_r = a, r = b, old_x = 1, x = 0, old_y = 0, y = 1;
  while (r != 0) {
    const int_t q = old_r / r;
    std::tie(old_r, r) = std::pair{r, checked_sub(old_r, checked_mul(q, r))};
    std::tie(old_x, x) = std::pair{x, checked_sub(old_x, checked_mul(q, x))};
    std::tie(old_y, y) = std::pair{y, checked_sub(old_y, checked_mul(q, y))};
  }
  if (old_r < 0) return {-old_r, -old_x, -old_y};
  return {old_r, old_x, old_y};
}

/// Upper-triangular Hermite basis [[alpha, beta], [0, gamma]] of the lattice
/// spanned by the columns of a nonsingular matrix: alpha, gamma > 0,
/// 0 <= beta < alpha, alpha * gamma = |det|.
struct HermiteBasis {
  int_t alpha = 1, beta = 0, gamma = 1;
};

[[nodiscard]] inline HermiteBasis hermite_basis(const IntMatrix2& m) {
  const int_t det = m.det();
  require(det != 0, "hermite basis: singular matrix");
  const auto [g, x, y] = extended_gcd(m.c, m.d);
  // Unimodular column transform W = [[d/g, x], [-c/g, y]] maps row (c, d) to (0, g).
  const int_t w11 = m.d / g, w12 = x, w21 = -m.c / g, w22 = y;
  int_t alpha = checked_add(checked_mul(m.a, w11), checked_mul(m.b, w21));
  const int_t beta = checked_add(checked_mul(m.a, w12), checked_mul(m.b, w22));
  if (alpha < 0) alpha = -alpha;
  return {alpha, floor_mod(beta, alpha), g};
}

}  // namespace scars::torus

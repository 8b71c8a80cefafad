#pragma once

// Parameters of the driven one-dimensional oscillator family
//
//   quartic:   H = p^2/2m - m w0^2 q^2/4 + m^2 w0^4 q^4/(64 Eb) + S q cos(w t + phi)
//   harmonic:  H = p^2/2m + m Omega^2 q^2/2                     + S q cos(w t + phi)
//
// The drive period T = 2 pi / w sets the stroboscopic time unit in both cases.

#include <cmath>
#include <numbers>

#include "scars/core/errors.hpp"

namespace scars::continuum {

enum class PotentialKind { quartic, harmonic };

struct DrivenQuarticParams {
  PotentialKind kind = PotentialKind::quartic;
  double m = 1.0;
  double omega0 = 1.0;
  double omega = 0.95;
  double phi = std::numbers::pi / 3.0;
  double S = 0.07;
  double Eb = 192.0;
  double Omega = 1.0;  // harmonic frequency (harmonic kind only)
  double t0 = 0.0;     // stroboscopic phase origin

  void validate() const {
    require(std::isfinite(m) && m > 0.0, "params: mass m must be positive");
    require(std::isfinite(omega) && omega > 0.0, "params: drive frequency omega must be positive");
    require(std::isfinite(Eb) && Eb > 0.0, "params: barrier energy Eb must be positive");
    require(std::isfinite(omega0) && std::isfinite(phi) && std::isfinite(S) && std::isfinite(t0),
            "params: omega0, phi, S and t0 must be finite");
    if (kind == PotentialKind::harmonic) require(std::isfinite(Omega) && Omega > 0.0, "params: Omega must be positive");
  }

  [[nodiscard]] double period() const { return 2.0 * std::numbers::pi / omega; }

  /// Undriven potential.
  [[nodiscard]] double static_potential(double q) const {
    if (kind == PotentialKind::harmonic) return 0.5 * m * Omega * Omega * q * q;
    const double w2 = omega0 * omega0;
    return -m * w2 * q * q / 4.0 + m * m * w2 * w2 * q * q * q * q / (64.0 * Eb);
  }

  /// -dV/dq of the undriven potential.
  [[nodiscard]] double static_force(double q) const {
    if (kind == PotentialKind::harmonic) return -m * Omega * Omega * q;
    const double w2 = omega0 * omega0;
    return m * w2 * q / 2.0 - m * m * w2 * w2 * q * q * q / (16.0 * Eb);
  }

  /// d(force)/dq, the coupling of the tangent dynamics.
  [[nodiscard]] double force_gradient(double q) const {
    if (kind == PotentialKind::harmonic) return -m * Omega * Omega;
    const double w2 = omega0 * omega0;
    return m * w2 / 2.0 - 3.0 * m * m * w2 * w2 * q * q / (16.0 * Eb);
  }

  [[nodiscard]] double drive(double t) const { return S * std::cos(omega * t + phi); }

  /// Undriven energy p^2/2m + V(q).
  [[nodiscard]] double static_energy(double p, double q) const { return p * p / (2.0 * m) + static_potential(q); }
};

struct PotentialAndForce {
  double V = 0.0;
  double F = 0.0;
};

[[nodiscard]] inline PotentialAndForce potential_and_force(const DrivenQuarticParams& prm, double q, double t) {
  return {prm.static_potential(q) + q * prm.drive(t), prm.static_force(q) - prm.drive(t)};
}

}  // namespace scars::continuum

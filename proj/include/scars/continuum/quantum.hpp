#pragma once

// Quantum propagation of the driven oscillator on a periodic position grid:
// split-operator Floquet matrices, energy-window filtering, Weyl symbols and
// diagonal Wigner propagators on the doubled grid, and the coherent-state
// transport check against the classical discrete map.
//
// Grid conventions (N points, box length L):
//   q_j = -L/2 + j dq,  dq = L/N
//   momentum nodes in FFT order, p_k = 2 pi hbar k / L
//   doubled phase-space grid: q = -L/2 + m dq/2, p = l pi hbar / L (FFT order),
//   0 <= m, l < 2N; images repeat in p with period N pi hbar / L, so the
//   physical window is |p| < p_nyq / 2 with p_nyq = pi hbar N / L.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "scars/continuum/classical.hpp"
#include "scars/continuum/params.hpp"
#include "scars/core/errors.hpp"
#include "scars/core/fft.hpp"
#include "scars/core/field.hpp"
#include "scars/core/parallel.hpp"
#include "scars/weyl/doubled_grid.hpp"

namespace scars::continuum {

using cd = std::complex<double>;

struct PositionGrid {
  Eigen::Index n = 1024;
  double length = 120.0;
  double hbar = 1.5;

  void validate() const {
    require(n >= 4 && (n & (n - 1)) == 0, "grid: N must be a power of two and at least 4");
    require(std::isfinite(length) && length > 0.0, "grid: box length L must be positive");
    require(std::isfinite(hbar) && hbar > 0.0, "grid: hbar must be positive");
  }

  [[nodiscard]] double dq() const { return length / static_cast<double>(n); }
  [[nodiscard]] double dp() const { return 2.0 * std::numbers::pi * hbar / length; }
  [[nodiscard]] double q(Eigen::Index j) const { return -0.5 * length + static_cast<double>(j) * dq(); }
  [[nodiscard]] double p(Eigen::Index k) const {
    return static_cast<double>(k < n / 2 ? k : k - n) * dp();
  }
  /// Largest representable momentum magnitude, pi hbar N / L.
  [[nodiscard]] double p_nyquist() const { return std::numbers::pi * hbar * static_cast<double>(n) / length; }

  /// The studied momentum range must fit twice inside the Nyquist momentum.
  void check_nyquist(double p_max) const {
    require(p_nyquist() >= 2.0 * p_max,
            "grid: Nyquist momentum pi*hbar*N/L must be at least twice the window momentum range");
  }

  [[nodiscard]] Axis doubled_q_axis() const { return {-0.5 * length, 0.5 * dq(), 2 * n, false, false}; }
  [[nodiscard]] Axis doubled_p_axis() const {
    return {0.0, std::numbers::pi * hbar / length, 2 * n, true, true};
  }
};

/// Quantum splitting: order 2 is half-kinetic / potential / half-kinetic
/// with the drive at the substep midpoint; order 4 composes three of them.
struct QuantumScheme {
  int order = 2;
  int steps_per_period = 512;

  void validate() const { Integrator{order, steps_per_period}.validate(); }
  [[nodiscard]] Integrator integrator() const { return {order, steps_per_period}; }
};

namespace detail {

/// Precomputed phase factors for one propagation of `periods` drive periods.
class SplitPropagator {
 public:
  SplitPropagator(const DrivenQuarticParams& prm, const PositionGrid& grid, const QuantumScheme& scheme, double span)
      : n_(grid.n) {
    prm.validate();
    grid.validate();
    scheme.validate();
    const double dt = prm.period() / scheme.steps_per_period;
    const std::int64_t steps = continuum::detail::step_count(span, dt);
    const auto weights = scheme.integrator().substeps();

    std::vector<double> sub;  // substep lengths in time order
    for (std::int64_t k = 0; k < steps; ++k)
      for (double w : weights) sub.push_back(w * dt);

    // Kinetic slots: half of the first substep, merged halves between
    // neighbours, half of the last. Distinct lengths share one phase table.
    std::vector<double> kin(sub.size() + 1, 0.0);
    for (std::size_t s = 0; s < sub.size(); ++s) {
      kin[s] += 0.5 * sub[s];
      kin[s + 1] += 0.5 * sub[s];
    }
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (double tau : kin) {
      auto it = kinetic_tables_.find(tau);
      if (it == kinetic_tables_.end()) {
        fft::cvec table(static_cast<std::size_t>(n_));
        for (Eigen::Index k = 0; k < n_; ++k) {
          const double pk = grid.p(k);
          table[static_cast<std::size_t>(k)] = std::polar(inv_n, -pk * pk * tau / (2.0 * prm.m * grid.hbar));
        }
        it = kinetic_tables_.emplace(tau, std::move(table)).first;
      }
      kinetic_seq_.push_back(&it->second);
    }

    double t = prm.t0;
    potential_.reserve(sub.size());
    for (double h : sub) {
      fft::cvec phase(static_cast<std::size_t>(n_));
      const double tm = t + 0.5 * h;
      for (Eigen::Index j = 0; j < n_; ++j) {
        const double v = potential_and_force(prm, grid.q(j), tm).V;
        phase[static_cast<std::size_t>(j)] = std::polar(1.0, -v * h / grid.hbar);
      }
      potential_.push_back(std::move(phase));
      t += h;
    }
  }

  /// In-place propagation of one state vector.
  void apply(fft::cvec& psi, fft::Plan& plan) const {
    fft::cvec work(psi.size());
    for (std::size_t s = 0; s < kinetic_seq_.size(); ++s) {
      plan.forward(work, psi);
      const fft::cvec& k = *kinetic_seq_[s];
      for (std::size_t i = 0; i < work.size(); ++i) work[i] *= k[i];
      plan.inverse(psi, work);
      if (s < potential_.size()) {
        const fft::cvec& v = potential_[s];
        for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= v[i];
      }
    }
  }

 private:
  Eigen::Index n_;
  std::map<double, fft::cvec> kinetic_tables_;
  std::vector<const fft::cvec*> kinetic_seq_;
  std::vector<fft::cvec> potential_;
};

}  // namespace detail

/// Evolves a grid state (unit vector norm) over `span` time units from t0.
[[nodiscard]] inline Eigen::VectorXcd propagate_state(const DrivenQuarticParams& prm, const PositionGrid& grid,
                                                      const QuantumScheme& scheme, const Eigen::VectorXcd& psi0,
                                                      double span) {
  require(psi0.size() == grid.n, "propagate: state size must equal N");
  const detail::SplitPropagator prop(prm, grid, scheme, span);
  fft::cvec psi(psi0.data(), psi0.data() + psi0.size());
  fft::Plan plan;
  prop.apply(psi, plan);
  return Eigen::Map<Eigen::VectorXcd>(psi.data(), grid.n);
}

/// Max-norm residual of K^dagger K - I.
[[nodiscard]] inline double unitarity_residual(const Eigen::MatrixXcd& k) {
  return (k.adjoint() * k - Eigen::MatrixXcd::Identity(k.rows(), k.cols())).cwiseAbs().maxCoeff();
}

struct FloquetOperator {
  DrivenQuarticParams params;
  PositionGrid grid;
  QuantumScheme scheme;
  Eigen::MatrixXcd matrix;  // matrix(j, k) = <q_j| K |q_k>
  double unitarity = 0.0;
};

/// One-period propagator assembled column by column.
[[nodiscard]] inline FloquetOperator build_floquet(const DrivenQuarticParams& prm, const PositionGrid& grid,
                                                   const QuantumScheme& scheme, unsigned threads = 1,
                                                   double tolerance = 1e-8) {
  const detail::SplitPropagator prop(prm, grid, scheme, prm.period());
  FloquetOperator op{prm, grid, scheme, Eigen::MatrixXcd(grid.n, grid.n), 0.0};
  parallel_for(static_cast<std::size_t>(grid.n), threads, [&](std::size_t col) {
    fft::Plan plan;
    fft::cvec psi(static_cast<std::size_t>(grid.n), cd(0.0, 0.0));
    psi[col] = 1.0;
    prop.apply(psi, plan);
    for (Eigen::Index j = 0; j < grid.n; ++j) op.matrix(j, static_cast<Eigen::Index>(col)) = psi[static_cast<std::size_t>(j)];
  });
  op.unitarity = unitarity_residual(op.matrix);
  if (!(op.unitarity < tolerance)) throw numerical_error("floquet: unitarity residual above tolerance");
  return op;
}

/// Max-norm change of the Floquet matrix when the step count is doubled.
[[nodiscard]] inline double floquet_step_convergence(const DrivenQuarticParams& prm, const PositionGrid& grid,
                                                     const QuantumScheme& scheme, unsigned threads = 1) {
  const auto coarse = build_floquet(prm, grid, scheme, threads);
  const auto fine = build_floquet(prm, grid, {scheme.order, 2 * scheme.steps_per_period}, threads);
  return (coarse.matrix - fine.matrix).cwiseAbs().maxCoeff();
}

/// Undriven grid Hamiltonian (real symmetric): spectral kinetic term plus V0(q).
[[nodiscard]] inline Eigen::MatrixXd grid_hamiltonian(const DrivenQuarticParams& prm, const PositionGrid& grid) {
  const Eigen::Index n = grid.n;
  // Kinetic matrix element depends on j - k only: T(d) = (1/N) sum_k p_k^2/2m e^{i p_k d dq / hbar}.
  Eigen::VectorXcd row(n);
  {
    fft::cvec in(static_cast<std::size_t>(n)), out(in.size());
    for (Eigen::Index k = 0; k < n; ++k) {
      const double pk = grid.p(k);
      in[static_cast<std::size_t>(k)] = pk * pk / (2.0 * prm.m) / static_cast<double>(n);
    }
    fft::Plan plan;
    plan.inverse(out, in);
    for (Eigen::Index d = 0; d < n; ++d) row(d) = out[static_cast<std::size_t>(d)];
  }
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) h(j, k) = row((j - k + n) % n).real();
  for (Eigen::Index j = 0; j < n; ++j) h(j, j) += prm.static_potential(grid.q(j));
  return h;
}

/// sqrt(f(H0)) K sqrt(f(H0)) with the Fermi window f of the undriven grid
/// Hamiltonian; width <= 0 returns K unchanged.
[[nodiscard]] inline Eigen::MatrixXcd energy_filter(const Eigen::MatrixXcd& k, const DrivenQuarticParams& prm,
                                                    const PositionGrid& grid, const EnergyWeight& window) {
  if (window.width <= 0.0) return k;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(grid_hamiltonian(prm, grid));
  if (eig.info() != Eigen::Success) throw numerical_error("energy filter: eigensolver failed");
  Eigen::VectorXd w(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i)
    w(i) = std::sqrt(fermi_weight(eig.eigenvalues()(i), window.cut, window.width));
  const Eigen::MatrixXd root = eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::MatrixXcd rc = root.cast<cd>();
  return rc * k * rc;
}

/// Weyl symbol of a grid operator on the doubled grid (open chords).
[[nodiscard]] inline ComplexField weyl_propagator(const Eigen::MatrixXcd& op, const PositionGrid& grid) {
  require(op.rows() == grid.n && op.cols() == grid.n, "weyl propagator: operator size must equal N");
  return {grid.doubled_q_axis(), grid.doubled_p_axis(), weyl::symbol(op, weyl::ChordTopology::open)};
}

struct ContinuumDiagonalField {
  RealField field;  // grid values sum to |tr K|^2
  double imag_residual = 0.0;
  double trace_residual = 0.0;  // relative, against |tr K|^2 of the operator
};

/// Diagonal Wigner propagator of a symbol (no operator to compare against).
[[nodiscard]] inline ContinuumDiagonalField continuum_diagonal_field(const ComplexField& sym) {
  auto g = weyl::diagonal_field(sym.values, weyl::ChordTopology::open);
  return {{sym.q, sym.p, std::move(g.values)}, g.imag_residual, 0.0};
}

/// Diagonal Wigner propagator of an operator, with the trace identity and
/// reality asserted to `tolerance`.
[[nodiscard]] inline ContinuumDiagonalField continuum_diagonal_field(const Eigen::MatrixXcd& op,
                                                                     const PositionGrid& grid,
                                                                     double tolerance = 1e-8) {
  ContinuumDiagonalField f = continuum_diagonal_field(weyl_propagator(op, grid));
  f.trace_residual = weyl::relative_residual(f.field.values.sum(), std::norm(op.trace()));
  if (!(f.trace_residual < tolerance)) throw numerical_error("diagonal field: trace identity residual above tolerance");
  if (!(f.imag_residual < tolerance)) throw numerical_error("diagonal field: imaginary residue above tolerance");
  return f;
}

/// Eigenphases of a unitary matrix in [0, 2 pi), ascending.
[[nodiscard]] inline std::vector<double> eigenphases(const Eigen::MatrixXcd& u) {
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, false);
  if (es.info() != Eigen::Success) throw numerical_error("eigenphases: eigensolver did not converge");
  std::vector<double> theta;
  theta.reserve(static_cast<std::size_t>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    double a = std::arg(es.eigenvalues()(i));
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    if (a >= 2.0 * std::numbers::pi) a -= 2.0 * std::numbers::pi;
    theta.push_back(a);
  }
  std::sort(theta.begin(), theta.end());
  return theta;
}

/// Normalized grid Gaussian (unit vector norm) centered at (q0, p0) of width sigma.
[[nodiscard]] inline Eigen::VectorXcd coherent_state(const PositionGrid& grid, double q0, double p0, double sigma) {
  Eigen::VectorXcd psi(grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    const double x = grid.q(j) - q0;
    psi(j) = std::polar(std::exp(-x * x / (2.0 * sigma * sigma)), p0 * x / grid.hbar);
  }
  return psi / psi.norm();
}

/// Wigner function of a pure grid state on the doubled grid, normalized so
/// that the sum times the doubled-grid cell area is one.
[[nodiscard]] inline RealField wigner_function(const Eigen::VectorXcd& psi, const PositionGrid& grid) {
  const Eigen::MatrixXcd rho = psi * psi.adjoint();
  const ComplexField s = weyl_propagator(rho, grid);
  return {s.q, s.p, s.values.real() * (2.0 / (std::numbers::pi * grid.hbar))};
}

struct TransportReport {
  double l1_error = 0.0;    // sum |W_quantum - W_classical| * cell area over |p| < p_nyq / 2
  double quantum_norm = 0.0;
  double classical_norm = 0.0;
};

/// Quantum versus classical transport of a coherent-state Wigner function
/// over `span` time units: the quantum state is split-operator propagated,
/// the classical density is pulled back along the inverse discrete map.
[[nodiscard]] inline TransportReport coherent_state_transport_check(const DrivenQuarticParams& prm,
                                                                    const PositionGrid& grid,
                                                                    const QuantumScheme& scheme, double sigma,
                                                                    double q0, double p0, double span,
                                                                    unsigned threads = 1) {
  grid.validate();
  require(sigma > 2.0 * grid.dq() && sigma < 0.25 * grid.length, "transport: sigma is not resolved by the grid");
  require(grid.hbar / sigma < 0.25 * grid.p_nyquist(), "transport: momentum width is not resolved by the grid");
  const Eigen::VectorXcd psi = propagate_state(prm, grid, scheme, coherent_state(grid, q0, p0, sigma), span);
  const RealField wq = wigner_function(psi, grid);

  const double dt = prm.period() / scheme.steps_per_period;
  const double cell = wq.cell_area();
  const double p_cut = 0.5 * grid.p_nyquist();
  std::vector<double> err(static_cast<std::size_t>(wq.q.size)), nq(err.size()), nc(err.size());
  parallel_for(err.size(), threads, [&](std::size_t i) {
    const double q = wq.q.coord(static_cast<Eigen::Index>(i));
    for (Eigen::Index l = 0; l < wq.p.size; ++l) {
      const double p = wq.p.coord(l);
      if (std::abs(p) >= p_cut) continue;
      PhasePoint r{p, q, prm.t0 + span};
      if (span != 0.0) r = integrate(prm, r, prm.t0, -dt, scheme.order);
      const double dx = r.q - q0, dk = r.p - p0;
      const double wc = std::exp(-dx * dx / (sigma * sigma) - dk * dk * sigma * sigma / (grid.hbar * grid.hbar)) /
                        (std::numbers::pi * grid.hbar);
      const double w = wq.values(static_cast<Eigen::Index>(i), l);
      err[i] += std::abs(w - wc) * cell;
      nq[i] += w * cell;
      nc[i] += wc * cell;
    }
  });
  TransportReport rep;
  for (std::size_t i = 0; i < err.size(); ++i) {
    rep.l1_error += err[i];
    rep.quantum_norm += nq[i];
    rep.classical_norm += nc[i];
  }
  return rep;
}

/// Periodic Gaussian blur of a field with physical width `width` along both axes.
[[nodiscard]] inline Eigen::MatrixXd gaussian_blur(const RealField& f, double width) {
  Eigen::MatrixXcd w = f.values.cast<cd>();
  fft::forward2(w);
  const Eigen::Index nr = w.rows(), nc = w.cols();
  for (Eigen::Index a = 0; a < nr; ++a) {
    const double ka = 2.0 * std::numbers::pi * static_cast<double>(a < (nr + 1) / 2 ? a : a - nr) /
                      (static_cast<double>(nr) * f.q.step);
    for (Eigen::Index b = 0; b < nc; ++b) {
      const double kb = 2.0 * std::numbers::pi * static_cast<double>(b < (nc + 1) / 2 ? b : b - nc) /
                        (static_cast<double>(nc) * f.p.step);
      w(a, b) *= std::exp(-0.5 * width * width * (ka * ka + kb * kb));
    }
  }
  fft::inverse2(w);
  return w.real() / static_cast<double>(nr * nc);
}

/// L1 distance between two fields after each is normalized to unit sum.
[[nodiscard]] inline double normalized_l1(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "normalized L1: shapes differ");
  const double sa = a.sum(), sb = b.sum();
  require(sa != 0.0 && sb != 0.0, "normalized L1: a field sums to zero");
  return (a / sa - b / sb).cwiseAbs().sum();
}

/// Zeroes every node outside the closed (q, p) rectangle.
[[nodiscard]] inline Eigen::MatrixXd mask_window(const RealField& f, double q_min, double q_max, double p_min,
                                                 double p_max) {
  Eigen::MatrixXd out = f.values;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double q = f.q.coord(i);
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      const double p = f.p.coord(j);
      if (q < q_min || q > q_max || p < p_min || p > p_max) out(i, j) = 0.0;
    }
  }
  return out;
}

}  // namespace scars::continuum

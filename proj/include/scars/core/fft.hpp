#pragma once

// Thin wrappers over Eigen's FFT module (kissfft backend, any length).
// Forward transforms use exp(-2 pi i k n / N); inverses are unscaled so the
// callers own every normalization constant.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

namespace scars::fft {

using cvec = std::vector<std::complex<double>>;

class Plan {
 public:
  Plan() { engine_.SetFlag(Eigen::FFT<double>::Unscaled); }

  void forward(cvec& out, const cvec& in) { engine_.fwd(out, in); }
  void inverse(cvec& out, const cvec& in) { engine_.inv(out, in); }

 private:
  Eigen::FFT<double> engine_;
};

/// Transforms every column of `m` in place.
inline void columns(Eigen::MatrixXcd& m, bool inverse = false) {
  Plan plan;
  cvec in(static_cast<std::size_t>(m.rows()));
  cvec out(in.size());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) in[static_cast<std::size_t>(r)] = m(r, c);
    inverse ? plan.inverse(out, in) : plan.forward(out, in);
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = out[static_cast<std::size_t>(r)];
  }
}

/// Transforms every row of `m` in place.
inline void rows(Eigen::MatrixXcd& m, bool inverse = false) {
  Plan plan;
  cvec in(static_cast<std::size_t>(m.cols()));
  cvec out(in.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) in[static_cast<std::size_t>(c)] = m(r, c);
    inverse ? plan.inverse(out, in) : plan.forward(out, in);
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = out[static_cast<std::size_t>(c)];
  }
}

inline void forward2(Eigen::MatrixXcd& m) {
  columns(m);
  rows(m);
}

inline void inverse2(Eigen::MatrixXcd& m) {
  columns(m, true);
  rows(m, true);
}

}  // namespace scars::fft

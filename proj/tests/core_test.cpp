#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <vector>

#include "scars/core/errors.hpp"
#include "scars/core/fft.hpp"
#include "scars/core/field.hpp"
#include "scars/core/parallel.hpp"

using namespace scars;

TEST(Fft, RoundTripIsUnscaled) {
  fft::Plan plan;
  fft::cvec x{{1, 0}, {2, -1}, {0, 3}, {-1, 1}, {0.5, 0}, {0, 0}};
  fft::cvec y, z;
  plan.forward(y, x);
  plan.inverse(z, y);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT(std::abs(z[i] - 6.0 * x[i]), 1e-12);
  // Forward sign convention exp(-2 pi i k n / N).
  fft::cvec delta(8, 0.0), out;
  delta[1] = 1.0;
  plan.forward(out, delta);
  for (int k = 0; k < 8; ++k) EXPECT_LT(std::abs(out[k] - std::polar(1.0, -2 * std::numbers::pi * k / 8)), 1e-12);
}

TEST(Fft, TwoDimensionalRoundTrip) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(6, 10);
  Eigen::MatrixXcd w = m;
  fft::forward2(w);
  EXPECT_NEAR(std::abs(w(0, 0) - m.sum()), 0.0, 1e-12);
  fft::inverse2(w);
  EXPECT_LT((w / 60.0 - m).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Parallel, CoversEveryIndexOnceAndPropagatesErrors) {
  for (unsigned threads : {1u, 3u, 8u}) {
    std::vector<int> hits(101, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
  EXPECT_THROW(parallel_for(10, 4, [](std::size_t i) { require(i != 7, "boom"); }), validation_error);
}

TEST(Axis, CoordinatesNearestAndOrder) {
  const Axis a{-1.0, 0.5, 5, false, false};
  EXPECT_DOUBLE_EQ(a.coord(4), 1.0);
  EXPECT_EQ(a.nearest(0.2), 2);
  EXPECT_EQ(a.nearest(5.0), -1);
  const Axis f{0.0, 1.0, 6, true, true};
  EXPECT_DOUBLE_EQ(f.coord(5), -1.0);
  EXPECT_DOUBLE_EQ(f.coord(3), -3.0);
  EXPECT_EQ(f.nearest(-1.0), 5);
  EXPECT_EQ(f.distance(0, 5), 1);
  const auto order = f.ascending_order();
  for (std::size_t i = 1; i < order.size(); ++i) EXPECT_LT(f.coord(order[i - 1]), f.coord(order[i]));
}

TEST(Field, AscendingAndWindow) {
  RealField f{{0.0, 1.0, 3, false, false}, {0.0, 1.0, 4, true, true}, Eigen::MatrixXd(3, 4)};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) f.values(i, j) = 10 * i + f.p.coord(j);
  const auto a = f.ascending();
  EXPECT_DOUBLE_EQ(a.p.origin, -2.0);
  EXPECT_FALSE(a.p.fft_order);
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(a.values(1, j), 10 + (j - 2));
  const auto w = f.window(1.0, 2.0, -1.0, 0.0);
  EXPECT_EQ(w.values.rows(), 2);
  EXPECT_EQ(w.values.cols(), 2);
  EXPECT_DOUBLE_EQ(w.values(0, 0), 9.0);
  EXPECT_THROW((void)f.window(5.0, 6.0, 0.0, 1.0), validation_error);
  EXPECT_DOUBLE_EQ(f.cell_area(), 1.0);
}

TEST(Field, MedianQuantileJaccard) {
  Eigen::MatrixXd v(2, 2);
  v << -4, 1, 2, 3;
  EXPECT_DOUBLE_EQ(median_abs(v), 2.5);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(10, 10), b = a;
  a(0, 0) = b(0, 0) = 1.0;
  a(1, 1) = 1.0;
  b(2, 2) = 1.0;
  // Top 2 percent: {00, 11} versus {00, 22}.
  EXPECT_NEAR(top_fraction_jaccard(a, b, 0.02), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(top_fraction_jaccard(a, a, 0.02), 1.0, 1e-12);
  EXPECT_THROW((void)top_fraction_jaccard(a, Eigen::MatrixXd::Zero(3, 3), 0.1), validation_error);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "scars/continuum/classical.hpp"
#include "scars/continuum/midpoints.hpp"

using namespace scars::continuum;

namespace {

DrivenQuarticParams paper() { return {}; }

DrivenQuarticParams undriven() {
  DrivenQuarticParams p;
  p.S = 0.0;
  return p;
}

}  // namespace

TEST(Potential, DoubleWellMinimaAndOrigin) {
  const auto p = undriven();
  const auto origin = potential_and_force(p, 0.0, 1.3);
  EXPECT_EQ(origin.V, 0.0);
  EXPECT_EQ(origin.F, 0.0);
  const double qmin = std::sqrt(8.0 * p.Eb / (p.m * p.omega0 * p.omega0));
  EXPECT_NEAR(potential_and_force(p, qmin, 0.0).V, -p.Eb, 1e-12 * p.Eb);
  EXPECT_NEAR(potential_and_force(p, -qmin, 0.0).F, 0.0, 1e-12);
  EXPECT_NO_THROW(paper().validate());
}

TEST(Potential, ForceIsMinusGradient) {
  const auto p = paper();
  for (double q : {-40.0, -3.0, 0.5, 17.0, 39.0}) {
    const double h = 1e-5;
    const double fd = -(potential_and_force(p, q + h, 0.7).V - potential_and_force(p, q - h, 0.7).V) / (2 * h);
    EXPECT_NEAR(potential_and_force(p, q, 0.7).F, fd, 1e-6 * std::max(1.0, std::abs(fd)));
    const double gd = (p.static_force(q + h) - p.static_force(q - h)) / (2 * h);
    EXPECT_NEAR(p.force_gradient(q), gd, 1e-6 * std::max(1.0, std::abs(gd)));
  }
}

TEST(Params, RejectsInvalidValues) {
  auto p = paper();
  p.m = 0.0;
  EXPECT_THROW(p.validate(), scars::validation_error);
  p = paper();
  p.Eb = -1.0;
  EXPECT_THROW(p.validate(), scars::validation_error);
  p = paper();
  p.omega = 0.0;
  EXPECT_THROW(p.validate(), scars::validation_error);
}

TEST(Integrate, EquilibriumStaysPut) {
  const auto p = undriven();
  const double qmin = std::sqrt(8.0 * p.Eb);
  const auto s = integrate(p, {0.0, qmin, 0.0}, 10 * p.period(), p.period() / 2048);
  EXPECT_NEAR(s.q, qmin, 1e-10);
  EXPECT_NEAR(s.p, 0.0, 1e-10);
}

TEST(Integrate, EnergyDriftBelowTolerance) {
  const auto p = undriven();
  for (const PhasePoint start : {PhasePoint{3.0, 30.0, 0.0}, PhasePoint{12.0, -20.0, 0.0}, PhasePoint{0.5, 1.0, 0.0}}) {
    const double e0 = p.static_energy(start.p, start.q);
    const auto s = integrate(p, start, 10 * p.period(), p.period() / 2048);
    EXPECT_LT(std::abs(p.static_energy(s.p, s.q) - e0) / std::abs(e0), 1e-8);
  }
}

TEST(Integrate, ConvergenceOrderMatchesScheme) {
  const auto p = paper();
  for (int order : {2, 4}) {
    auto run = [&](int steps) { return integrate(p, {4.0, 30.0, 0.0}, p.period(), p.period() / steps, order); };
    const auto ref = run(16384);
    const auto a = run(256), b = run(512);
    const double ea = std::hypot(a.p - ref.p, a.q - ref.q);
    const double eb = std::hypot(b.p - ref.p, b.q - ref.q);
    EXPECT_NEAR(std::log2(ea / eb), order, 0.3) << "order " << order;
  }
}

TEST(Integrate, BackwardInvertsForward) {
  const auto p = paper();
  const double dt = p.period() / 512;
  const auto fwd = integrate(p, {2.0, 25.0, 0.0}, p.period(), dt);
  const auto back = integrate(p, fwd, 0.0, -dt);
  EXPECT_NEAR(back.p, 2.0, 1e-9);
  EXPECT_NEAR(back.q, 25.0, 1e-9);
  EXPECT_THROW((void)integrate(p, {0, 0, 0}, 1.0, 0.3), scars::validation_error);
}

TEST(Tangent, IdentityAtZeroTimeAndSymplectic) {
  const auto p = paper();
  const auto z = tangent_integrate(p, {1.0, 2.0, 0.0}, 0.0, 0.1);
  EXPECT_TRUE(z.monodromy.isApprox(Eigen::Matrix2d::Identity()));
  const auto r = tangent_integrate(p, {3.0, 35.0, 0.0}, p.period(), p.period() / 2048);
  EXPECT_NEAR(r.monodromy.determinant(), 1.0, 1e-6);
}

TEST(Tangent, MatchesFiniteDifferences) {
  const auto p = paper();
  const double dt = p.period() / 1024, h = 1e-5;
  const PhasePoint x{3.0, 35.0, 0.0};
  const auto r = tangent_integrate(p, x, p.period(), dt);
  auto flow = [&](double dp, double dq) { return integrate(p, {x.p + dp, x.q + dq, 0.0}, p.period(), dt); };
  const auto pp = flow(h, 0), pm = flow(-h, 0), qp = flow(0, h), qm = flow(0, -h);
  Eigen::Matrix2d fd;
  fd << (pp.p - pm.p) / (2 * h), (qp.p - qm.p) / (2 * h), (pp.q - pm.q) / (2 * h), (qp.q - qm.q) / (2 * h);
  EXPECT_LT((fd - r.monodromy).cwiseAbs().maxCoeff(), 1e-5 * r.monodromy.cwiseAbs().maxCoeff());
}

TEST(Section, EllipticPointRepeatsAndLevelCurvesConserveEnergy) {
  const auto p = undriven();
  const Integrator sch{4, 1024};
  const double qmin = std::sqrt(8.0 * p.Eb);
  const auto fixed = stroboscopic_section(p, sch, {{0.0, qmin, 0.0}}, 5);
  ASSERT_EQ(fixed.points.size(), 6u);
  for (const auto& s : fixed.points) EXPECT_NEAR(s.q, qmin, 1e-9);
  const auto cloud = stroboscopic_section(p, sch, {{2.0, 30.0, 0.0}}, 20, 2);
  const double e0 = p.static_energy(2.0, 30.0);
  for (const auto& s : cloud.points) EXPECT_NEAR(p.static_energy(s.p, s.q), e0, 1e-7 * std::abs(e0));
  EXPECT_EQ(cloud.dropped, 0u);
}

TEST(Section, DivergingSeedsAreDropped) {
  const auto p = paper();
  const auto cloud = stroboscopic_section(p, {2, 256}, {{1e4, 1e4, 0.0}, {0.0, 38.0, 0.0}}, 3, 1, 1e3);
  EXPECT_EQ(cloud.dropped, 1u);
  EXPECT_EQ(cloud.points.size(), 4u);
}

TEST(PeriodicSearch, UndrivenEquilibriumIsElliptic) {
  const auto p = undriven();
  const double qmin = std::sqrt(8.0 * p.Eb);
  const auto res = find_periodic_points(p, {4, 1024}, {{0.3, qmin + 0.5, 0.0}, {0.31, qmin + 0.5, 0.0}}, 1);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_NEAR(res.records[0].point.q, qmin, 1e-8);
  EXPECT_EQ(res.records[0].kind, StabilityKind::elliptic);
}

TEST(PeriodicSearch, PaperParametersGiveEllipticAndHyperbolicPoints) {
  const auto p = paper();
  const Integrator sch{4, 2048};
  const std::vector<PhasePoint> guesses{{0.6, 38.8, 0}, {-9.6, 41.8, 0}, {6.85, 32.3, 0}, {0.0, 0.0, 0}};
  const auto res = find_periodic_points(p, sch, guesses, 1, {}, 2);
  ASSERT_EQ(res.records.size(), 4u);
  int elliptic = 0, hyperbolic = 0;
  for (const auto& r : res.records) {
    EXPECT_LT(r.residual, 1e-10);
    EXPECT_NEAR(r.monodromy.determinant(), 1.0, 1e-6);
    (r.kind == StabilityKind::elliptic ? elliptic : hyperbolic) += 1;
  }
  EXPECT_EQ(elliptic, 2);
  EXPECT_EQ(hyperbolic, 2);
  EXPECT_NEAR(res.records[3].point.q, 41.8169, 1e-3);
}

TEST(Liouville, UniformAtZeroTimeAndNonNegative) {
  const auto p = paper();
  const scars::Axis qa{20.0, 1.0, 8, false, false}, pa{-4.0, 1.0, 9, false, false};
  const auto f0 = liouville_diagonal(p, {4, 256}, qa, pa, 0.0, 0.5);
  EXPECT_NEAR(f0.values.maxCoeff(), gaussian_kernel(0.0, 0.5), 1e-15);
  EXPECT_NEAR(f0.values.minCoeff(), gaussian_kernel(0.0, 0.5), 1e-15);
  const auto f1 = liouville_diagonal(p, {4, 256}, qa, pa, p.period(), 0.5, {}, 2);
  EXPECT_GE(f1.values.minCoeff(), 0.0);
}

TEST(Liouville, SmallStepRidgesAlongEquilibria) {
  const auto p = undriven();
  const double qmin = std::sqrt(8.0 * p.Eb);
  const scars::Axis qa{qmin - 2.0, 0.5, 9, false, false}, pa{-2.0, 0.5, 9, false, false};
  const auto f = liouville_diagonal(p, {2, 2048}, qa, pa, p.period() / 2048, 0.01);
  Eigen::Index i, j;
  f.values.maxCoeff(&i, &j);
  EXPECT_NEAR(qa.coord(i), qmin, 1e-12);
  EXPECT_NEAR(pa.coord(j), 0.0, 1e-12);
}

TEST(ReturnProbability, ZeroTimeIsKernelPeakAndStable) {
  const auto p = paper();
  const auto r0 = classical_return_probability(p, {2, 256}, -150.0, -100.0, 0.0, 0.5, 2000, 1);
  EXPECT_NEAR(r0.value, gaussian_kernel(0.0, 0.5), 1e-12);
  const auto a = classical_return_probability(p, {2, 256}, -150.0, -100.0, p.period(), 2.0, 20000, 3, 2);
  const auto b = classical_return_probability(p, {2, 256}, -150.0, -100.0, p.period(), 2.0, 40000, 4, 2);
  EXPECT_GT(a.value, 0.0);
  EXPECT_LT(std::abs(a.value - b.value), 2.0 * std::hypot(a.standard_error, b.standard_error) + 1e-12);
  const auto c = classical_return_probability(p, {2, 256}, -150.0, -100.0, p.period(), 2.0, 20000, 3, 1);
  EXPECT_EQ(a.value, c.value);
  EXPECT_THROW((void)classical_return_probability(p, {2, 256}, -500.0, -400.0, 1.0, 1.0, 100, 1), scars::validation_error);
}

TEST(ReturnProbability, UndrivenLongTimeAverageIsPositive) {
  const auto p = undriven();
  double avg = 0.0;
  for (int k = 1; k <= 8; ++k)
    avg += classical_return_probability(p, {2, 128}, -180.0, -150.0, k * p.period(), 1.0, 4000, 11).value / 8.0;
  EXPECT_GT(avg, 0.0);
}

namespace {

std::vector<Vec<2>> planar_curve(int m, double a) {
  std::vector<Vec<2>> out;
  for (int i = 0; i < m; ++i) {
    const double s = 2.0 * std::numbers::pi * i / m;
    out.push_back({std::cos(s) + a * std::cos(2 * s), std::sin(s) - a * std::sin(2 * s)});
  }
  return out;
}

}  // namespace

TEST(MidpointSurface, TwoSamplesGiveSingleVertex) {
  const auto s = midpoint_surface<2>({{0.0, 0.0}, {2.0, 4.0}});
  ASSERT_EQ(s.vertices.size(), 1u);
  EXPECT_EQ(s.vertices[0], (Vec<2>{1.0, 2.0}));
  EXPECT_TRUE(s.faces.empty());
}

TEST(MidpointSurface, SwapSymmetryAndClosure) {
  const auto s = midpoint_surface<3>([] {
    std::vector<Vec<3>> c;
    for (int i = 0; i <= 40; ++i) {
      const double t = 2.0 * std::numbers::pi * i / 40;
      c.push_back({std::cos(t), std::sin(2 * t), std::sin(t)});
    }
    return c;
  }());
  EXPECT_EQ(s.samples(), 40u);  // repeated endpoint dropped
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 40; ++j) EXPECT_EQ(s.at(i, j), s.at(j, i));
  EXPECT_EQ(s.vertices.size(), 40u * 39u / 2u);
  EXPECT_THROW((void)midpoint_surface<2>({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}), scars::validation_error);
}

TEST(MidpointSurface, CircleCoversDiskOnce) {
  const auto s = midpoint_surface<2>(planar_curve(180, 0.0));
  EXPECT_EQ(leaf_count(s, 0.31, 0.17), 1);
  EXPECT_EQ(leaf_count(s, -0.52, 0.41), 1);
  EXPECT_EQ(leaf_count(s, 1.2, 0.0), 0);
}

TEST(MidpointSurface, NonSymmetricCurveHasThreeLeavesNearCenter) {
  const auto s = midpoint_surface<2>(planar_curve(240, 0.2));
  EXPECT_EQ(leaf_count(s, 0.013, 0.007), 3);
  EXPECT_EQ(leaf_count(s, 0.0, 0.75), 1);
}

TEST(MidpointSurface, ObjExport) {
  const auto s = midpoint_surface<2>(planar_curve(6, 0.0));
  std::ostringstream out;
  write_obj(out, s);
  const std::string t = out.str();
  std::size_t v = 0, f = 0;
  std::istringstream in(t);
  for (std::string line; std::getline(in, line);) {
    v += line.rfind("v ", 0) == 0;
    f += line.rfind("f ", 0) == 0;
  }
  EXPECT_EQ(v, s.vertices.size());
  EXPECT_EQ(f, s.faces.size());
}

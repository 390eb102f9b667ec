#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rfio/coeffs.hpp"

using namespace rfio;

namespace {
const TorusGrid kGrid(1, 64, 2 * kPi);
}

TEST(Profile, Constant) {
  const auto p = make_profile(ProfileKind::Constant, kGrid, {{"c", 2.0}});
  for (const auto& v : p.nodes) EXPECT_TRUE((v.array() == 2.0).all());
  for (double l : p.lip) EXPECT_EQ(l, 0.0);
  EXPECT_TRUE(p.constant());
}

TEST(Profile, SawtoothRangeAndSlope) {
  const TorusGrid g(1, 128, 2 * kPi);
  const auto p = make_profile(ProfileKind::Sawtooth, g, {{"base", 1.0}, {"amp", 0.25}, {"teeth", 4}});
  EXPECT_NEAR(p.a[0].min(), 0.75, 1e-12);
  EXPECT_NEAR(p.a[0].max(), 1.25, 1e-12);
  const double slope = 4 * 0.25 / (2 * kPi / 4);
  EXPECT_NEAR(p.lip[0], slope, 1e-12);
}

TEST(Profile, RandomLipschitzRespectsCap) {
  const TorusGrid g(1, 256, 2 * kPi);
  const auto p = make_profile(ProfileKind::RandomLipschitz, g, {{"amp", 0.4}, {"cap", 0.5}}, 7);
  for (double l : p.lip) EXPECT_LE(l, 0.5 + 1e-12);
}

TEST(Profile, RejectsNonPositive) {
  EXPECT_THROW(make_profile(ProfileKind::Sawtooth, kGrid, {{"base", 0.2}, {"amp", 0.3}}), Error);
}

TEST(Profile, HashIsStable) {
  const auto a = make_profile(ProfileKind::Sawtooth, kGrid, {{"amp", 0.2}});
  const auto b = make_profile(ProfileKind::Sawtooth, kGrid, {{"amp", 0.2}});
  const auto c = make_profile(ProfileKind::Sawtooth, kGrid, {{"amp", 0.21}});
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
}

TEST(Primitive, UnitAndScaled) {
  const PrimitiveMap one(Coefficient1D::constant(1.0, 2 * kPi)), two(Coefficient1D::constant(2.0, 2 * kPi));
  for (double x : {0.0, 0.3, 1.7, 5.0}) {
    EXPECT_NEAR(one.phi(x), x, 1e-14);
    EXPECT_NEAR(two.phi(x), x / 2, 1e-14);
  }
}

TEST(Primitive, SawtoothMatchesQuadrature) {
  const auto p = make_profile(ProfileKind::Sawtooth, kGrid, {{"amp", 0.25}});
  const auto& a = p.a[0];
  const PrimitiveMap pm(a);
  for (double x : {0.1, 0.9, 2.5, 4.0, 6.2}) {
    // Panels break at the kinks (multiples of pi / 8), where 1 / a is smooth.
    double ref = 0;
    for (double lo = 0; lo < x; lo += kPi / 8)
      ref += boost::math::quadrature::gauss_kronrod<double, 15>::integrate([&](double y) { return 1 / a(y); }, lo,
                                                                          std::min(x, lo + kPi / 8), 0, 0);
    EXPECT_NEAR(pm.phi(x), ref, 1e-10);
    EXPECT_NEAR(pm.phi_inverse(pm.phi(x)), x, 1e-11);
  }
}

TEST(Flow, UnitSpeedAndZeroTime) {
  const PrimitiveMap pm(Coefficient1D::constant(1.0, 2 * kPi));
  EXPECT_NEAR(flow_chi(pm, 0.4, 1.0), 1.4, 1e-13);
  const auto p = make_profile(ProfileKind::Sawtooth, kGrid, {{"amp", 0.25}});
  const PrimitiveMap sp(p.a[0]);
  EXPECT_EQ(flow_chi(sp, 0.0, 2.2), 2.2);
}

TEST(Flow, SawtoothMatchesRk4) {
  const auto p = make_profile(ProfileKind::Sawtooth, kGrid, {{"amp", 0.25}});
  const auto& a = p.a[0];
  const PrimitiveMap pm(a);
  for (double x0 : {0.2, 1.3, 3.9}) {
    double y = x0;
    const int steps = 20000;
    const double dt = 0.3 / steps;
    for (int i = 0; i < steps; ++i) {
      const double k1 = a(y), k2 = a(y + 0.5 * dt * k1), k3 = a(y + 0.5 * dt * k2), k4 = a(y + dt * k3);
      y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    EXPECT_NEAR(flow_chi(pm, 0.3, x0), y, 1e-8);
  }
}

TEST(Flow, Jacobian) {
  const PrimitiveMap c(Coefficient1D::constant(3.0, 2 * kPi));
  EXPECT_DOUBLE_EQ(flow_jacobian(c.coefficient(), c, 0.7, 1.0), 1.0);
  const auto p = make_profile(ProfileKind::Sawtooth, kGrid, {{"amp", 0.25}});
  const PrimitiveMap pm(p.a[0]);
  EXPECT_DOUBLE_EQ(flow_jacobian(p.a[0], pm, 0.0, 1.0), 1.0);
  for (double x : {0.3, 2.0}) {  // away from the kinks
    const double h = 1e-4;
    const double fd = (flow_chi(pm, 0.2, x + h) - flow_chi(pm, 0.2, x - h)) / (2 * h);
    EXPECT_NEAR(flow_jacobian(p.a[0], pm, 0.2, x), fd, 1e-6);
  }
}

#include <gtest/gtest.h>

#include "rfio/opnorm.hpp"
#include "rfio/symbols.hpp"
#include "rfio/tent.hpp"

using namespace rfio;

namespace {

TentField ladder_field(const TorusGrid& g, double top, double octaves, std::uint64_t seed) {
  const auto L = log_ladder(top, octaves, 4);
  TentField F{g, L.sigma, L.weight, {}};
  for (std::size_t k = 0; k < L.sigma.size(); ++k) F.values.push_back(random_field(g, seed + k));
  return F;
}

}  // namespace

TEST(Tent, FubiniAtPTwo) {
  const TorusGrid g(2, 32, 2 * kPi);
  const auto F = ladder_field(g, 1.0, 2, 3);
  double ref = 0;
  for (std::size_t k = 0; k < F.sigma.size(); ++k) ref += F.weight[k] * std::pow(l2_norm(F.values[k]), 2);
  const double v = tent_norm(F, 2, TentQ::Two);
  EXPECT_NEAR(v * v / ref, 1.0, 1e-10);
}

TEST(Tent, ConstantSlab) {
  const TorusGrid g(1, 64, 1.0);
  const auto L = log_ladder(0.2, 1, 8);
  TentField F{g, L.sigma, L.weight, {}};
  for (std::size_t k = 0; k < L.sigma.size(); ++k) {
    Field u(g);
    u.comp1.setConstant(1.0);
    F.values.push_back(u);
  }
  double W = 0;
  for (double w : L.weight) W += w;
  EXPECT_NEAR(W, std::log(2.0), 1e-14);
  for (double p : {1.5, 2.0, 4.0}) EXPECT_NEAR(tent_norm(F, p, TentQ::Two), std::sqrt(W), 1e-12);
  EXPECT_NEAR(tent_norm(F, 3, TentQ::Infinity), 1.0, 1e-14);
}

TEST(Tent, SingleCell) {
  const TorusGrid g(2, 32, 2 * kPi);
  const double sig = 0.5;
  TentField F{g, {sig}, {0.7}, {Field(g)}};
  F.values[0].comp1[5 * 32 + 9] = 2.0;
  const int m = tent_box_radius(g, sig);
  ASSERT_GE(m, 0);
  const double side = 2 * m + 1;
  const double count = side * side;
  const double level = std::sqrt(0.7 * 4.0 / (side * side));
  for (double p : {1.5, 3.0}) EXPECT_NEAR(tent_norm(F, p, TentQ::Two), level * std::pow(count * g.cell_volume(), 1 / p), 1e-12);
}

TEST(Tent, DroppedAndClampedScales) {
  const TorusGrid g(1, 32, 2 * kPi);
  bool cl = false;
  EXPECT_EQ(tent_box_radius(g, 0.5 * g.h()), -1);
  tent_box_radius(g, 10.0, &cl);
  EXPECT_TRUE(cl);
}

TEST(Tent, RejectsBadLadder) {
  const TorusGrid g(1, 16, 1.0);
  TentField F{g, {0.1, 0.2}, {1, 1}, {Field(g), Field(g)}};
  EXPECT_THROW(F.validate(), Error);
  EXPECT_THROW(tent_norm(TentField{g, {0.2}, {1}, {Field(g)}}, 1.0, TentQ::Two), Error);
}

TEST(Tent, CarlesonNorm) {
  const TorusGrid g(1, 64, 2 * kPi);
  TentField Z{g, {0.5, 0.25}, {0.3, 0.3}, {Field(g), Field(g)}};
  EXPECT_EQ(carleson_norm(Z), 0.0);
  Z.values[1].comp1.setConstant(1.0);
  const double c = carleson_norm(Z);
  EXPECT_GT(c, 0.0);
  EXPECT_TRUE(std::isfinite(c));
}

TEST(Tent, Atoms) {
  const TorusGrid g(2, 64, 2 * kPi);
  const double r = 0.5;
  const std::vector<double> centre{kPi, kPi};
  const auto L = log_ladder(r, 2, 4);
  TentField A{g, L.sigma, L.weight, {}};
  double cells = 0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const double dx = std::abs(g.coord(i, 0) * g.h() - kPi), dy = std::abs(g.coord(i, 1) * g.h() - kPi);
    if (std::max(dx, dy) <= r) cells += 1;
  }
  double W = 0;
  for (double w : L.weight) W += w;
  const double c = 1 / std::sqrt(std::pow(r, 2) * W * cells * g.cell_volume());
  for (std::size_t k = 0; k < L.sigma.size(); ++k) {
    Field u(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const double dx = std::abs(g.coord(i, 0) * g.h() - kPi), dy = std::abs(g.coord(i, 1) * g.h() - kPi);
      if (std::max(dx, dy) <= r) u.comp1[i] = c;
    }
    A.values.push_back(u);
  }
  const auto ok = atom_check(A, centre, r);
  EXPECT_TRUE(ok.ok);
  EXPECT_NEAR(ok.slack, 0.0, 1e-12);
  TentField B = A;
  for (auto& v : B.values) v *= 2.0;
  EXPECT_FALSE(atom_check(B, centre, r).ok);
  TentField C = A;
  C.values[0].comp1[0] = 0.1;  // far corner of the box
  const auto bad = atom_check(C, centre, r);
  EXPECT_FALSE(bad.ok);
  EXPECT_NE(bad.diagnostic.find("outside"), std::string::npos);
}

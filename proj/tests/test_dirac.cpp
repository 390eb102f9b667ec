#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "rfio/dirac.hpp"
#include "rfio/fft.hpp"
#include "rfio/hpfio.hpp"
#include "rfio/opnorm.hpp"
#include "rfio/phillips.hpp"
#include "rfio/wavepackets.hpp"

using namespace rfio;

namespace {

DiracOperator make_op(int d, int n, ProfileKind k, Coupling c = Coupling::HalfShift, std::map<std::string, double> params = {}) {
  return DiracOperator(make_profile(k, TorusGrid(d, n, 2 * kPi), params, 1), c);
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(Dirac, SquareIsL) {
  for (auto c : {Coupling::Local, Coupling::HalfShift}) {
    const auto op = make_op(2, 16, ProfileKind::Sawtooth, c);
    const Field f = random_field(op.grid(), 2);
    Field s(op.grid());
    for (int j = 0; j < 2; ++j) {
      Vec e = Vec::Zero(2);
      e[j] = 1;
      s += op.apply(e, op.apply(e, f));
    }
    EXPECT_LT(l2_norm(s - op.apply_L(f)) / l2_norm(op.apply_L(f)), 1e-12);
  }
}

TEST(Dirac, ZeroXiIsIdentity) {
  const auto op = make_op(2, 16, ProfileKind::Sawtooth);
  const Field f = random_field(op.grid(), 3);
  EXPECT_LT(l2_norm(op.exp_i(Vec::Zero(2), f) - f), 1e-14);
}

TEST(Dirac, ExpMatchesDense) {
  const auto op = make_op(1, 16, ProfileKind::Sawtooth);
  Vec xi(1);
  xi << 0.7;
  const Field f = random_field(op.grid(), 4);
  const CMat E = (cplx(0, 1) * op.dense(xi)).exp();
  const Field ref = Field::from_stacked(op.grid(), E * f.stacked());
  EXPECT_LT(l2_norm(op.exp_i(xi, f) - ref) / l2_norm(ref), 1e-12);
}

TEST(Dirac, GroupLawConstantAndOneDimensional) {
  const auto c2 = make_op(2, 16, ProfileKind::Constant);
  std::vector<Field> fam{random_field(c2.grid(), 1), random_field(c2.grid(), 2)};
  EXPECT_LT(group_law_probe(c2, vec2(0.6, -0.4), vec2(0.3, 0.5), fam, false).defect, 1e-8);
  const auto v1 = make_op(1, 64, ProfileKind::Sawtooth);
  Vec a(1), b(1);
  a << 0.6;
  b << -1.1;
  std::vector<Field> fam1{random_field(v1.grid(), 1)};
  const auto rep = group_law_probe(v1, a, b, fam1, true);
  EXPECT_LT(rep.defect, 1e-8);
  EXPECT_LT(rep.max_im_lambda, 1e-8);
}

TEST(Dirac, GroupLawVariableIsReported) {
  const auto op = make_op(2, 16, ProfileKind::Sawtooth);
  std::vector<Field> fam{random_field(op.grid(), 1)};
  const auto rep = group_law_probe(op, vec2(0.6, -0.4), vec2(0.3, 0.5), fam, true);
  EXPECT_TRUE(std::isfinite(rep.defect));
  EXPECT_GT(rep.commutativity, 0.0);
  EXPECT_EQ(rep.commutativity, op.profile().commutativity_indicator());
}

TEST(Dirac, UnitSpeedInOneDimension) {
  // The discrete tail spreads a few cells past the light cone; it shrinks in physical units as h does.
  Vec xi(1);
  xi << 1.0;
  double prev = 0;
  for (int n : {128, 256, 512}) {
    const auto op = make_op(1, n, ProfileKind::Constant, Coupling::Local);
    const auto m = measure_speed(op, xi, 12.0);
    EXPECT_LE(m.kappa_hat, 1 + 12 * op.grid().h());
    EXPECT_LT(m.leakage, 1e-8);
    if (prev > 0) EXPECT_LT(m.kappa_hat, prev);
    prev = m.kappa_hat;
  }
}

TEST(Dirac, FourierOracleMatchesExp) {
  const auto op = make_op(2, 16, ProfileKind::Constant);
  const Field f = random_field(op.grid(), 6);
  const Vec xi = vec2(0.4, 0.9);
  const Field ref = op.exp_i(xi, f);
  const Field o = fourier_oracle(op, [&](const Eigen::Vector3d& z) { return std::exp(cplx(0, xi[0] * z[0] + xi[1] * z[1])); }, f);
  EXPECT_LT(l2_norm(o - ref) / l2_norm(ref), 1e-10);
}

TEST(Dirac, PhillipsMatchesOracleForPacket) {
  const auto op = make_op(2, 32, ProfileKind::Constant);
  FrameParams fp;
  fp.octaves = 2;
  const auto frame = std::make_shared<const WavePacketFrame>(build_frame(fp, op.grid()));
  const Field f = band_limited_field(op.grid(), 2 / 0.5, 8);
  PhillipsOptions o;
  o.tail_tol = 1;
  const PhillipsCalculus pc(op, o);
  const auto tab = make_line_table(2, packet_symbol(frame, 0.5), o.radial_nodes);
  const double om = kPi / 4;
  const Field a = pc.apply(SymbolRef{tab, om, 1.0}, f);
  const Field b = fourier_oracle(
      op, [&](const Eigen::Vector3d& z) { return cplx(frame->psi(om, 0.5, std::hypot(z[0], z[1]), std::atan2(z[1], z[0]))); },
      f);
  EXPECT_LT(l2_norm(a - b) / l2_norm(b), 5e-2);
}

#include <gtest/gtest.h>

#include "rfio/fft.hpp"
#include "rfio/hpfio.hpp"
#include "rfio/packets.hpp"
#include "rfio/symbols.hpp"
#include "rfio/wavepackets.hpp"

using namespace rfio;

namespace {

std::shared_ptr<const WavePacketFrame> frame3() {
  static const auto f = [] {
    FrameParams p;
    p.octaves = 3;
    return std::make_shared<const WavePacketFrame>(p);
  }();
  return f;
}

DiracOperator constant_op(int n) { return DiracOperator(make_profile(ProfileKind::Constant, TorusGrid(2, n, 2 * kPi), {}), Coupling::HalfShift); }

}  // namespace

TEST(Symbols, PsiNormalization) {
  double s = 0;
  const int m = 20000;
  for (int i = 0; i < m; ++i) {
    const double u = std::exp(std::log(0.5) + (i + 0.5) * std::log(4.0) / m);
    s += Psi(u) * Psi(u) * std::log(4.0) / m;
  }
  EXPECT_NEAR(s, 1.0, 1e-8);
  EXPECT_EQ(Psi(0.5), 0.0);
  EXPECT_EQ(Psi(2.0), 0.0);
  EXPECT_EQ(phi_window(0.4), 1.0);
  EXPECT_EQ(phi_window(1.0), 0.0);
}

TEST(Frame, PsiSupports) {
  const auto& f = *frame3();
  const double sig = 0.125;
  EXPECT_EQ(f.psi(0.0, sig, 3 / sig, 0.0), 0.0);         // beyond the annulus
  EXPECT_EQ(f.psi(0.0, sig, 1 / sig, kPi), 0.0);         // antipodal
  EXPECT_GT(f.psi(0.0, sig, 1 / sig, 0.0), 0.0);
  EXPECT_EQ(f.phi_omega(0.0, 1.0 / 16, 0.0), 0.0);
  EXPECT_GT(f.phi_omega(0.0, 100.0, 0.0), 0.0);
}

TEST(Frame, DirectionCounts) {
  const auto& f = *frame3();
  for (double sig : {1.0, 0.25, 0.125})
    EXPECT_EQ(f.directions(sig), static_cast<int>(std::ceil(f.params().c_dir / std::sqrt(sig) - 1e-9)));
  FrameParams p1;
  p1.d = 1;
  EXPECT_EQ(WavePacketFrame(p1).directions(0.5), 2);
}

TEST(Frame, ResolutionIdentities) {
  const auto r = check_resolution(*frame3());
  EXPECT_LT(r.psi_identity, 1e-2);
  EXPECT_LT(r.psi_identity_doubled, 0.5 * r.psi_identity);
  EXPECT_LT(r.repro_l2, 1e-3);
  EXPECT_LE(r.C_ratio, 2.0);
}

TEST(Frame, BuildRejectsUnderResolvedGrid) {
  FrameParams p;
  p.octaves = 3;
  EXPECT_THROW(build_frame(p, TorusGrid(2, 16, 2 * kPi)), Error);
  EXPECT_EQ(required_n(0.125, 2 * kPi), 32);
}

TEST(Packets, EigenmodeIsScaled) {
  const auto op = constant_op(32);
  const auto& g = op.grid();
  const double sig = 0.25, om = 0.0;
  SpectralField S{g, CVec::Zero(g.cells()), CVec::Zero(g.cells())};
  std::size_t idx = 0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const auto k = wavevector(g, i);
    if (k[0] == 4 && k[1] == 0) idx = i;
  }
  const auto jm = joint_mode(op, wavevector(g, idx));
  const Eigen::Vector2cd x = jm.proj_plus * Eigen::Vector2cd(1, 0);
  S.comp1[idx] = x[0];
  S.comp2[idx] = x[1];
  const Field f = fourier_inverse(S);
  const double rho = std::hypot(jm.zeta[0], jm.zeta[1]);
  const double val = frame3()->psi(om, sig, rho, std::atan2(jm.zeta[1], jm.zeta[0]));
  ASSERT_GT(val, 0.0);
  const Field out = apply_packet(frame3(), op, om, sig, f, PacketBackend::FourierOracle);
  EXPECT_LT(l2_norm(out - cplx(val) * f) / l2_norm(f), 1e-12);
  const Field off = apply_packet(frame3(), op, kPi, sig, f, PacketBackend::FourierOracle);
  EXPECT_LT(l2_norm(off), 1e-15);
}

TEST(Packets, OracleRejectsVariableCoefficients) {
  const DiracOperator op(make_profile(ProfileKind::Sawtooth, TorusGrid(2, 32, 2 * kPi), {}), Coupling::HalfShift);
  EXPECT_THROW(PacketApplier(frame3(), op, PacketBackend::FourierOracle), Error);
}

TEST(Transform, ReconstructionAndZero) {
  const auto op = constant_op(32);
  const HpfioContext ctx(op, frame_for_grid(op.grid()));
  const Field f = band_limited_field(op.grid(), ctx.band(), 3);
  const auto W = wavepacket_transform(ctx, f);
  const Field r = adjoint_synthesis(ctx, W);
  EXPECT_LT(l2_norm(r - f) / l2_norm(f), 2e-2);
  EXPECT_TRUE(W.warnings.empty());
  const auto Z = wavepacket_transform(ctx, Field(op.grid()));
  EXPECT_EQ(Z.energy(), 0.0);
}

TEST(Transform, BesselBoundStable) {
  std::vector<double> C;
  for (int n : {32, 64}) {
    const auto op = constant_op(n);
    const HpfioContext ctx(op, frame_for_grid(op.grid()));
    double c = 0;
    for (int i = 0; i < 5; ++i) {
      const Field f = band_limited_field(op.grid(), 2.0, 10 + i);
      c = std::max(c, wavepacket_transform(ctx, f).energy() / std::pow(l2_norm(f), 2));
    }
    C.push_back(c);
  }
  EXPECT_LT(std::abs(C[1] / C[0] - 1), 0.1);
  EXPECT_LT(C[0], 1.5);
}

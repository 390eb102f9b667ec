#include <gtest/gtest.h>

#include "rfio/hpfio.hpp"
#include "rfio/opnorm.hpp"

using namespace rfio;

namespace {

const DiracOperator& op32() {
  static const DiracOperator op(make_profile(ProfileKind::Constant, TorusGrid(2, 32, 2 * kPi), {}), Coupling::HalfShift);
  return op;
}

const HpfioContext& ctx32() {
  static const HpfioContext ctx(op32(), frame_for_grid(op32().grid()));
  return ctx;
}

}  // namespace

TEST(Hpfio, SobolevIndex) {
  EXPECT_DOUBLE_EQ(s_p(2, 2), 0.0);
  EXPECT_DOUBLE_EQ(s_p(2, 4), 0.25);
  EXPECT_DOUBLE_EQ(s_p(1, 4), 0.0);
}

TEST(Hpfio, FrameForGridResolvesBand) {
  const auto p = frame_for_grid(op32().grid());
  EXPECT_DOUBLE_EQ(p.octaves, 2);
  EXPECT_NEAR(ctx32().band(), 2.0, 1e-12);
}

TEST(Hpfio, ZeroField) {
  const Field z(op32().grid());
  EXPECT_EQ(ctx32().norm(z, {2, 0}).value, 0.0);
  EXPECT_EQ(ctx32().conical(z, {2, 0}).value, 0.0);
  EXPECT_EQ(ctx32().maximal(z, 2).value, 0.0);
}

TEST(Hpfio, PTwoMatchesL2) {
  const Field f = band_limited_field(op32().grid(), 2.0, 3);
  const auto r = ctx32().norm(f, {2, 0});
  EXPECT_NEAR(r.value / l2_norm(f), 1.0, 2e-2);
  EXPECT_NEAR(r.recompute(), r.value, 1e-12 * r.value);
  EXPECT_EQ(r.symbol_backend, "oracle");
}

TEST(Hpfio, Homogeneous) {
  const Field f = band_limited_field(op32().grid(), 2.0, 4);
  const auto data = ctx32().prepare(f);
  const auto data3 = ctx32().prepare(cplx(0, 3) * f);
  for (double p : {4.0 / 3, 4.0}) {
    const double a = ctx32().norms(data, 0, {p})[0].value;
    const double b = ctx32().norms(data3, 0, {p})[0].value;
    EXPECT_NEAR(b / a, 3.0, 1e-10);
  }
}

TEST(Hpfio, SobolevAtZeroIsLp) {
  const Field f = random_field(op32().grid(), 5);
  for (double p : {1.5, 2.0, 4.0}) EXPECT_NEAR(sobolev_norm(ctx32().tensor(), f, p, 0) / lp_norm(f, p), 1.0, 1e-12);
}

TEST(Hpfio, BandLimitedFieldIsNested) {
  const Field a = band_limited_field(TorusGrid(2, 16, 2 * kPi), 2.0, 7);
  const Field b = band_limited_field(TorusGrid(2, 32, 2 * kPi), 2.0, 7);
  EXPECT_NEAR(a.comp1[0].real(), b.comp1[0].real(), 1e-12);
  EXPECT_NEAR(a.comp2[5 * 16 + 3].imag(), b.comp2[10 * 32 + 6].imag(), 1e-12);
  EXPECT_LT(ctx32().band_leak(b), 1e-12);
}

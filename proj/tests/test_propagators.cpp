#include <gtest/gtest.h>

#include "rfio/propagators.hpp"

using namespace rfio;

namespace {

DiracOperator make_op(int d, int n, ProfileKind k) {
  return DiracOperator(make_profile(k, TorusGrid(d, n, 2 * kPi), {{"amp", 0.25}}, 1), Coupling::HalfShift);
}

double rel(const Field& a, const Field& b) { return l2_norm(a - b) / l2_norm(b); }

}  // namespace

TEST(Propagators, ZeroTimeIsIdentity) {
  const auto op = make_op(2, 16, ProfileKind::Sawtooth);
  const TensorCalculus T(op);
  const Field f = random_field(op.grid(), 4);
  EXPECT_LT(rel(T.heat(f, 0), f), 1e-12);
  EXPECT_LT(rel(T.halfwave(f, 0), f), 1e-12);
  EXPECT_LT(rel(T.bessel(f, 0), f), 1e-12);
}

TEST(Propagators, HalfwaveGroup) {
  const auto op = make_op(1, 64, ProfileKind::Sawtooth);
  const TensorCalculus T(op);
  const Field f = random_field(op.grid(), 5);
  EXPECT_LT(rel(T.halfwave(T.halfwave(f, 0.3), 0.4), T.halfwave(f, 0.7)), 1e-10);
  EXPECT_LT(rel(T.halfwave(T.halfwave(f, 0.3), -0.3), f), 1e-10);
}

TEST(Propagators, HeatContracts) {
  const auto op = make_op(2, 16, ProfileKind::Sawtooth);
  const TensorCalculus T(op);
  const Field f = random_field(op.grid(), 6, true);
  const Field u = T.heat(f, 0.1);
  EXPECT_LE(sup_norm(u), sup_norm(f) * (1 + 1e-10));
}

TEST(Propagators, StagesPassSelfcheck) {
  const auto op = make_op(2, 16, ProfileKind::Sawtooth);
  const TensorCalculus T(op);
  for (const Stage& s : {halfwave_stage(T, 0.5), bessel_stage(T, 0.3), heat_stage(T, 0.1), band_stage(T, 3.0)})
    EXPECT_LT(stage_selfcheck(op.grid(), s, 3), 1e-10) << s.name;
}

TEST(Propagators, FixedTimeUnitaryAtPTwo) {
  FixedTimeSpec spec;
  spec.p = 2;
  spec.alpha = 0;
  spec.grid_sizes = {32};
  spec.iters = 20;
  spec.restarts = 2;
  const auto rows = fixed_time_norm(spec);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].estimate, 1.0, 1e-6);
  EXPECT_LT(rows[0].adjoint_defect, 1e-8);
}

TEST(Propagators, BesovOfConstantIsZero) {
  const auto op = make_op(2, 16, ProfileKind::Sawtooth);
  const TensorCalculus T(op);
  const CVec g = CVec::Constant(static_cast<Eigen::Index>(op.grid().cells()), 1.7);
  EXPECT_LT(besov_norm(T, g, 0.25).value, 1e-12);
  const CVec r = random_field(op.grid(), 8, true).comp1;
  EXPECT_GT(besov_norm(T, r, 0.25).value, 0.0);
}

TEST(Propagators, PerturbedZeroDriftMatchesHalfwave) {
  const auto op = make_op(2, 16, ProfileKind::Sawtooth);
  const TensorCalculus T(op);
  const Field f = random_field(op.grid(), 9);
  const std::vector<RVec> drift(2, RVec::Zero(static_cast<Eigen::Index>(op.grid().cells())));
  const auto r = perturbed_halfwave(op, drift, 0.5, f);
  EXPECT_TRUE(r.diagnostic.empty()) << r.diagnostic;
  EXPECT_LT(rel(r.value, T.halfwave(f, 0.5)), 1e-8);
}

TEST(Propagators, PerturbedRefusesLargeGrids) {
  const auto op = make_op(2, 64, ProfileKind::Constant);
  const std::vector<RVec> drift(2, RVec::Zero(static_cast<Eigen::Index>(op.grid().cells())));
  EXPECT_THROW(perturbed_halfwave(op, drift, 0.5, Field(op.grid())), Error);
}

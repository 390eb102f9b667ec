#include <gtest/gtest.h>

#include "rfio/opnorm.hpp"
#include "rfio/propagators.hpp"

using namespace rfio;

TEST(Opnorm, ScaledIdentity) {
  const TorusGrid g(1, 16, 2 * kPi);
  LinearPipeline A("scaled", g);
  A.then({"scale", [](const Field& f) { return cplx(-2.5) * f; }, [](const Field& f) { return cplx(-2.5) * f; }});
  PnormOptions o;
  o.iters = 1;
  o.restarts = 1;
  for (double p : {1.5, 2.0, 3.0}) {
    const auto e = pnorm_estimate(A, p, o);
    EXPECT_NEAR(e.value, 2.5, 1e-12);
    EXPECT_NEAR(witness_quotient(A, e), e.value, 1e-12);
  }
}

TEST(Opnorm, DiagonalMatrix) {
  RMat M = RMat::Zero(2, 2);
  M(0, 0) = 2;
  M(1, 1) = 1;
  const auto A = matrix_pipeline(M);
  PnormOptions o;
  o.real_seeds = true;
  for (double p : {1.5, 2.0, 4.0}) EXPECT_NEAR(pnorm_estimate(A, p, o).value, 2.0, 1e-8);
}

TEST(Opnorm, BruteForceAgreement) {
  RMat M(3, 3);
  M << 1, 2, 0, -1, 1, 3, 0.5, 0, 1;
  const auto A = matrix_pipeline(M);
  PnormOptions o;
  o.real_seeds = true;
  o.iters = 100;
  for (double p : {1.5, 3.0}) {
    const double est = pnorm_estimate(A, p, o).value;
    const double bf = brute_force_pnorm(M, p, 5000, 2);
    EXPECT_LE(std::abs(est - bf) / bf, 1e-2) << p;
  }
  // At p = 2 the norm is the top singular value.
  EXPECT_NEAR(pnorm_estimate(A, 2, o).value, Eigen::JacobiSVD<RMat>(M).singularValues()[0], 1e-8);
}

TEST(Opnorm, ShippedAdjoints) {
  const DiracOperator op(make_profile(ProfileKind::Sawtooth, TorusGrid(2, 16, 2 * kPi), {}), Coupling::HalfShift);
  const TensorCalculus T(op);
  LinearPipeline A("bessel-halfwave", op.grid());
  A.then(halfwave_stage(T, 1.0)).then(bessel_stage(T, 0.3));
  EXPECT_LT(adjoint_selfcheck(A, 1), 1e-8);
  EXPECT_LT(stage_selfcheck(op.grid(), heat_stage(T, 0.05), 2), 1e-10);
}

TEST(Opnorm, NegativeControlTrips) {
  const DiracOperator op(make_profile(ProfileKind::Sawtooth, TorusGrid(2, 16, 2 * kPi), {}), Coupling::HalfShift);
  const TensorCalculus T(op);
  Stage bad = halfwave_stage(T, 1.0);
  bad.adjoint = halfwave_stage(T, 1.0).forward;
  LinearPipeline A("wrong-adjoint", op.grid());
  A.then(bad);
  EXPECT_GT(adjoint_selfcheck(A, 1), 1e-8);
  EXPECT_THROW(pnorm_estimate(A, 2, PnormOptions{}), Error);
}

TEST(Opnorm, FieldHashStable) {
  const TorusGrid g(2, 8, 1.0);
  EXPECT_EQ(field_hash(random_field(g, 3)), field_hash(random_field(g, 3)));
  EXPECT_NE(field_hash(random_field(g, 3)), field_hash(random_field(g, 4)));
}

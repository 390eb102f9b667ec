#include <gtest/gtest.h>

#include <algorithm>
#include <unsupported/Eigen/MatrixFunctions>

#include "rfio/coeffs.hpp"
#include "rfio/spectral1d.hpp"

using namespace rfio;

namespace {

std::vector<double> laplacian_spectrum(int n, double h) {
  std::vector<double> v;
  for (int m = 0; m < n; ++m) v.push_back((2 - 2 * std::cos(2 * kPi * m / n)) / (h * h));
  std::sort(v.begin(), v.end());
  return v;
}

SpectralBlock1D sawtooth_block(int n) {
  const auto p = make_profile(ProfileKind::Sawtooth, TorusGrid(1, n, 2 * kPi), {{"amp", 0.25}});
  return eigendecompose(assemble_block(p.midpoints[0], p.nodes[0], 2 * kPi / n, BlockKind::L1));
}

}  // namespace

TEST(Spectral1D, UnitLaplacian) {
  const int n = 32;
  const double h = 2 * kPi / n;
  const auto S = eigendecompose(assemble_block(RVec::Ones(n), RVec::Ones(n), h, BlockKind::L1));
  const auto ref = laplacian_spectrum(n, h);
  for (int k = 0; k < n; ++k) EXPECT_NEAR(S.eigenvalues[k], ref[k], 1e-10);
}

TEST(Spectral1D, ScaledLaplacian) {
  const int n = 16;
  const double h = 0.1;
  const auto S = eigendecompose(assemble_block(RVec::Constant(n, 4.0), RVec::Ones(n), h, BlockKind::L1));
  const auto ref = laplacian_spectrum(n, h);
  for (int k = 0; k < n; ++k) EXPECT_NEAR(S.eigenvalues[k], 4 * ref[k], 1e-9);
}

TEST(Spectral1D, FluxFormMatrixByHand) {
  RVec a(8), b(8);
  a << 1, 2, 1, 2, 1, 2, 1, 2;
  b << 3, 1, 3, 1, 3, 1, 3, 1;
  const auto B = assemble_block(a, b, 1.0, BlockKind::L1);
  // row 1: -b_1 (a_{3/2}(u_2 - u_1) - a_{1/2}(u_1 - u_0))
  EXPECT_DOUBLE_EQ(B.matrix(1, 0), -b[1] * a[0]);
  EXPECT_DOUBLE_EQ(B.matrix(1, 1), b[1] * (a[1] + a[0]));
  EXPECT_DOUBLE_EQ(B.matrix(1, 2), -b[1] * a[1]);
  EXPECT_DOUBLE_EQ(B.matrix(0, 7), -b[0] * a[7]);
}

TEST(Spectral1D, ResidualAndWeightedOrthonormality) {
  const auto S = sawtooth_block(64);
  EXPECT_LT(S.max_residual, 1e-9);
  EXPECT_LT(S.gram_defect, 1e-10);
  EXPECT_GE(S.eigenvalues.minCoeff(), 0.0);
}

TEST(Spectral1D, IdentityEigenvectorAndHeat) {
  const int n = 64;
  const auto p = make_profile(ProfileKind::Sawtooth, TorusGrid(1, n, 2 * kPi), {{"amp", 0.25}});
  const auto blk = assemble_block(p.midpoints[0], p.nodes[0], 2 * kPi / n, BlockKind::L1);
  const auto S = eigendecompose(blk);
  CVec v = CVec::Random(n);
  EXPECT_LT((apply_function_1d(S, [](double) { return cplx(1); }, v) - v).norm() / v.norm(), 1e-10);
  const CVec ek = S.vectors.col(5).cast<cplx>();
  const CVec lk = apply_function_1d(S, [](double l) { return cplx(l); }, ek);
  EXPECT_LT((lk - S.eigenvalues[5] * ek).norm(), 1e-9 * std::max(1.0, S.eigenvalues[5]));
  const double t = 0.05;
  const RMat E = (-t * blk.matrix).exp();
  const CVec ref = E.cast<cplx>() * v;
  EXPECT_LT((apply_function_1d(S, [t](double l) { return cplx(std::exp(-t * l)); }, v) - ref).norm() / ref.norm(), 1e-9);
}

TEST(Spectral1D, HalfwaveAtZeroAndFourier) {
  const int n = 32;
  const double h = 2 * kPi / n;
  const auto S = eigendecompose(assemble_block(RVec::Ones(n), RVec::Ones(n), h, BlockKind::L1));
  CVec v = CVec::Random(n);
  EXPECT_LT((halfwave_1d(S, 0.0, v).first - v).norm(), 1e-12);
  const int m = 3;
  CVec e(n);
  for (int k = 0; k < n; ++k) e[k] = std::cos(2 * kPi * m * k / n);
  const double t = 0.8;
  const double w = 2 * std::abs(std::sin(kPi * m / n)) / h;
  EXPECT_LT((halfwave_1d(S, t, e).first - std::cos(t * w) * e).norm() / e.norm(), 1e-10);
}

TEST(Transport, UnitShiftAndZero) {
  const int n = 32;
  const double h = 2 * kPi / n;
  const PrimitiveMap pm(Coefficient1D::constant(1.0, 2 * kPi));
  CVec v = CVec::Random(n);
  EXPECT_EQ(transport_1d(pm, h, 0.0, v), v);
  const CVec s = transport_1d(pm, h, 3 * h, v);
  for (int k = 0; k < n; ++k) EXPECT_NEAR(std::abs(s[k] - v[(k + 3) % n]), 0.0, 1e-12);
}

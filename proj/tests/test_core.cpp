#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "rfio/core.hpp"
#include "rfio/fft.hpp"
#include "rfio/field_io.hpp"
#include "rfio/opnorm.hpp"

using namespace rfio;

TEST(Core, GridRejectsOddOrTinyN) {
  EXPECT_THROW(TorusGrid(1, 7, 1.0), Error);
  EXPECT_THROW(TorusGrid(1, 6, 1.0), Error);
  EXPECT_NO_THROW(TorusGrid(2, 8, 1.0));
}

TEST(Core, SingleCellNorm) {
  const TorusGrid g(1, 100, 1.0);  // h = 0.01
  Field f(g);
  f.comp1[3] = 1.0;
  EXPECT_NEAR(lp_norm(f, 2), 0.1, 1e-15);
}

TEST(Core, ConstantOnUnitBox) {
  const TorusGrid g(2, 16, 1.0);
  Field f(g);
  f.comp1.setConstant(1.0);
  for (double p : {1.5, 2.0, 3.0, 7.0}) EXPECT_NEAR(lp_norm(f, p), 1.0, 1e-14);
}

TEST(Core, RandomFieldAgainstLongDouble) {
  const TorusGrid g(2, 32, 2 * kPi);
  const Field f = random_field(g, 11);
  long double s = 0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const long double m = std::sqrt(static_cast<long double>(std::norm(f.comp1[i]) + std::norm(f.comp2[i])));
    s += std::pow(m, 3.0L);
  }
  const double ref = static_cast<double>(std::pow(s * static_cast<long double>(g.cell_volume()), 1.0L / 3));
  EXPECT_NEAR(lp_norm(f, 3) / ref, 1.0, 1e-12);
}

TEST(Core, RejectsNonFinite) {
  const TorusGrid g(1, 8, 1.0);
  Field f(g);
  f.comp2[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(lp_norm(f, 2), Error);
}

TEST(Fft, PureModeHasOneCoefficient) {
  const TorusGrid g(1, 16, 2 * kPi);
  Field f(g);
  for (int x = 0; x < 16; ++x) f.comp1[x] = std::exp(cplx(0, 3 * x * g.h()));
  const auto S = fourier_forward(f);
  for (int m = 0; m < 16; ++m) EXPECT_NEAR(std::abs(S.comp1[m]), m == 3 ? 16.0 : 0.0, 1e-12);
}

TEST(Fft, DeltaHasFlatSpectrum) {
  const TorusGrid g(2, 8, 1.0);
  Field f(g);
  f.comp1[0] = 1.0;
  const auto S = fourier_forward(f);
  for (std::size_t i = 0; i < g.cells(); ++i) EXPECT_NEAR(std::abs(S.comp1[i]), 1.0, 1e-14);
}

TEST(Fft, RoundTrip) {
  const TorusGrid g(2, 16, 3.0);
  const Field f = random_field(g, 3);
  const Field b = fourier_inverse(fourier_forward(f));
  EXPECT_LT(l2_norm(b - f) / l2_norm(f), 1e-12);
}

TEST(FieldIo, RoundTripIsBitwise) {
  const TorusGrid g(2, 8, 2.5);
  const Field f = random_field(g, 5);
  const auto path = (std::filesystem::temp_directory_path() / "rfio_roundtrip.rwf").string();
  field_io_write(f, path);
  const Field b = field_io_read(path);
  EXPECT_EQ(field_io_encode(b), field_io_encode(f));
  EXPECT_EQ(b.grid, f.grid);
  std::filesystem::remove(path);
}

TEST(FieldIo, WrongMagicRejected) {
  std::string bytes = field_io_encode(random_field(TorusGrid(1, 8, 1.0), 1));
  bytes[0] = 'X';
  EXPECT_THROW(field_io_decode(bytes), FormatError);
}

TEST(FieldIo, TruncationRejected) {
  const std::string bytes = field_io_encode(random_field(TorusGrid(1, 8, 1.0), 1));
  for (std::size_t cut : {std::size_t(2), std::size_t(10), bytes.size() / 2, bytes.size() - 1})
    EXPECT_THROW(field_io_decode(bytes.substr(0, cut)), FormatError);
}

TEST(Core, CompensatedSum) {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_DOUBLE_EQ(s.value(), 1000.0);
}

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <diracweyl/characterization.hpp>
#include <diracweyl/errors.hpp>

using namespace diracweyl;

namespace {

WeylSamples constant_samples(cd value, BlockDims dims = BlockDims(1, 1)) {
  return WeylSamples::from_function(dims, 1.0, 200.0, 1601,
                                    [&](cd) { return Matrix(Matrix::Constant(dims.m2(), dims.m1(), value)); });
}

}  // namespace

TEST(Check, ZeroFunctionAccepts) {
  const CharacterizationReport r = check(constant_samples(0.0, BlockDims(2, 1)), 2.0, 64);
  EXPECT_TRUE(r.accept);
  EXPECT_TRUE(r.failing_clause.empty());
  EXPECT_TRUE(r.contractivity.pass);
  EXPECT_TRUE(r.origin.pass);
  EXPECT_TRUE(r.square_integrability.pass);
  EXPECT_TRUE(r.positivity.pass);
  EXPECT_FALSE(r.positivity.failing_xi.has_value());
}

TEST(Check, ConstantHalfRejectsOnOrigin) {
  const CharacterizationReport r = check(constant_samples(0.5), 2.0, 128);
  EXPECT_FALSE(r.accept);
  EXPECT_EQ(r.failing_clause, "origin");
  EXPECT_TRUE(r.contractivity.pass);
  EXPECT_NEAR(r.origin.value, 0.5, 1e-2);
}

TEST(Check, NonContractiveRejectsFirst) {
  const CharacterizationReport r = check(constant_samples(1.5), 2.0, 64);
  EXPECT_FALSE(r.accept);
  EXPECT_EQ(r.failing_clause, "contractivity");
  EXPECT_NEAR(r.contractivity.max_sigma, 1.5, 1e-12);
}

TEST(Check, WeylFunctionOfConstantPotentialAccepts) {
  const PotentialProfile v = PotentialProfile::constant(Matrix::Constant(1, 1, 1.0), 16.0, 256);
  const CharacterizationReport r = check(weyl_line(v, 1.0, 200.0, 1601), 2.0, 128);
  EXPECT_TRUE(r.accept) << r.failing_clause;
  EXPECT_TRUE(r.square_integrability.tail_convergent);
  EXPECT_EQ(r.positivity.xi.size(), 16u);
  EXPECT_TRUE(r.positivity.monotone);
}

TEST(PositivitySweep, BracketsCriticalLength) {
  const Phi1Profile phi = Phi1Profile::synthetic(
      BlockDims(1, 1), 2.0, 256, [](double x) { return Matrix::Constant(1, 1, x); },
      [](double) { return Matrix::Constant(1, 1, 1.0); });
  const PositivityClause p = positivity_sweep(phi, default_sweep(2.0, 256, 32));
  ASSERT_TRUE(p.failing_xi.has_value());
  EXPECT_NEAR(*p.failing_xi, std::numbers::pi / 2, 2 * phi.step());
  EXPECT_FALSE(p.pass);
  EXPECT_TRUE(p.monotone);
  for (std::size_t k = 1; k < p.min_eig.size(); ++k) EXPECT_LE(p.min_eig[k], p.min_eig[k - 1] + 1e-12);
}

TEST(DefaultSweep, SnapsToGrid) {
  const std::vector<double> xi = default_sweep(2.0, 64, 16);
  ASSERT_EQ(xi.size(), 16u);
  EXPECT_DOUBLE_EQ(xi.front(), 0.125);
  EXPECT_DOUBLE_EQ(xi.back(), 2.0);
  const std::vector<double> coarse = default_sweep(1.0, 10, 3);
  for (double x : coarse) EXPECT_NEAR(std::round(x / 0.1) * 0.1, x, 1e-12);
}

TEST(Check, ExplicitSweepIsUsed) {
  const CharacterizationReport r = check(constant_samples(0.0), 2.0, 64, {0.5, 1.0});
  EXPECT_EQ(r.positivity.xi.size(), 2u);
  EXPECT_THROW(check(constant_samples(0.0), 2.0, 64, {0.51}), OffGridError);
}

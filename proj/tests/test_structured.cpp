#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <diracweyl/errors.hpp>
#include <diracweyl/structured.hpp>

#include "oracles.hpp"

using namespace diracweyl;

namespace {

Phi1Profile linear_phi(double length, int cells, double slope = 1.0) {
  return Phi1Profile::synthetic(
      BlockDims(1, 1), length, cells, [=](double x) { return Matrix::Constant(1, 1, slope * x); },
      [=](double) { return Matrix::Constant(1, 1, slope); });
}

Phi1Profile rectangular_phi(double length, int cells) {
  return Phi1Profile::synthetic(BlockDims(1, 2), length, cells, [](double x) {
    Matrix m(2, 1);
    m << cd(0.3 * x, 0.1 * x * x), cd(0.2 * std::sin(x), -0.1 * x);
    return m;
  });
}

}  // namespace

TEST(AssembleS, ZeroKernelIsIdentity) {
  const DiscreteS S = assemble_S(AccelerantKernel(Phi1Profile::zero(BlockDims(1, 2), 2.0, 16)), 2.0);
  EXPECT_EQ(S.matrix(), Matrix::Identity(32, 32));
  EXPECT_TRUE(positivity(S).is_positive);
}

TEST(AssembleS, RejectsOffGridXi) {
  const AccelerantKernel k(linear_phi(2.0, 16));
  EXPECT_THROW(assemble_S(k, 0.3), OffGridError);
  EXPECT_THROW(assemble_S(k, 4.0), OffGridError);
  EXPECT_EQ(assemble_S(k, 0.5).cells(), 4);
}

TEST(AssembleS, HermitianAndNested) {
  const AccelerantKernel k(rectangular_phi(2.0, 32));
  const DiscreteS S = assemble_S(k, 2.0);
  EXPECT_EQ((S.matrix() - S.matrix().adjoint()).norm(), 0.0);
  const DiscreteS half = assemble_S(k, 1.0);
  EXPECT_LT((S.leading(16).matrix() - half.matrix()).norm(), 1e-15);
}

TEST(AssembleS, MinKernelSpectrum) {
  const Phi1Profile phi = linear_phi(2.0, 512);
  const DiscreteS S = assemble_S(AccelerantKernel(phi), 1.0);
  EXPECT_NEAR(positivity(S).min_eig, oracle::min_kernel_eigenvalue(1.0, 1), 1e-3);
  Eigen::SelfAdjointEigenSolver<Matrix> es(S.matrix(), Eigen::EigenvaluesOnly);
  EXPECT_NEAR(es.eigenvalues()(1), oracle::min_kernel_eigenvalue(1.0, 2), 1e-3);
}

TEST(Factorize, InverseAndTriangularity) {
  const DiscreteS S = assemble_S(AccelerantKernel(rectangular_phi(2.0, 48)), 2.0);
  const TriangularFactor E = factorize(S);
  const Matrix I = Matrix::Identity(S.matrix().rows(), S.matrix().cols());
  EXPECT_LT((E.matrix().adjoint() * E.matrix() * S.matrix() - I).norm() / I.norm(), 1e-10);
  const Matrix Sinv = S.matrix().partialPivLu().inverse();
  EXPECT_LT((E.matrix().adjoint() * E.matrix() - Sinv).norm(), 1e-10 * Sinv.norm());
  for (int i = 0; i < E.cells(); ++i) {
    for (int k = i + 1; k < E.cells(); ++k) EXPECT_EQ(E.block(i, k).norm(), 0.0);
  }
  for (int k = 0; k < E.cells(); ++k) {
    const Matrix d = E.block(k, k);
    EXPECT_LT((d - d.adjoint()).norm(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Factorize, NestingOfLeadingBlocks) {
  const DiscreteS S = assemble_S(AccelerantKernel(rectangular_phi(2.0, 64)), 2.0);
  const TriangularFactor E = factorize(S);
  for (int k : {1, 7, 32, 63}) {
    const TriangularFactor Ek = factorize(S.leading(k));
    EXPECT_LT((Ek.matrix() - E.leading(k).matrix()).norm(), 1e-13 * E.leading(k).matrix().norm()) << k;
  }
}

TEST(Factorize, BreakdownNamesFirstIndefiniteBlock) {
  const Phi1Profile phi = linear_phi(2.0, 128);
  const DiscreteS S = assemble_S(AccelerantKernel(phi), 2.0);
  const int k = first_indefinite_prefix(S);
  EXPECT_NEAR(k * S.step(), std::numbers::pi / 2, 2 * S.step());
  try {
    factorize(S);
    FAIL() << "expected NotPositiveDefinite";
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.failing_block(), k);
  }
  EXPECT_EQ(first_indefinite_prefix(S.leading(k - 1)), k);
  EXPECT_GT(positivity(S.leading(k - 1)).min_eig, -1e-12);
}

TEST(ApplyE, PrefixSolutionsMatchDenseSolves) {
  const Phi1Profile phi = rectangular_phi(1.0, 24);
  const DiscreteS S = assemble_S(AccelerantKernel(phi), 1.0);
  const TriangularFactor E = factorize(S);
  const GridFunction f = GridFunction::sample(1.0, 24, Layout::midpoints, [](double x) {
    Matrix m(2, 3);
    m << 1, x, 0, cd(0, x), 2, x * x;
    return m;
  });
  const PrefixSolutions Y = apply_E_adjoint_tail(E, f);
  const Matrix F = stack(f);
  for (int p : {0, 5, 23}) {
    const Eigen::Index size = static_cast<Eigen::Index>(p + 1) * 2;
    const Matrix dense = S.matrix().topLeftCorner(size, size).partialPivLu().solve(F.topRows(size));
    EXPECT_LT((Y.prefix(p) - dense).norm(), 1e-11 * dense.norm()) << p;
  }
  EXPECT_THROW(Y.at(3, 2), ShapeError);
}

TEST(ApplyE, StackRoundTrip) {
  const GridFunction f = GridFunction::sample(1.0, 5, Layout::midpoints, [](double x) {
    return Matrix::Constant(2, 1, x);
  });
  EXPECT_EQ(unstack(stack(f), 2).size(), 5u);
  EXPECT_EQ(unstack(stack(f), 2)[3], f[3]);
}

TEST(IdentityResidual, VanishesForZeroAndShrinksWithStep) {
  EXPECT_EQ(identity_residual(Phi1Profile::zero(BlockDims(1, 1), 1.0, 16), 1.0), 0.0);
  const double r1 = identity_residual(linear_phi(2.0, 64), 1.0);
  const double r2 = identity_residual(linear_phi(2.0, 128), 1.0);
  EXPECT_GT(r1, 0.0);
  EXPECT_LT(r2, r1);
}

TEST(AccelerantKernel, PrefixNorms) {
  const AccelerantKernel k(linear_phi(2.0, 8, 3.0));
  const std::vector<double> n = k.prefix_l2_norms();
  ASSERT_EQ(n.size(), 8u);
  EXPECT_NEAR(n.back(), 3.0 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(n.front(), 3.0 * std::sqrt(0.25), 1e-14);
}

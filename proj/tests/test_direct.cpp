#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>

#include <diracweyl/direct.hpp>
#include <diracweyl/errors.hpp>

#include "oracles.hpp"

using namespace diracweyl;

namespace {

PotentialProfile scalar_constant(cd c, double length, int cells) {
  return PotentialProfile::constant(Matrix::Constant(1, 1, c), length, cells);
}

}  // namespace

TEST(Propagate, MatchesClosedFormForConstantPotential) {
  const cd c(0.5, 0.3);
  const cd z(1.0, 0.5);
  const FundamentalSolutionSlice s = propagate(scalar_constant(c, 4.0, 64), z);
  ASSERT_EQ(s.u.size(), 65u);
  for (std::size_t i = 0; i < s.u.size(); i += 8) {
    const Matrix expected = oracle::constant_solution(c, z, s.u.coordinate(i));
    EXPECT_LT((s.u[i] - expected).norm(), 1e-11 * (1.0 + expected.norm())) << i;
  }
}

TEST(Propagate, ConservesJFormOnRealAxis) {
  // u* j u = j for real z.
  Matrix v(1, 2);
  v << cd(0.4, -0.2), cd(0.7, 0.1);
  const PotentialProfile p = PotentialProfile::from_function(BlockDims(1, 2), 3.0, 48, [&](double x) {
    return Matrix(v * std::cos(x));
  });
  const Matrix j = SignatureMatrix(p.dims()).matrix();
  const FundamentalSolutionSlice s = propagate(p, cd(1.3, 0.0));
  for (const Matrix& u : s.u.samples()) EXPECT_LT((u.adjoint() * j * u - j).norm(), 1e-12);
}

TEST(Propagate, ZeroPotentialIsDiagonalExponential) {
  const PotentialProfile p = PotentialProfile::constant(Matrix::Zero(1, 1), 2.0, 16);
  const cd z(0.5, 1.0);
  const FundamentalSolutionSlice s = propagate(p, z);
  const cd i(0.0, 1.0);
  const double x = 2.0;
  EXPECT_LT(std::abs(s.u[16](0, 0) - std::exp(i * z * x)), 1e-12);
  EXPECT_LT(std::abs(s.u[16](1, 1) - std::exp(-i * z * x)), 1e-10);
  EXPECT_LT(std::abs(s.u[16](0, 1)), 1e-14);
}

TEST(Gram, MatchesGaussLegendreOracle) {
  const cd c(1.0, 0.0);
  const cd z(0.5, 1.0);
  const Matrix G = gram(scalar_constant(c, 4.0, 128), z, 3.0);
  const Matrix expected = oracle::constant_gram(c, z, 3.0);
  EXPECT_LT((G - expected).norm(), 1e-10 * expected.norm());
}

TEST(Gram, IsHermitianAndMonotone) {
  const PotentialProfile p = scalar_constant(cd(0.5), 4.0, 64);
  const cd z(0.3, 0.8);
  const Matrix G1 = gram(p, z, 2.0);
  const Matrix G2 = gram(p, z, 4.0);
  EXPECT_LT((G1 - G1.adjoint()).norm(), 1e-12 * G1.norm());
  Eigen::SelfAdjointEigenSolver<Matrix> es(G2 - G1);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(Gram, RejectsOffGridAndOverflow) {
  const PotentialProfile p = scalar_constant(cd(0.5), 4.0, 64);
  EXPECT_THROW(gram(p, cd(1.0, 1.0), 1.01), OffGridError);
  EXPECT_THROW(gram(p, cd(1.0, 100.0), 4.0), OverflowCapExceeded);
}

class WeylOracle : public ::testing::TestWithParam<std::tuple<double, std::complex<double>>> {};

TEST_P(WeylOracle, ConstantPotential) {
  const auto [c, z] = GetParam();
  DirectOptions o;
  o.b_schedule = {2, 4, 6, 7, 8};
  const WeylPoint w = weyl_point(scalar_constant(cd(c), 8.0, 4096), z, o);
  const cd expected = constant_potential_weyl_oracle(cd(c), z);
  EXPECT_LT(std::abs(w.phi(0, 0) - expected), 1e-5);
  EXPECT_LT(std::abs(expected - oracle::constant_weyl(cd(c), z)), 1e-12);
  EXPECT_TRUE(w.converged);
  EXPECT_LE(w.sigma_max, 1.0);
}

INSTANTIATE_TEST_SUITE_P(ScheduleToEight, WeylOracle,
                         ::testing::Combine(::testing::Values(0.5, 1.0),
                                            ::testing::Values(cd(0.0, 1.0), cd(1.0, 1.0), cd(0.0, 2.0))));

TEST(WeylPoint, ZeroPotentialGivesZero) {
  const WeylPoint w = weyl_point(PotentialProfile::constant(Matrix::Zero(1, 2), 4.0, 32), cd(0.0, 1.0));
  EXPECT_LT(w.phi.norm(), 1e-12);
  EXPECT_EQ(w.phi.rows(), 2);
  EXPECT_EQ(w.phi.cols(), 1);
}

TEST(WeylPoint, NonConvergenceCarriesIncrements) {
  // On a short interval near the real axis phi_b keeps moving.
  DirectOptions o;
  o.b_schedule = {0.5, 1.0};
  const PotentialProfile p = scalar_constant(cd(1.0), 1.0, 64);
  try {
    weyl_point(p, cd(3.0, 0.05), o);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    ASSERT_EQ(e.increments().size(), 1u);
    EXPECT_GT(e.increments()[0], o.tol_weyl);
  }
  const WeylPoint w = weyl_point_unchecked(p, cd(3.0, 0.05), o);
  EXPECT_FALSE(w.converged);
}

TEST(WeylPoint, RectangularOracleByDiagonalization) {
  // v = [c1 c2] constant: phi from the decaying eigenspace of M.
  Matrix v(1, 2);
  v << 0.3, 0.4;
  const PotentialProfile p = PotentialProfile::constant(v, 24.0, 1536);
  const cd z(0.5, 1.0);
  const cd i(0.0, 1.0);
  const Matrix j = SignatureMatrix(p.dims()).matrix();
  const Matrix M = i * (z * j + j * p.block_potential(0));
  Eigen::ComplexEigenSolver<Matrix> es(M);
  std::vector<int> neg;
  for (int k = 0; k < 3; ++k) {
    if (es.eigenvalues()(k).real() < 0) neg.push_back(k);
  }
  ASSERT_EQ(neg.size(), 1u);
  const Eigen::VectorXcd e = es.eigenvectors().col(neg[0]);
  DirectOptions o;
  o.b_schedule = {8, 16, 24};
  const WeylPoint w = weyl_point(p, z, o);
  EXPECT_LT(std::abs(w.phi(0, 0) - e(1) / e(0)), 1e-6);
  EXPECT_LT(std::abs(w.phi(1, 0) - e(2) / e(0)), 1e-6);
}

TEST(WeylSamples, GridAndTruncation) {
  const WeylSamples w = WeylSamples::from_function(BlockDims(1, 1), 1.0, 10.0, 21,
                                                   [](cd z) { return Matrix::Constant(1, 1, 1.0 / (z + cd(0, 2))); });
  EXPECT_DOUBLE_EQ(w.step(), 1.0);
  EXPECT_DOUBLE_EQ(w.zeta(0), -10.0);
  EXPECT_DOUBLE_EQ(w.zeta(20), 10.0);
  EXPECT_TRUE(w.all_converged());
  const WeylSamples t = w.truncated(5.0);
  EXPECT_EQ(t.nz(), 11);
  EXPECT_EQ(t[0], w[5]);
  EXPECT_THROW(w.truncated(5.5), OffGridError);
}

TEST(WeylLine, DeterministicAcrossThreadCounts) {
  const PotentialProfile p = scalar_constant(cd(0.5), 8.0, 256);
  DirectOptions one;
  one.threads = 1;
  DirectOptions four;
  four.threads = 4;
  const WeylSamples a = weyl_line(p, 1.0, 20.0, 41, one);
  const WeylSamples b = weyl_line(p, 1.0, 20.0, 41, four);
  for (int k = 0; k < a.nz(); ++k) EXPECT_EQ(a[k], b[k]) << k;
}

TEST(WeylLine, MatchesOracleAndIsContractive) {
  const PotentialProfile p = scalar_constant(cd(1.0), 16.0, 1024);
  const WeylSamples w = weyl_line(p, 1.0, 30.0, 61);
  EXPECT_TRUE(w.all_converged());
  EXPECT_LE(w.max_singular_value(), 1.0);
  for (int k = 0; k < w.nz(); ++k) {
    EXPECT_LT(std::abs(w[k](0, 0) - constant_potential_weyl_oracle(1.0, w.z(k))), 1e-5) << k;
  }
}

TEST(WeylLine, ScheduleErrorsSurfaceBeforeWork) {
  DirectOptions o;
  o.b_schedule = {1.0, 100.0};
  EXPECT_THROW(weyl_line(scalar_constant(cd(0.5), 4.0, 32), 1.0, 10.0, 11, o), Error);
}

TEST(ThreadCount, ReadsEnvironment) {
  ::setenv("DIRACWEYL_THREADS", "3", 1);
  EXPECT_EQ(default_thread_count(), 3);
  ::setenv("DIRACWEYL_THREADS", "junk", 1);
  EXPECT_EQ(default_thread_count(), 1);
  ::unsetenv("DIRACWEYL_THREADS");
  EXPECT_EQ(default_thread_count(), 1);
}

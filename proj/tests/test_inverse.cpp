#include <cmath>

#include <gtest/gtest.h>

#include <diracweyl/errors.hpp>
#include <diracweyl/inverse.hpp>

using namespace diracweyl;

namespace {

double max_abs_error(const PotentialProfile& v, const std::function<Matrix(double)>& exact, double x_max) {
  double e = 0.0;
  for (std::size_t i = 0; i < v.v().size(); ++i) {
    const double x = v.v().coordinate(i);
    if (x > x_max) break;
    e = std::max(e, (v.v()[i] - exact(x)).norm());
  }
  return e;
}

WeylSamples forward(const PotentialProfile& v) { return weyl_line(v, 1.0, 200.0, 1601); }

}  // namespace

TEST(Procedure, Names) {
  EXPECT_EQ(procedure_from_string("B"), Procedure::B);
  EXPECT_EQ(procedure_from_string("all"), Procedure::all);
  EXPECT_STREQ(to_string(Procedure::C), "C");
  EXPECT_THROW(procedure_from_string("D"), Error);
}

TEST(Invert, ZeroFixedPoint) {
  const BlockDims d(1, 2);
  const InversionResult r = invert(Phi1Profile::zero(d, 2.0, 32), Procedure::all);
  ASSERT_EQ(r.procedures.size(), 3u);
  for (const ProcedureResult& p : r.procedures) {
    EXPECT_LE(p.v.v().sup_norm(), 1e-12) << to_string(p.procedure);
    EXPECT_LE(p.residuals.sup(), 1e-12) << to_string(p.procedure);
  }
  const InverseSolver s(Phi1Profile::zero(d, 2.0, 32));
  const HamiltonianProfile H = s.hamiltonian();
  Matrix expected = Matrix::Zero(3, 3);
  expected.bottomRightCorner(2, 2) = Matrix::Identity(2, 2);
  for (const Matrix& h : H.H.samples()) EXPECT_LE((h - expected).norm(), 1e-12);
  Matrix g0 = Matrix::Zero(2, 3);
  g0.rightCols(2) = Matrix::Identity(2, 2);
  for (const Matrix& g : s.gamma_phi().samples()) EXPECT_LE((g - g0).norm(), 1e-12);
  Matrix b0 = Matrix::Zero(1, 3);
  b0(0, 0) = 1.0;
  const GridFunction beta = s.beta_direct();
  for (const Matrix& b : beta.samples()) EXPECT_LE((b - b0).norm(), 1e-12);
  EXPECT_LE(r.diagnostics.deltas.at("A-B"), 1e-12);
}

TEST(Invert, ConstantPotentialAllProcedures) {
  const double c = 0.5;
  const PotentialProfile truth = PotentialProfile::constant(Matrix::Constant(1, 1, c), 16.0, 256);
  const InversionResult r = invert(forward(truth), 2.0, 256, Procedure::all);
  for (const ProcedureResult& p : r.procedures) {
    EXPECT_LT(max_abs_error(p.v, [&](double) { return Matrix::Constant(1, 1, c); }, 1.8), 1e-4)
        << to_string(p.procedure);
    EXPECT_EQ(p.rows.beta.layout(), Layout::origin_midpoints);
  }
  for (const auto& [key, delta] : r.diagnostics.deltas) EXPECT_LT(delta, 1e-4) << key;
  EXPECT_LT(r.diagnostics.hamiltonian_fd_agreement, 1e-8);
  EXPECT_GT(r.diagnostics.min_eig_S, 0.0);
  EXPECT_LT(r.diagnostics.psi_max_sigma, 1.0);
}

TEST(Invert, VariablePotentialProcedureA) {
  auto v = [](double x) { return Matrix::Constant(1, 1, cd(0.4 + 0.2 * std::cos(2 * x), 0.1 * x)); };
  const PotentialProfile truth = PotentialProfile::from_function(BlockDims(1, 1), 16.0, 2048, [&](double x) {
    return x < 4.0 ? v(x) : Matrix(Matrix::Zero(1, 1));
  });
  const InversionResult r = invert(forward(truth), 2.0, 256, Procedure::A);
  EXPECT_LT(max_abs_error(r.potential(), v, 1.8), 5e-3);
}

TEST(Invert, RectangularShapes) {
  Matrix c(1, 2);
  c << 0.3, 0.4;
  const PotentialProfile truth = PotentialProfile::constant(c, 16.0, 256);
  const InversionResult r = invert(forward(truth), 2.0, 256, Procedure::all);
  for (const ProcedureResult& p : r.procedures) {
    EXPECT_EQ(p.v.dims(), BlockDims(1, 2));
    EXPECT_EQ(p.rows.beta.rows(), 1);
    EXPECT_EQ(p.rows.beta.cols(), 3);
    EXPECT_EQ(p.rows.gamma.rows(), 2);
    EXPECT_EQ(p.rows.gamma.cols(), 3);
    EXPECT_LT(max_abs_error(p.v, [&](double) { return c; }, 1.8), 1e-3) << to_string(p.procedure);
  }
}

TEST(Invert, FastPotentialEqualsProcedureC) {
  const PotentialProfile truth = PotentialProfile::constant(Matrix::Constant(1, 1, 1.0), 16.0, 256);
  const Phi1Profile phi = phi1_from_weyl(forward(truth), 2.0, 128, TransformOptions::round_trip());
  const InversionResult r = invert(phi, Procedure::C);
  const PotentialProfile fast = potential_fast(phi);
  EXPECT_LT(trimmed_sup_distance(fast, r.potential(), 1.0), 1e-12);
}

TEST(Invert, DefinitenessGuardRaisesStageFailure) {
  const PotentialProfile truth = PotentialProfile::constant(Matrix::Constant(1, 1, 0.5), 16.0, 256);
  const Phi1Profile phi = phi1_from_weyl(forward(truth), 2.0, 64, TransformOptions::round_trip());
  InverseOptions o;
  o.definiteness_guard = 2.0;
  try {
    invert(phi, Procedure::A, o);
    FAIL() << "expected StageFailure";
  } catch (const StageFailure& e) {
    EXPECT_FALSE(e.stage().empty());
  }
}

TEST(Invert, IndefiniteOperatorIsRefused) {
  const Phi1Profile phi = Phi1Profile::synthetic(
      BlockDims(1, 1), 2.0, 64, [](double x) { return Matrix::Constant(1, 1, x); },
      [](double) { return Matrix::Constant(1, 1, 1.0); });
  EXPECT_THROW(invert(phi, Procedure::A), NotPositiveDefinite);
}

TEST(SchurChain, GammaIsJNormalized) {
  const PotentialProfile truth = PotentialProfile::constant(Matrix::Constant(1, 1, 0.5), 16.0, 256);
  const Phi1Profile phi = phi1_from_weyl(forward(truth), 2.0, 128, TransformOptions::round_trip());
  const SchurCoefficient psi = schur_coefficient(hamiltonian(phi));
  const GridFunction gamma = gamma_from_schur(psi);
  const Matrix j = SignatureMatrix(phi.dims).matrix();
  for (const Matrix& g : gamma.samples()) EXPECT_LT((g * j * g.adjoint() + Matrix::Identity(1, 1)).norm(), 1e-3);
  const GridFunction beta = beta_from_gamma(gamma, phi.dims);
  for (std::size_t i = 0; i < beta.size(); ++i) EXPECT_LT((beta[i] * j * gamma[i].adjoint()).norm(), 1e-10);
}

TEST(TrimmedDistance, UsesWindowOnly) {
  const PotentialProfile a = PotentialProfile::from_function(BlockDims(1, 1), 1.0, 10, [](double x) {
    return Matrix::Constant(1, 1, x > 0.95 ? 1.0 : 0.0);
  });
  const PotentialProfile b = PotentialProfile::constant(Matrix::Zero(1, 1), 1.0, 10);
  EXPECT_EQ(trimmed_sup_distance(a, b, 0.9), 0.0);
  EXPECT_EQ(trimmed_sup_distance(a, b, 1.0), 1.0);
}

#include "diracweyl/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <unsupported/Eigen/MatrixFunctions>

#include "diracweyl/errors.hpp"

namespace diracweyl {

namespace {

using Rhs = std::function<Matrix(const Matrix& sample, const Matrix& derivative)>;

/// y' = y A(s, s') on the samples' grid, one exponential per step with s averaged and
/// differenced over the step.
std::vector<Matrix> integrate(const GridFunction& s, const Matrix& init, const Rhs& rhs) {
  const std::vector<double> x = s.coordinates();
  std::vector<Matrix> y;
  y.reserve(s.size());
  y.push_back(init);
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double d = x[k + 1] - x[k];
    const Matrix mid = 0.5 * (s[k] + s[k + 1]);
    const Matrix diff = (s[k + 1] - s[k]) / d;
    const Matrix A = d * rhs(mid, diff);
    y.push_back(y.back() * A.exp());
  }
  return y;
}

double min_hermitian_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double min_singular(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues().minCoeff();
}

double max_singular(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues().maxCoeff();
}

void guard_contraction(const Matrix& c, std::size_t node, const std::string& stage,
                       const InverseOptions& options) {
  const Matrix defect = Matrix::Identity(c.rows(), c.rows()) - c * c.adjoint();
  const double e = min_hermitian_eig(defect);
  if (!(e >= options.definiteness_guard)) {
    throw StageFailure(stage, node, "I - c c* lost definiteness (min eigenvalue " + std::to_string(e) + ")");
  }
}

/// Generator of the Schur-type recursions for gamma2 and gamma_hat2: A = c' c* (I - c c*)^{-1}.
Matrix contraction_rhs(const Matrix& c, const Matrix& dc) {
  const Matrix defect = Matrix::Identity(c.rows(), c.rows()) - c * c.adjoint();
  return dc * c.adjoint() * defect.inverse();
}

GridFunction recovery_grid(double length, int cells, std::vector<Matrix> samples) {
  return GridFunction(length, cells, Layout::origin_midpoints, std::move(samples));
}

Matrix top_row(BlockDims dims) {
  Matrix r = Matrix::Zero(dims.m1(), dims.m());
  r.leftCols(dims.m1()) = Matrix::Identity(dims.m1(), dims.m1());
  return r;
}

Matrix bottom_row(BlockDims dims) {
  Matrix r = Matrix::Zero(dims.m2(), dims.m());
  r.rightCols(dims.m2()) = Matrix::Identity(dims.m2(), dims.m2());
  return r;
}

std::vector<double> curve(const GridFunction& a, const GridFunction& b, const Matrix& j, const Matrix& shift) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] * j * b[i].adjoint() - shift).norm();
  return out;
}

}  // namespace

const char* to_string(Procedure p) {
  switch (p) {
    case Procedure::A:
      return "A";
    case Procedure::B:
      return "B";
    case Procedure::C:
      return "C";
    case Procedure::all:
      return "all";
  }
  return "?";
}

Procedure procedure_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Procedure::A;
  if (s == "B" || s == "b") return Procedure::B;
  if (s == "C" || s == "c") return Procedure::C;
  if (s == "all") return Procedure::all;
  throw Error("unknown procedure '" + s + "' (expected A, B, C or all)");
}

InverseSolver::InverseSolver(Phi1Profile phi, InverseOptions options)
    : phi_(std::move(phi)),
      options_(options),
      S_(assemble_S(AccelerantKernel(phi_), phi_.length())),
      E_(factorize(S_)) {
  const BlockDims dims = phi_.dims;
  g_ = apply_E(E_, phi_.phi1_prime);
  const GridFunction Pi = phi_.phi1_mid.map(
      [&](std::size_t, const Matrix& p) { return block_join(p, Matrix::Identity(dims.m2(), dims.m2())); });
  const GridFunction gPi = apply_E(E_, Pi);
  std::vector<Matrix> samples;
  samples.reserve(gPi.size() + 1);
  samples.push_back(bottom_row(dims));
  for (const Matrix& s : gPi.samples()) samples.push_back(s);
  gamma_phi_ = recovery_grid(phi_.length(), phi_.cells(), std::move(samples));
}

HamiltonianProfile InverseSolver::hamiltonian() const {
  const BlockDims dims = phi_.dims;
  HamiltonianProfile out{dims, gamma_phi_.map([](std::size_t, const Matrix& g) {
                           Matrix H = g.adjoint() * g;
                           return Matrix(0.5 * (H + H.adjoint()));
                         }),
                         {}, 0.0};

  // M(x_{p+1}) = h sum_{t<=p} Pi_t* (S_{p+1}^{-1} Pi)_t from the prefix solutions.
  const GridFunction Pi = phi_.phi1_mid.map(
      [&](std::size_t, const Matrix& p) { return block_join(p, Matrix::Identity(dims.m2(), dims.m2())); });
  const PrefixSolutions Y = apply_E_adjoint_tail(E_, Pi);
  const int n = phi_.cells();
  const double h = phi_.step();
  std::vector<Matrix> H_fd;
  H_fd.reserve(static_cast<std::size_t>(n));
  Matrix M_prev = Matrix::Zero(dims.m(), dims.m());
  for (int p = 0; p < n; ++p) {
    Matrix M = Matrix::Zero(dims.m(), dims.m());
    for (int t = 0; t <= p; ++t) M.noalias() += h * Pi[static_cast<std::size_t>(t)].adjoint() * Y.at(t, p);
    H_fd.push_back((M - M_prev) / h);
    out.fd_agreement = std::max(out.fd_agreement, (H_fd.back() - out.H[static_cast<std::size_t>(p) + 1]).norm());
    M_prev = std::move(M);
  }
  out.H_fd = GridFunction(phi_.length(), n, Layout::midpoints, std::move(H_fd));
  return out;
}

GridFunction InverseSolver::beta_direct() const {
  const BlockDims dims = phi_.dims;
  const double h = phi_.step();
  std::vector<Matrix> beta;
  beta.reserve(gamma_phi_.size());
  beta.push_back(top_row(dims));
  Matrix acc = top_row(dims);
  for (std::size_t i = 0; i < g_.size(); ++i) {
    const Matrix term = h * g_[i].adjoint() * gamma_phi_[i + 1];
    beta.push_back(acc + 0.5 * term);
    acc += term;
  }
  return recovery_grid(phi_.length(), phi_.cells(), std::move(beta));
}

PotentialProfile InverseSolver::potential_fast() const {
  const cd i(0.0, 1.0);
  return PotentialProfile(phi_.dims, g_.map([&](std::size_t, const Matrix& g) { return Matrix(-i * g.adjoint()); }));
}

GridFunction gamma_phi(const Phi1Profile& phi) { return InverseSolver(phi).gamma_phi(); }
HamiltonianProfile hamiltonian(const Phi1Profile& phi) { return InverseSolver(phi).hamiltonian(); }
GridFunction beta_direct(const Phi1Profile& phi) { return InverseSolver(phi).beta_direct(); }
PotentialProfile potential_fast(const Phi1Profile& phi) { return InverseSolver(phi).potential_fast(); }

SchurCoefficient schur_coefficient(const HamiltonianProfile& H, const InverseOptions& options) {
  const BlockDims dims = H.dims;
  SchurCoefficient out{dims, {}, 0.0};
  std::vector<Matrix> psi;
  psi.reserve(H.H.size());
  for (std::size_t i = 0; i < H.H.size(); ++i) {
    const Matrix H22 = H.H[i].bottomRightCorner(dims.m2(), dims.m2());
    const Matrix H21 = H.H[i].bottomLeftCorner(dims.m2(), dims.m1());
    const double e = min_hermitian_eig(H22);
    if (!(e > options.definiteness_guard)) {
      throw StageFailure("schur_coefficient", i, "H22 is singular (min eigenvalue " + std::to_string(e) + ")");
    }
    Matrix p = Eigen::LLT<Matrix>(0.5 * (H22 + H22.adjoint())).solve(H21);
    guard_contraction(p, i, "schur_coefficient", options);
    out.max_sigma = std::max(out.max_sigma, max_singular(p));
    psi.push_back(std::move(p));
  }
  out.psi = GridFunction(H.H.length(), H.H.cells(), H.H.layout(), std::move(psi));
  return out;
}

GridFunction gamma_from_schur(const SchurCoefficient& psi, const InverseOptions& options) {
  const BlockDims dims = psi.dims;
  std::size_t node = 0;
  const std::vector<Matrix> g2 =
      integrate(psi.psi, Matrix::Identity(dims.m2(), dims.m2()), [&](const Matrix& s, const Matrix& ds) {
        guard_contraction(s, ++node, "gamma_from_schur", options);
        return contraction_rhs(s, ds);
      });
  std::vector<Matrix> gamma;
  gamma.reserve(g2.size());
  for (std::size_t i = 0; i < g2.size(); ++i) gamma.push_back(block_join(g2[i] * psi.psi[i], g2[i]));
  return GridFunction(psi.psi.length(), psi.psi.cells(), psi.psi.layout(), std::move(gamma));
}

GridFunction beta_from_gamma(const GridFunction& gamma, BlockDims dims, const InverseOptions& options) {
  if (gamma.rows() != dims.m2() || gamma.cols() != dims.m()) throw ShapeError("gamma must be m2 x m");
  const Matrix j = SignatureMatrix(dims).matrix();
  const GridFunction bt = gamma.map([&](std::size_t i, const Matrix& g) {
    const auto [g1, g2] = block_split(g, dims);
    const double s = min_singular(g2);
    if (!(s >= options.definiteness_guard)) {
      throw StageFailure("beta_from_gamma", i, "gamma2 is singular (min singular value " + std::to_string(s) + ")");
    }
    // gamma1* (gamma2*)^{-1} = (gamma2^{-1} gamma1)*
    const Matrix right = g2.fullPivLu().solve(g1).adjoint();
    return block_join(Matrix::Identity(dims.m1(), dims.m1()), right);
  });
  const std::vector<Matrix> b1 =
      integrate(bt, Matrix::Identity(dims.m1(), dims.m1()), [&](const Matrix& s, const Matrix& ds) {
        const Matrix gram = s * j * s.adjoint();
        return Matrix(-(ds * j * s.adjoint()) * gram.inverse());
      });
  std::vector<Matrix> beta;
  beta.reserve(b1.size());
  for (std::size_t i = 0; i < b1.size(); ++i) beta.push_back(b1[i] * bt[i]);
  return GridFunction(gamma.length(), gamma.cells(), gamma.layout(), std::move(beta));
}

GridFunction gamma_hat_pnv(const GridFunction& beta, BlockDims dims, const InverseOptions& options) {
  if (beta.rows() != dims.m1() || beta.cols() != dims.m()) throw ShapeError("beta must be m1 x m");
  const GridFunction gt1 = beta.map([&](std::size_t i, const Matrix& b) {
    const auto [b1, b2] = block_split(b, dims);
    const double s = min_singular(b1);
    if (!(s >= options.definiteness_guard)) {
      throw StageFailure("gamma_hat_pnv", i, "beta1 is singular (min singular value " + std::to_string(s) + ")");
    }
    // beta2* (beta1*)^{-1} = (beta1^{-1} beta2)*
    Matrix t = b1.fullPivLu().solve(b2).adjoint();
    guard_contraction(t, i, "gamma_hat_pnv", options);
    return t;
  });
  std::size_t node = 0;
  const std::vector<Matrix> gh2 =
      integrate(gt1, Matrix::Identity(dims.m2(), dims.m2()), [&](const Matrix& s, const Matrix& ds) {
        guard_contraction(s, ++node, "gamma_hat_pnv", options);
        return contraction_rhs(s, ds);
      });
  std::vector<Matrix> out;
  out.reserve(gh2.size());
  for (std::size_t i = 0; i < gh2.size(); ++i) {
    out.push_back(gh2[i] * block_join(gt1[i], Matrix::Identity(dims.m2(), dims.m2())));
  }
  return GridFunction(beta.length(), beta.cells(), beta.layout(), std::move(out));
}

PotentialProfile potential_from(const GridFunction& beta, const GridFunction& gamma, BlockDims dims) {
  if (!beta.same_grid(gamma)) throw ShapeError("beta and gamma must share a grid");
  if (beta.layout() != Layout::origin_midpoints) throw ShapeError("block rows must live on the recovery grid");
  const Matrix j = SignatureMatrix(dims).matrix();
  const GridFunction db = differentiate(beta);
  const cd i(0.0, 1.0);
  std::vector<Matrix> v;
  v.reserve(beta.size() - 1);
  for (std::size_t k = 1; k < beta.size(); ++k) v.push_back(i * db[k] * j * gamma[k].adjoint());
  return PotentialProfile(dims, GridFunction(beta.length(), beta.cells(), Layout::midpoints, std::move(v)));
}

const ProcedureResult& InversionResult::get(Procedure p) const {
  for (const ProcedureResult& r : procedures) {
    if (r.procedure == p) return r;
  }
  throw Error(std::string("procedure ") + to_string(p) + " was not run");
}

double trimmed_sup_distance(const PotentialProfile& v1, const PotentialProfile& v2, double trim) {
  if (!v1.v().same_grid(v2.v())) throw ShapeError("potentials live on different grids");
  double d = 0.0;
  const double limit = trim * v1.length() + 1e-12;
  for (std::size_t i = 0; i < v1.v().size(); ++i) {
    if (v1.v().coordinate(i) <= limit) d = std::max(d, (v1.v()[i] - v2.v()[i]).cwiseAbs().maxCoeff());
  }
  return d;
}

InversionResult invert(const Phi1Profile& phi, Procedure procedure, const InverseOptions& options) {
  const BlockDims dims = phi.dims;
  const Matrix j = SignatureMatrix(dims).matrix();
  const InverseSolver solver(phi, options);
  InversionResult result;
  InversionDiagnostics& d = result.diagnostics;

  const bool all = procedure == Procedure::all;
  const GridFunction& gphi = solver.gamma_phi();
  const GridFunction bdir = solver.beta_direct();

  d.gamma_phi_j = curve(gphi, gphi, j, -Matrix::Identity(dims.m2(), dims.m2()));
  d.gamma_phi_beta_j = curve(gphi, bdir, j, Matrix::Zero(dims.m2(), dims.m1()));
  d.beta_j = curve(bdir, bdir, j, Matrix::Identity(dims.m1(), dims.m1()));
  d.dbeta_beta_j = curve(differentiate(bdir), bdir, j, Matrix::Zero(dims.m1(), dims.m1()));

  if (all || procedure == Procedure::A) {
    const HamiltonianProfile H = solver.hamiltonian();
    d.hamiltonian_fd_agreement = H.fd_agreement;
    const SchurCoefficient psi = schur_coefficient(H, options);
    d.psi_max_sigma = psi.max_sigma;
    const GridFunction gamma = gamma_from_schur(psi, options);
    const GridFunction beta = beta_from_gamma(gamma, dims, options);
    BlockRowPair rows(dims, beta, gamma);
    result.procedures.push_back({Procedure::A, potential_from(beta, gamma, dims), rows, j_residuals(rows)});
  }
  if (all || procedure == Procedure::B) {
    const GridFunction ghat = gamma_hat_pnv(bdir, dims, options);
    for (const Matrix& b : bdir.samples()) {
      const auto [b1, b2] = block_split(b, dims);
      d.gamma_tilde_max_sigma = std::max(d.gamma_tilde_max_sigma, max_singular(b1.fullPivLu().solve(b2)));
    }
    const GridFunction dghat = differentiate(ghat);
    d.dgamma_hat_j = curve(dghat, ghat, j, Matrix::Zero(dims.m2(), dims.m2()));
    d.gamma_hat_beta_j = curve(ghat, bdir, j, Matrix::Zero(dims.m2(), dims.m1()));
    for (std::size_t i = 0; i < ghat.size(); ++i) {
      d.gamma_phi_vs_gamma_hat = std::max(d.gamma_phi_vs_gamma_hat, (ghat[i] - gphi[i]).norm());
    }
    BlockRowPair rows(dims, bdir, ghat);
    result.procedures.push_back({Procedure::B, potential_from(bdir, ghat, dims), rows, j_residuals(rows)});
  }
  if (all || procedure == Procedure::C) {
    BlockRowPair rows(dims, bdir, gphi);
    result.procedures.push_back({Procedure::C, solver.potential_fast(), rows, j_residuals(rows)});
  }

  for (std::size_t a = 0; a < result.procedures.size(); ++a) {
    for (std::size_t b = a + 1; b < result.procedures.size(); ++b) {
      const std::string key = std::string(to_string(result.procedures[a].procedure)) + "-" +
                              to_string(result.procedures[b].procedure);
      d.deltas[key] = trimmed_sup_distance(result.procedures[a].v, result.procedures[b].v, options.trim);
    }
  }
  d.min_eig_S = positivity(solver.S()).min_eig;
  return result;
}

InversionResult invert(const WeylSamples& w, double length, int cells, Procedure procedure,
                       const InvertOptions& options) {
  return invert(phi1_from_weyl(w, length, cells, options.transform), procedure, options.inverse);
}

}  // namespace diracweyl

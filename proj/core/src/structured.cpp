#include "diracweyl/structured.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "diracweyl/errors.hpp"

namespace diracweyl {

namespace {

int cells_for(double xi, double h, int available) {
  const double k = std::round(xi / h);
  if (std::abs(k * h - xi) > 1e-9 * std::max(1.0, xi)) {
    std::ostringstream os;
    os << "xi = " << xi << " is not a multiple of the cell size " << h;
    throw OffGridError(os.str());
  }
  if (k < 1 || k > available) {
    std::ostringstream os;
    os << "xi = " << xi << " outside (0, " << available * h << "]";
    throw OffGridError(os.str());
  }
  return static_cast<int>(k);
}

Matrix hermitian_from_lower(const Matrix& lower) {
  Matrix S = lower.triangularView<Eigen::StrictlyLower>();
  S += lower.triangularView<Eigen::StrictlyLower>().adjoint();
  S.diagonal() = lower.diagonal().real().cast<cd>();
  return S;
}

}  // namespace

AccelerantKernel::AccelerantKernel(BlockDims dims, GridFunction q) : dims_(dims), q_(std::move(q)) {
  if (q_.layout() != Layout::midpoints) throw ShapeError("accelerant samples live at midpoints");
  if (q_.rows() != dims.m2() || q_.cols() != dims.m1()) throw ShapeError("accelerant samples must be m2 x m1");
  for (const Matrix& s : q_.samples()) {
    if (!s.allFinite()) throw Error("accelerant samples must be finite");
  }
}

AccelerantKernel::AccelerantKernel(const Phi1Profile& phi) : AccelerantKernel(phi.dims, phi.phi1_prime) {}

std::vector<double> AccelerantKernel::prefix_l2_norms() const {
  std::vector<double> out;
  out.reserve(q_.size());
  double sum = 0.0;
  for (const Matrix& s : q_.samples()) {
    sum += s.squaredNorm() * step();
    out.push_back(std::sqrt(sum));
  }
  return out;
}

DiscreteS::DiscreteS(BlockDims dims, double step, int cells, Matrix S)
    : dims_(dims), step_(step), cells_(cells), s_(std::move(S)) {
  if (s_.rows() != static_cast<Eigen::Index>(cells) * dims.m2() || s_.cols() != s_.rows()) {
    throw ShapeError("S must be (n m2) x (n m2)");
  }
}

Matrix DiscreteS::block(int i, int k) const {
  const int m2 = dims_.m2();
  return s_.block(i * m2, k * m2, m2, m2);
}

DiscreteS DiscreteS::leading(int k) const {
  if (k < 1 || k > cells_) throw ShapeError("leading block count out of range");
  const Eigen::Index size = static_cast<Eigen::Index>(k) * dims_.m2();
  return DiscreteS(dims_, step_, k, s_.topLeftCorner(size, size));
}

DiscreteS assemble_S(const AccelerantKernel& kernel, double xi) {
  const double h = kernel.step();
  const int n = cells_for(xi, h, kernel.cells());
  const int m1 = kernel.dims().m1();
  const int m2 = kernel.dims().m2();
  Matrix L = Matrix::Zero(static_cast<Eigen::Index>(n) * m2, static_cast<Eigen::Index>(n) * m1);
  const double first = h / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l <= i; ++l) {
      L.block(i * m2, l * m1, m2, m1) = (l == 0 ? first : h) * kernel.q()[static_cast<std::size_t>(i - l)];
    }
  }
  Matrix lower = Matrix::Identity(L.rows(), L.rows());
  lower.selfadjointView<Eigen::Lower>().rankUpdate(L, -1.0);
  return DiscreteS(kernel.dims(), h, n, hermitian_from_lower(lower));
}

double positivity_threshold(const DiscreteS& S) { return 1e-10 * S.cells() * S.dims().m2(); }

Positivity positivity(const DiscreteS& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S.matrix(), Eigen::EigenvaluesOnly);
  Positivity p;
  p.min_eig = es.eigenvalues().minCoeff();
  p.is_positive = p.min_eig > positivity_threshold(S);
  return p;
}

double identity_residual(const Phi1Profile& phi, double xi) {
  const AccelerantKernel kernel(phi);
  const DiscreteS S = assemble_S(kernel, xi);
  const int n = S.cells();
  const int m2 = phi.dims.m2();
  const double h = S.step();
  const Eigen::Index N = static_cast<Eigen::Index>(n) * m2;
  const cd i(0.0, 1.0);

  Matrix A = Matrix::Zero(N, N);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < r; ++c) A.block(r * m2, c * m2, m2, m2) = -i * h * Matrix::Identity(m2, m2);
    A.block(r * m2, r * m2, m2, m2) = -i * (h / 2) * Matrix::Identity(m2, m2);
  }
  Matrix PjP(N, N);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      PjP.block(r * m2, c * m2, m2, m2) =
          h * (phi.phi1_mid[static_cast<std::size_t>(r)] * phi.phi1_mid[static_cast<std::size_t>(c)].adjoint() -
               Matrix::Identity(m2, m2));
    }
  }
  const Matrix R = A * S.matrix() - S.matrix() * A.adjoint() - i * PjP;

  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(N) / std::sqrt(static_cast<double>(N));
  double sigma2 = 0.0;
  for (int it = 0; it < 20; ++it) {
    Eigen::VectorXcd y = R.adjoint() * (R * x);
    sigma2 = y.norm();
    if (sigma2 == 0.0) return 0.0;
    x = y / sigma2;
  }
  return std::sqrt(sigma2);
}

TriangularFactor::TriangularFactor(BlockDims dims, double step, int cells, Matrix E)
    : dims_(dims), step_(step), cells_(cells), e_(std::move(E)) {
  if (e_.rows() != static_cast<Eigen::Index>(cells) * dims.m2() || e_.cols() != e_.rows()) {
    throw ShapeError("E must be (n m2) x (n m2)");
  }
}

Matrix TriangularFactor::block(int i, int k) const {
  const int m2 = dims_.m2();
  return e_.block(i * m2, k * m2, m2, m2);
}

TriangularFactor TriangularFactor::leading(int k) const {
  if (k < 1 || k > cells_) throw ShapeError("leading block count out of range");
  const Eigen::Index size = static_cast<Eigen::Index>(k) * dims_.m2();
  return TriangularFactor(dims_, step_, k, e_.topLeftCorner(size, size));
}

int first_indefinite_prefix(const DiscreteS& S) {
  auto ok = [&](int k) {
    const Eigen::Index size = static_cast<Eigen::Index>(k) * S.dims().m2();
    Eigen::LLT<Matrix> llt(S.matrix().topLeftCorner(size, size));
    return llt.info() == Eigen::Success;
  };
  if (ok(S.cells())) return S.cells() + 1;
  int lo = 0;  // leading lo blocks factor
  int hi = S.cells();
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

TriangularFactor factorize(const DiscreteS& S) {
  Eigen::LLT<Matrix> llt(S.matrix());
  if (llt.info() != Eigen::Success) {
    const int k = first_indefinite_prefix(S);
    std::ostringstream os;
    os << "S is not positive definite: breakdown in block " << k << " (xi = " << k * S.step() << ")";
    throw NotPositiveDefinite(os.str(), k);
  }
  const int m2 = S.dims().m2();
  const int n = S.cells();
  Matrix C = llt.matrixL();
  Matrix D = Matrix::Zero(C.rows(), C.cols());  // blockdiag(W)
  for (int k = 0; k < n; ++k) {
    const Matrix Lkk = C.block(k * m2, k * m2, m2, m2);
    Eigen::JacobiSVD<Matrix> svd(Lkk, Eigen::ComputeFullU | Eigen::ComputeFullV);
    D.block(k * m2, k * m2, m2, m2) = svd.matrixU() * svd.matrixV().adjoint();
  }
  Matrix Cinv = Matrix::Identity(C.rows(), C.cols());
  C.triangularView<Eigen::Lower>().solveInPlace(Cinv);
  // D C^{-1} is block lower triangular; its diagonal blocks are full m2 x m2.
  Matrix E = D * Cinv.triangularView<Eigen::Lower>();
  return TriangularFactor(S.dims(), S.step(), n, std::move(E));
}

Matrix stack(const GridFunction& f) {
  Matrix out(static_cast<Eigen::Index>(f.size()) * f.rows(), f.cols());
  for (std::size_t i = 0; i < f.size(); ++i) out.middleRows(static_cast<Eigen::Index>(i) * f.rows(), f.rows()) = f[i];
  return out;
}

std::vector<Matrix> unstack(const Matrix& m, Eigen::Index rows) {
  std::vector<Matrix> out;
  for (Eigen::Index r = 0; r < m.rows(); r += rows) out.push_back(m.middleRows(r, rows));
  return out;
}

GridFunction apply_E(const TriangularFactor& E, const GridFunction& f) {
  if (f.layout() != Layout::midpoints || f.cells() < E.cells() || f.rows() != E.dims().m2()) {
    throw ShapeError("apply_E expects midpoint samples with m2 rows on the factor grid");
  }
  if (std::abs(f.step() - E.step()) > 1e-12 * E.step()) throw ShapeError("apply_E grid step mismatch");
  Matrix full = stack(f).topRows(E.matrix().rows());
  Matrix g = E.matrix() * full;
  return GridFunction(E.step() * E.cells(), E.cells(), Layout::midpoints, unstack(g, f.rows()));
}

PrefixSolutions::PrefixSolutions(int cells, Eigen::Index rows, Eigen::Index cols, Matrix data)
    : cells_(cells), rows_(rows), cols_(cols), data_(std::move(data)) {}

Matrix PrefixSolutions::at(int t, int p) const {
  if (t < 0 || p >= cells_ || t > p) throw ShapeError("prefix solution index out of range");
  return data_.block(t * rows_, p * cols_, rows_, cols_);
}

Matrix PrefixSolutions::prefix(int p) const {
  if (p < 0 || p >= cells_) throw ShapeError("prefix index out of range");
  return data_.block(0, p * cols_, (p + 1) * rows_, cols_);
}

PrefixSolutions apply_E_adjoint_tail(const TriangularFactor& E, const GridFunction& f) {
  const GridFunction g = apply_E(E, f);
  const int n = E.cells();
  const int m2 = E.dims().m2();
  const Eigen::Index cols = f.cols();
  Matrix data = Matrix::Zero(static_cast<Eigen::Index>(n) * m2, static_cast<Eigen::Index>(n) * cols);
  for (int t = 0; t < n; ++t) {
    Matrix acc = Matrix::Zero(m2, cols);
    for (int r = t; r < n; ++r) {
      acc.noalias() += E.matrix().block(r * m2, t * m2, m2, m2).adjoint() * g[static_cast<std::size_t>(r)];
      data.block(t * m2, r * cols, m2, cols) = acc;
    }
  }
  return PrefixSolutions(n, m2, cols, std::move(data));
}

}  // namespace diracweyl

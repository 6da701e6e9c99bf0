#ifndef DIRACWEYL_TESTS_ORACLES_HPP
#define DIRACWEYL_TESTS_ORACLES_HPP

// Reference computations that share no code with the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// M = i(zj + jV) for scalar v = c; M^2 = (|c|^2 - z^2) I.
inline Matrix scalar_generator(cd c, cd z) {
  const cd i(0.0, 1.0);
  Matrix M(2, 2);
  M << i * z, i * c, -i * std::conj(c), -i * z;
  return M;
}

/// u(x) = cosh(lambda x) I + sinh(lambda x)/lambda M for scalar v = c.
inline Matrix constant_solution(cd c, cd z, double x) {
  const Matrix M = scalar_generator(c, z);
  const cd lambda = std::sqrt(std::norm(c) - z * z);
  const cd ch = std::cosh(lambda * x);
  const cd sh_over = std::abs(lambda) < 1e-14 ? cd(x) : std::sinh(lambda * x) / lambda;
  return ch * Matrix::Identity(2, 2) + sh_over * M;
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    double t = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[static_cast<std::size_t>(k)] = t;
    w[static_cast<std::size_t>(k)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

/// int_0^b u* u dx for scalar v = c, composite Gauss-Legendre.
inline Matrix constant_gram(cd c, cd z, double b, int panels = 64, int order = 12) {
  std::vector<double> gx;
  std::vector<double> gw;
  gauss_legendre(order, gx, gw);
  Matrix G = Matrix::Zero(2, 2);
  const double w = b / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * w;
    for (int k = 0; k < order; ++k) {
      const double x = mid + 0.5 * w * gx[static_cast<std::size_t>(k)];
      const Matrix u = constant_solution(c, z, x);
      G += 0.5 * w * gw[static_cast<std::size_t>(k)] * (u.adjoint() * u);
    }
  }
  return G;
}

/// phi for scalar v = c from the decaying direction of u: the vector [1; phi] must be the
/// eigenvector of M with eigenvalue lambda, Re lambda < 0.
inline cd constant_weyl(cd c, cd z) {
  Eigen::ComplexEigenSolver<Matrix> es(scalar_generator(c, z));
  const int k = es.eigenvalues()(0).real() < es.eigenvalues()(1).real() ? 0 : 1;
  const Eigen::VectorXcd e = es.eigenvectors().col(k);
  return e(1) / e(0);
}

/// Eigenvalues of I - K on L2(0, xi) for the min-kernel K(s, t) = min(s, t): 1 - (2 xi/((2k-1) pi))^2.
inline double min_kernel_eigenvalue(double xi, int k) {
  const double r = 2.0 * xi / ((2.0 * k - 1.0) * std::numbers::pi);
  return 1.0 - r * r;
}

}  // namespace oracle

#endif  // DIRACWEYL_TESTS_ORACLES_HPP

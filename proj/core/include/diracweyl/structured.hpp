#ifndef DIRACWEYL_STRUCTURED_HPP
#define DIRACWEYL_STRUCTURED_HPP

#include <vector>

#include "diracweyl/transform.hpp"
#include "diracweyl/types.hpp"

namespace diracweyl {

/// Midpoint samples q_i = Phi1'((i + 1/2) h), m2 x m1.
class AccelerantKernel {
 public:
  AccelerantKernel(BlockDims dims, GridFunction q);
  explicit AccelerantKernel(const Phi1Profile& phi);

  BlockDims dims() const { return dims_; }
  const GridFunction& q() const { return q_; }
  double step() const { return q_.step(); }
  int cells() const { return q_.cells(); }

  /// Prefix L2 norms ||q||_{L2(0, (k+1) h)}, k = 0..n-1 (midpoint rule).
  std::vector<double> prefix_l2_norms() const;

 private:
  BlockDims dims_;
  GridFunction q_;
};

/// S = I - L L* on L2(0, xi), unknowns at the cell midpoints. Block (i, l) of L is
/// h q_{i-l} for l >= 1 and h q_i / sqrt(2) for l = 0.
class DiscreteS {
 public:
  DiscreteS(BlockDims dims, double step, int cells, Matrix S);

  BlockDims dims() const { return dims_; }
  int cells() const { return cells_; }
  double step() const { return step_; }
  double xi() const { return step_ * cells_; }
  const Matrix& matrix() const { return s_; }
  Matrix block(int i, int k) const;

  /// The operator on the first k cells.
  DiscreteS leading(int k) const;

 private:
  BlockDims dims_;
  double step_;
  int cells_;
  Matrix s_;
};

/// xi must be a whole number of cells.
DiscreteS assemble_S(const AccelerantKernel& k, double xi);

struct Positivity {
  double min_eig = 0.0;
  bool is_positive = false;
};

/// eps_pos = 1e-10 n m2.
double positivity_threshold(const DiscreteS& S);
Positivity positivity(const DiscreteS& S);

/// Operator norm (20 power-iteration steps) of A S - S A* - i Pi j Pi* on L2(0, xi).
/// A is the midpoint-rule -i integration, Pi = h^(1/2)[Phi1 I] at the midpoints.
double identity_residual(const Phi1Profile& phi, double xi);

/// S^{-1} = E* E with E = C^{-1}, S = C C*, C block lower triangular, Hermitian positive
/// definite diagonal blocks.
class TriangularFactor {
 public:
  TriangularFactor(BlockDims dims, double step, int cells, Matrix E);

  BlockDims dims() const { return dims_; }
  int cells() const { return cells_; }
  double step() const { return step_; }
  const Matrix& matrix() const { return e_; }
  Matrix block(int i, int k) const;
  TriangularFactor leading(int k) const;

 private:
  BlockDims dims_;
  double step_;
  int cells_;
  Matrix e_;
};

/// Throws NotPositiveDefinite naming the first leading block count at which S breaks down.
TriangularFactor factorize(const DiscreteS& S);

/// Index (number of cells) of the first leading block of S that is not positive definite,
/// or S.cells() + 1 when all are.
int first_indefinite_prefix(const DiscreteS& S);

/// g = E f for midpoint samples f with m2 rows.
GridFunction apply_E(const TriangularFactor& E, const GridFunction& f);

/// Y(t, p) = (S_{(p+1)h}^{-1} f)(t) for every prefix p and t <= p.
class PrefixSolutions {
 public:
  PrefixSolutions(int cells, Eigen::Index rows, Eigen::Index cols, Matrix data);

  int cells() const { return cells_; }
  /// Solution sample t on the prefix of p + 1 cells.
  Matrix at(int t, int p) const;
  /// The full solution on the prefix of p + 1 cells, stacked.
  Matrix prefix(int p) const;

 private:
  int cells_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  Matrix data_;
};

PrefixSolutions apply_E_adjoint_tail(const TriangularFactor& E, const GridFunction& f);

/// Stacks midpoint samples into an (n rows) x cols column block.
Matrix stack(const GridFunction& f);
std::vector<Matrix> unstack(const Matrix& m, Eigen::Index rows);

}  // namespace diracweyl

#endif  // DIRACWEYL_STRUCTURED_HPP

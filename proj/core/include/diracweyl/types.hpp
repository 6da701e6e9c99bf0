#ifndef DIRACWEYL_TYPES_HPP
#define DIRACWEYL_TYPES_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace diracweyl {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Block sizes of the Dirac system: v is m1 x m2, fundamental solutions are m x m.
class BlockDims {
 public:
  BlockDims(int m1, int m2);

  int m1() const { return m1_; }
  int m2() const { return m2_; }
  int m() const { return m1_ + m2_; }

  friend bool operator==(const BlockDims&, const BlockDims&) = default;

 private:
  int m1_;
  int m2_;
};

/// j = diag(I_{m1}, -I_{m2}).
class SignatureMatrix {
 public:
  explicit SignatureMatrix(BlockDims dims);

  BlockDims dims() const { return dims_; }
  const Matrix& matrix() const { return j_; }

 private:
  BlockDims dims_;
  Matrix j_;
};

/// Where the samples of a GridFunction sit on the uniform grid of [0, L] with n cells.
enum class Layout {
  nodes,            // x_i = i h, i = 0..n
  midpoints,        // x_i = (i + 1/2) h, i = 0..n-1
  origin_midpoints  // x_0 = 0, x_{i+1} = (i + 1/2) h; the natural grid of the inverse solver
};

const char* to_string(Layout layout);

/// Sample count for a layout on n cells.
std::size_t sample_count(Layout layout, int cells);

/// Matrix samples of a function on a uniform grid of [0, L]. Immutable once built.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(double length, int cells, Layout layout, std::vector<Matrix> samples);

  /// Samples f(x_i) for every coordinate of the layout.
  static GridFunction sample(double length, int cells, Layout layout,
                             const std::function<Matrix(double)>& f);

  double length() const { return length_; }
  int cells() const { return cells_; }
  double step() const { return length_ / cells_; }
  Layout layout() const { return layout_; }

  std::size_t size() const { return samples_.size(); }
  Eigen::Index rows() const { return samples_.empty() ? 0 : samples_.front().rows(); }
  Eigen::Index cols() const { return samples_.empty() ? 0 : samples_.front().cols(); }

  double coordinate(std::size_t i) const;
  std::vector<double> coordinates() const;

  const Matrix& operator[](std::size_t i) const { return samples_[i]; }
  std::span<const Matrix> samples() const { return samples_; }

  /// Same grid and layout, samples replaced by f(i, sample).
  GridFunction map(const std::function<Matrix(std::size_t, const Matrix&)>& f) const;

  /// Max over samples of the Frobenius norm.
  double sup_norm() const;

  bool same_grid(const GridFunction& other) const;

 private:
  double length_ = 0.0;
  int cells_ = 0;
  Layout layout_ = Layout::nodes;
  std::vector<Matrix> samples_;
};

/// m1 x m2 potential sampled at cell midpoints; piecewise constant on cells.
class PotentialProfile {
 public:
  PotentialProfile(BlockDims dims, GridFunction v);

  /// v sampled at the midpoints of n cells of [0, L].
  static PotentialProfile from_function(BlockDims dims, double length, int cells,
                                        const std::function<Matrix(double)>& v);
  static PotentialProfile constant(const Matrix& value, double length, int cells);

  BlockDims dims() const { return dims_; }
  const GridFunction& v() const { return v_; }
  double length() const { return v_.length(); }
  int cells() const { return v_.cells(); }
  double step() const { return v_.step(); }

  /// Value of the piecewise-constant profile at x (cell containing x; x = L maps to the last cell).
  const Matrix& at(double x) const;

  /// The off-diagonal Hermitian block V = [0 v; v* 0] of cell i.
  Matrix block_potential(std::size_t cell) const;

 private:
  BlockDims dims_;
  GridFunction v_;
};

/// beta (m1 x m) and gamma (m2 x m): the block rows of u(x, 0).
struct BlockRowPair {
  BlockDims dims;
  GridFunction beta;
  GridFunction gamma;

  BlockRowPair(BlockDims dims, GridFunction beta, GridFunction gamma);
};

/// Sup-norms of the j-identity residual curves
/// beta j beta* - I, gamma j gamma* + I, beta j gamma*, gamma' j gamma*.
struct JResiduals {
  std::vector<double> beta_beta;
  std::vector<double> gamma_gamma;
  std::vector<double> beta_gamma;
  std::vector<double> dgamma_gamma;

  double sup_beta_beta() const;
  double sup_gamma_gamma() const;
  double sup_beta_gamma() const;
  double sup_dgamma_gamma() const;
  double sup() const;
};

JResiduals j_residuals(const BlockRowPair& pair);

/// Splits the columns of an m_k x m row at m1.
std::pair<Matrix, Matrix> block_split(const Matrix& row, BlockDims dims);
Matrix block_join(const Matrix& left, const Matrix& right);

/// Second-order derivative: three-point central differences (nonuniform where the
/// layout is), one-sided three-point stencils at both ends.
GridFunction differentiate(const GridFunction& f);

/// Trapezoid L2(0, L) norm of Frobenius norms; for midpoint layouts, the midpoint rule.
double l2_norm(const GridFunction& f);

/// Sup-norm over the samples whose coordinate is <= x_max.
double sup_norm_until(const GridFunction& f, double x_max);

}  // namespace diracweyl

#endif  // DIRACWEYL_TYPES_HPP

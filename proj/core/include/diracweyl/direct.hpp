#ifndef DIRACWEYL_DIRECT_HPP
#define DIRACWEYL_DIRECT_HPP

#include <functional>
#include <vector>

#include "diracweyl/types.hpp"

namespace diracweyl {

struct DirectOptions {
  /// Truncation lengths b for the Weyl extraction; empty means {L/4, L/2, L}.
  std::vector<double> b_schedule;
  double tol_weyl = 1e-6;
  double tol_contr = 1e-8;
  /// Worker threads for weyl_line; 0 reads DIRACWEYL_THREADS, falling back to 1.
  int threads = 0;
};

/// u(x_i, z) at the nodes of the potential grid.
struct FundamentalSolutionSlice {
  cd z;
  GridFunction u;
};

/// Integrates u' = i(zj + jV)u, u(0) = I, by exact exponentials of the frozen cell matrices.
FundamentalSolutionSlice propagate(const PotentialProfile& v, cd z);

/// Above this eta*b the unscaled Gram matrix is refused.
inline constexpr double gram_overflow_cap = 300.0;

/// G(b, z) = int_0^b u* u dx. b must be a grid node.
Matrix gram(const PotentialProfile& v, cd z, double b);

struct WeylPoint {
  Matrix phi;
  bool converged = false;
  /// Frobenius increments between consecutive schedule entries.
  std::vector<double> increments;
  double sigma_max = 0.0;

  double last_increment() const { return increments.empty() ? 0.0 : increments.back(); }
};

/// phi_b = -G22(b)^{-1} G21(b) over the schedule. Throws NonConvergence when the
/// last increment exceeds tol_weyl.
WeylPoint weyl_point(const PotentialProfile& v, cd z, const DirectOptions& options = {});

/// Same iteration, never throws on non-convergence (the flag is cleared instead).
WeylPoint weyl_point_unchecked(const PotentialProfile& v, cd z, const DirectOptions& options = {});

/// phi(zeta_k + i eta) on the uniform grid zeta_k = -a + k * 2a/(nz-1), k = 0..nz-1.
class WeylSamples {
 public:
  WeylSamples(BlockDims dims, double eta, double a, std::vector<Matrix> values,
              std::vector<bool> converged = {});

  static WeylSamples from_function(BlockDims dims, double eta, double a, int nz,
                                   const std::function<Matrix(cd)>& phi);

  BlockDims dims() const { return dims_; }
  double eta() const { return eta_; }
  double a() const { return a_; }
  int nz() const { return static_cast<int>(values_.size()); }
  double step() const { return 2.0 * a_ / (nz() - 1); }
  double zeta(int k) const { return -a_ + k * step(); }
  cd z(int k) const { return {zeta(k), eta_}; }

  const Matrix& operator[](int k) const { return values_[static_cast<std::size_t>(k)]; }
  const std::vector<Matrix>& values() const { return values_; }
  const std::vector<bool>& converged() const { return converged_; }
  bool all_converged() const;
  int failures() const;

  double max_singular_value() const;

  /// Samples with |zeta| <= a_new; a_new must be a grid point.
  WeylSamples truncated(double a_new) const;

 private:
  BlockDims dims_;
  double eta_;
  double a_;
  std::vector<Matrix> values_;
  std::vector<bool> converged_;
};

/// weyl_point along zeta + i eta. Non-converged points keep their last phi_b and a
/// cleared flag.
WeylSamples weyl_line(const PotentialProfile& v, double eta, double a, int nz,
                      const DirectOptions& options = {});

/// Scalar closed form for v = c: phi = (lambda - iz)/(ic), lambda^2 = |c|^2 - z^2, Re lambda < 0.
cd constant_potential_weyl_oracle(cd c, cd z);

/// DIRACWEYL_THREADS if set and positive, else 1.
int default_thread_count();

}  // namespace diracweyl

#endif  // DIRACWEYL_DIRECT_HPP

#ifndef DIRACWEYL_TRANSFORM_HPP
#define DIRACWEYL_TRANSFORM_HPP

#include <functional>
#include <string>

#include "diracweyl/direct.hpp"
#include "diracweyl/types.hpp"

namespace diracweyl {

enum class DerivativeSource {
  finite_difference,  // cell differences of the node values of Phi1
  direct_transform    // the differentiated integral
};

struct TransformOptions {
  /// Raised-cosine weight on the outer 10% of [-a, a].
  bool taper = false;
  /// Fit phi ~ sum_{k<=tail_order} alpha_k (z + i kappa)^-k with kappa = max(1, 10 dzeta) on
  /// |zeta| >= tail_fit_fraction*a, transform the remainder numerically and add the model's
  /// exact transform back.
  bool tail_subtraction = false;
  int tail_order = 4;
  double tail_fit_fraction = 0.5;
  DerivativeSource derivative = DerivativeSource::finite_difference;

  /// Preset for inversions: taper and tail subtraction on.
  static TransformOptions round_trip();
};

enum class Provenance { from_weyl, synthetic };

const char* to_string(Provenance p);

/// Phi1 at nodes and midpoints of [0, L], Phi1' at midpoints; all samples m2 x m1.
struct Phi1Profile {
  BlockDims dims;
  GridFunction phi1;        // nodes
  GridFunction phi1_mid;    // midpoints
  GridFunction phi1_prime;  // midpoints
  Provenance provenance = Provenance::synthetic;
  /// Estimate of Phi1(0+) (the right limit at the origin).
  Matrix origin_value;
  /// L2(0, L) size of the contribution of the outer 10% of the zeta range.
  double tail_estimate = 0.0;

  Phi1Profile(BlockDims dims, GridFunction phi1, GridFunction phi1_mid, GridFunction phi1_prime,
              Provenance provenance, Matrix origin_value, double tail_estimate = 0.0);

  /// Phi1 from a closed form; Phi1' from its closed form when given, else from cell differences.
  static Phi1Profile synthetic(BlockDims dims, double length, int cells,
                               const std::function<Matrix(double)>& phi1,
                               const std::function<Matrix(double)>& phi1_prime = {});
  static Phi1Profile zero(BlockDims dims, double length, int cells);

  double length() const { return phi1.length(); }
  int cells() const { return phi1.cells(); }
  double step() const { return phi1.step(); }
};

/// Trapezoid quadrature of (1/pi) e^{2y eta} int e^{-2iy zeta} phi/(2i(zeta+i eta)) dzeta at the
/// nodes and midpoints of [0, L]. Throws AliasingError when the zeta step exceeds pi/(2L).
Phi1Profile phi1_from_weyl(const WeylSamples& w, double length, int cells,
                           const TransformOptions& options = {});

struct Phi1PrimeReport {
  GridFunction phi1_prime;  // midpoints, from the differentiated integral
  /// L2(0, L) distance to the cell differences of phi1_from_weyl.
  double fd_discrepancy = 0.0;
};

/// Phi1'(y) = -(1/pi) e^{2y eta} int e^{-2iy zeta} phi dzeta at the midpoints.
Phi1PrimeReport phi1_prime_from_weyl(const WeylSamples& w, double length, int cells,
                                     const TransformOptions& options = {});

/// L2(0, L) distance between the node profiles of Phi1 computed at two heights.
double eta_independence_check(const WeylSamples& w1, const WeylSamples& w2, double length, int cells,
                              const TransformOptions& options = {});

/// Largest zeta step the transform accepts on [0, L].
double max_zeta_step(double length);

}  // namespace diracweyl

#endif  // DIRACWEYL_TRANSFORM_HPP

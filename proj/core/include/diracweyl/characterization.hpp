#ifndef DIRACWEYL_CHARACTERIZATION_HPP
#define DIRACWEYL_CHARACTERIZATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "diracweyl/direct.hpp"
#include "diracweyl/transform.hpp"

namespace diracweyl {

struct CheckOptions {
  double tol_contr = 1e-8;
  /// Origin clause threshold, relative to sup |Phi1|.
  double tol_origin_rel = 1e-2;
  /// Number of equispaced prefixes when no sweep is given.
  int sweep_points = 16;
  TransformOptions transform;
};

struct ContractivityClause {
  double max_sigma = 0.0;
  bool pass = false;
};

struct OriginClause {
  double value = 0.0;  // |Phi1(0+)|
  double threshold = 0.0;
  bool pass = false;
};

struct SquareIntegrabilityClause {
  std::vector<double> prefix_norms;
  bool finite = false;
  /// ||Phi1(a) - Phi1(a/2)|| and ||Phi1(a/2) - Phi1(a/4)|| in L2(0, L).
  double change_full = 0.0;
  double change_half = 0.0;
  bool tail_convergent = false;
  bool pass = false;
};

struct PositivityClause {
  std::vector<double> xi;
  std::vector<double> min_eig;
  /// Smallest xi at which S_xi stops being positive definite.
  std::optional<double> failing_xi;
  bool monotone = true;
  bool pass = false;
};

struct CharacterizationReport {
  static constexpr const char* holomorphy_banner =
      "holomorphy assumed: samples on one horizontal line cannot certify it";

  ContractivityClause contractivity;
  OriginClause origin;
  SquareIntegrabilityClause square_integrability;
  PositivityClause positivity;
  bool accept = false;
  /// Empty when accepted.
  std::string failing_clause;
};

/// Min eigenvalue of S_xi for each xi, from nested leading blocks of one S.
PositivityClause positivity_sweep(const Phi1Profile& phi, const std::vector<double>& xi_grid);

/// k/count * L for k = 1..count, snapped to the grid.
std::vector<double> default_sweep(double length, int cells, int count);

CharacterizationReport check(const WeylSamples& w, double length, int cells,
                             const std::vector<double>& xi_sweep = {}, const CheckOptions& options = {});

}  // namespace diracweyl

#endif  // DIRACWEYL_CHARACTERIZATION_HPP

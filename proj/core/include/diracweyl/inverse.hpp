#ifndef DIRACWEYL_INVERSE_HPP
#define DIRACWEYL_INVERSE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diracweyl/direct.hpp"
#include "diracweyl/structured.hpp"
#include "diracweyl/transform.hpp"
#include "diracweyl/types.hpp"

namespace diracweyl {

// Recovered block rows live on the grid {0} U {cell midpoints} (Layout::origin_midpoints);
// potentials come out at the midpoints.

enum class Procedure { A, B, C, all };

const char* to_string(Procedure p);
Procedure procedure_from_string(const std::string& s);

struct InverseOptions {
  /// Minimum eigenvalue of I - psi psi*, I - gt1 gt1* and singular value of gamma2, beta1.
  double definiteness_guard = 1e-8;
  /// Fraction of [0, L] on which recovery errors and procedure deltas are quoted.
  double trim = 0.9;
};

/// H = gamma* gamma (m x m) on the recovery grid, plus the difference form of (Pi* S^{-1} Pi)'.
struct HamiltonianProfile {
  BlockDims dims;
  GridFunction H;     // origin_midpoints
  GridFunction H_fd;  // midpoints
  /// max over midpoints of ||H - H_fd||.
  double fd_agreement = 0.0;
};

struct SchurCoefficient {
  BlockDims dims;
  GridFunction psi;  // m2 x m1, origin_midpoints
  double max_sigma = 0.0;
};

/// Factorization of S on [0, L] and everything derived from the single factor E.
class InverseSolver {
 public:
  explicit InverseSolver(Phi1Profile phi, InverseOptions options = {});

  const Phi1Profile& phi() const { return phi_; }
  BlockDims dims() const { return phi_.dims; }
  const InverseOptions& options() const { return options_; }
  const DiscreteS& S() const { return S_; }
  const TriangularFactor& factor() const { return E_; }

  /// E Phi1' at the midpoints (m2 x m1).
  const GridFunction& g() const { return g_; }
  /// gamma_Phi = E [Phi1 I] with gamma_Phi(0) = [0 I].
  const GridFunction& gamma_phi() const { return gamma_phi_; }

  HamiltonianProfile hamiltonian() const;
  /// [I 0] + int_0^x (E Phi1')(t)* gamma_Phi(t) dt.
  GridFunction beta_direct() const;
  /// v = -i (E Phi1')*.
  PotentialProfile potential_fast() const;

 private:
  Phi1Profile phi_;
  InverseOptions options_;
  DiscreteS S_;
  TriangularFactor E_;
  GridFunction g_;
  GridFunction gamma_phi_;
};

GridFunction gamma_phi(const Phi1Profile& phi);
HamiltonianProfile hamiltonian(const Phi1Profile& phi);
GridFunction beta_direct(const Phi1Profile& phi);
PotentialProfile potential_fast(const Phi1Profile& phi);

/// psi = H22^{-1} H21.
SchurCoefficient schur_coefficient(const HamiltonianProfile& H, const InverseOptions& options = {});
/// gamma2' = gamma2 psi' psi* (I - psi psi*)^{-1}, gamma2(0) = I; gamma1 = gamma2 psi.
GridFunction gamma_from_schur(const SchurCoefficient& psi, const InverseOptions& options = {});
/// beta = beta1 [I  gamma1* (gamma2*)^{-1}], beta1' = -beta1 (bt' j bt*)(bt j bt*)^{-1}, beta1(0) = I.
GridFunction beta_from_gamma(const GridFunction& gamma, BlockDims dims, const InverseOptions& options = {});
/// gt1 = beta2* (beta1*)^{-1}; gh2' = gh2 gt1' gt1* (I - gt1 gt1*)^{-1}, gh2(0) = I; gamma_hat = gh2 [gt1 I].
GridFunction gamma_hat_pnv(const GridFunction& beta, BlockDims dims, const InverseOptions& options = {});
/// v = i beta' j gamma* at the midpoints.
PotentialProfile potential_from(const GridFunction& beta, const GridFunction& gamma, BlockDims dims);

struct ProcedureResult {
  Procedure procedure;
  PotentialProfile v;
  /// The block rows the procedure produced (A: beta, gamma; B: beta_direct, gamma_hat;
  /// C: beta_direct, gamma_Phi).
  BlockRowPair rows;
  JResiduals residuals;
};

struct InversionDiagnostics {
  /// gamma_Phi j gamma_Phi* + I.
  std::vector<double> gamma_phi_j;
  /// gamma_Phi j beta_direct*.
  std::vector<double> gamma_phi_beta_j;
  /// beta_direct j beta_direct* - I.
  std::vector<double> beta_j;
  /// beta_direct' j beta_direct*.
  std::vector<double> dbeta_beta_j;
  /// gamma_hat' j gamma_hat* and gamma_hat j beta_direct*.
  std::vector<double> dgamma_hat_j;
  std::vector<double> gamma_hat_beta_j;
  double hamiltonian_fd_agreement = 0.0;
  double psi_max_sigma = 0.0;
  double gamma_tilde_max_sigma = 0.0;
  /// gamma_Phi vs gamma_hat (sup over the grid).
  double gamma_phi_vs_gamma_hat = 0.0;
  /// Pairwise sup differences of recovered potentials on the trimmed window, keyed "A-B" etc.
  std::map<std::string, double> deltas;
  double min_eig_S = 0.0;
};

struct InversionResult {
  std::vector<ProcedureResult> procedures;
  InversionDiagnostics diagnostics;

  const ProcedureResult& get(Procedure p) const;
  /// The first procedure run.
  const PotentialProfile& potential() const { return procedures.front().v; }
};

InversionResult invert(const Phi1Profile& phi, Procedure procedure, const InverseOptions& options = {});

struct InvertOptions {
  TransformOptions transform = TransformOptions::round_trip();
  InverseOptions inverse;
};

InversionResult invert(const WeylSamples& w, double length, int cells, Procedure procedure,
                       const InvertOptions& options = {});

/// sup over midpoints x <= trim*L of |v1 - v2|.
double trimmed_sup_distance(const PotentialProfile& v1, const PotentialProfile& v2, double trim);

}  // namespace diracweyl

#endif  // DIRACWEYL_INVERSE_HPP

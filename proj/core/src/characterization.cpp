#include "diracweyl/characterization.hpp"

#include <algorithm>
#include <cmath>

#include "diracweyl/errors.hpp"
#include "diracweyl/structured.hpp"

namespace diracweyl {

namespace {

double max_entry(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double sup_entry(const GridFunction& f) {
  double s = 0.0;
  for (const Matrix& m : f.samples()) s = std::max(s, max_entry(m));
  return s;
}

double l2_distance(const GridFunction& a, const GridFunction& b) {
  return l2_norm(a.map([&](std::size_t i, const Matrix& s) { return Matrix(s - b[i]); }));
}

/// Largest zeta grid point not above target.
double snap_down(const WeylSamples& w, double target) {
  return std::floor(target / w.step() + 1e-9) * w.step();
}

}  // namespace

std::vector<double> default_sweep(double length, int cells, int count) {
  std::vector<double> xi;
  const double h = length / cells;
  for (int k = 1; k <= count; ++k) {
    const double c = std::max(1.0, std::round(static_cast<double>(k) * cells / count));
    xi.push_back(c * h);
  }
  xi.erase(std::unique(xi.begin(), xi.end()), xi.end());
  return xi;
}

PositivityClause positivity_sweep(const Phi1Profile& phi, const std::vector<double>& xi_grid) {
  PositivityClause out;
  if (xi_grid.empty()) {
    out.pass = true;
    return out;
  }
  std::vector<double> xi = xi_grid;
  std::sort(xi.begin(), xi.end());
  const AccelerantKernel kernel(phi);
  const DiscreteS S = assemble_S(kernel, xi.back());
  const double h = S.step();
  double prev = 1e300;
  for (double x : xi) {
    const int k = static_cast<int>(std::lround(x / h));
    const DiscreteS Sk = S.leading(std::clamp(k, 1, S.cells()));
    const Positivity p = positivity(Sk);
    out.xi.push_back(x);
    out.min_eig.push_back(p.min_eig);
    if (p.min_eig > prev + 1e-12) out.monotone = false;
    prev = p.min_eig;
    if (!p.is_positive && !out.failing_xi) out.failing_xi = x;
  }
  const int breakdown = first_indefinite_prefix(S);
  if (breakdown <= S.cells()) {
    const double at = breakdown * h;
    out.failing_xi = out.failing_xi ? std::min(*out.failing_xi, at) : at;
  }
  out.pass = !out.failing_xi.has_value();
  return out;
}

CharacterizationReport check(const WeylSamples& w, double length, int cells, const std::vector<double>& xi_sweep,
                             const CheckOptions& options) {
  CharacterizationReport r;

  r.contractivity.max_sigma = w.max_singular_value();
  r.contractivity.pass = r.contractivity.max_sigma <= 1.0 + options.tol_contr;

  const Phi1Profile phi = phi1_from_weyl(w, length, cells, options.transform);
  r.origin.value = max_entry(phi.origin_value);
  r.origin.threshold = options.tol_origin_rel * sup_entry(phi.phi1);
  r.origin.pass = r.origin.value <= r.origin.threshold;

  SquareIntegrabilityClause& sq = r.square_integrability;
  sq.prefix_norms = AccelerantKernel(phi).prefix_l2_norms();
  sq.finite = std::all_of(sq.prefix_norms.begin(), sq.prefix_norms.end(), [](double v) { return std::isfinite(v); });
  const Phi1Profile half = phi1_from_weyl(w.truncated(snap_down(w, 0.5 * w.a())), length, cells, options.transform);
  const Phi1Profile quarter =
      phi1_from_weyl(w.truncated(snap_down(w, 0.25 * w.a())), length, cells, options.transform);
  sq.change_full = l2_distance(phi.phi1, half.phi1);
  sq.change_half = l2_distance(half.phi1, quarter.phi1);
  const double negligible = 1e-8 * (1.0 + l2_norm(phi.phi1));
  sq.tail_convergent = sq.change_full <= sq.change_half || sq.change_full <= negligible;
  sq.pass = sq.finite && sq.tail_convergent;

  const std::vector<double> sweep =
      xi_sweep.empty() ? default_sweep(length, cells, options.sweep_points) : xi_sweep;
  r.positivity = positivity_sweep(phi, sweep);

  if (!r.contractivity.pass) {
    r.failing_clause = "contractivity";
  } else if (!r.origin.pass) {
    r.failing_clause = "origin";
  } else if (!sq.pass) {
    r.failing_clause = "square_integrability";
  } else if (!r.positivity.pass) {
    r.failing_clause = "positivity";
  }
  r.accept = r.failing_clause.empty();
  return r;
}

}  // namespace diracweyl

#include "commands.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <diracweyl/diracweyl.hpp>

namespace diracweyl::cli {

using nlohmann::ordered_json;

namespace {

double sup(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, x);
  return s;
}

TransformOptions plain_transform(const RunConfig& c) {
  TransformOptions o;
  o.taper = c.taper;
  o.tail_subtraction = c.tail_subtraction;
  return o;
}

TransformOptions inversion_transform(const RunConfig& c) {
  return c.round_trip_preset ? TransformOptions::round_trip() : plain_transform(c);
}

DirectOptions direct_options(const RunConfig& c) {
  DirectOptions o;
  o.b_schedule = c.b_schedule;
  o.tol_weyl = c.tol_weyl;
  o.tol_contr = c.tol_contr;
  return o;
}

CheckOptions check_options(const RunConfig& c) {
  CheckOptions o;
  o.tol_contr = c.tol_contr;
  o.tol_origin_rel = c.tol_origin;
  o.sweep_points = c.sweep_points;
  o.transform = plain_transform(c);
  return o;
}

InverseOptions inverse_options(const RunConfig& c) {
  InverseOptions o;
  o.definiteness_guard = c.tol_definite;
  return o;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw std::invalid_argument(std::string("missing required ") + flag);
}

ordered_json report_json(const CharacterizationReport& r) {
  ordered_json j;
  j["verdict"] = r.accept ? "accept" : "reject";
  j["failing_clause"] = r.failing_clause.empty() ? ordered_json(nullptr) : ordered_json(r.failing_clause);
  j["banner"] = CharacterizationReport::holomorphy_banner;
  j["contractivity"] = {{"max_sigma", r.contractivity.max_sigma}, {"pass", r.contractivity.pass}};
  j["origin"] = {{"value", r.origin.value}, {"threshold", r.origin.threshold}, {"pass", r.origin.pass}};
  const SquareIntegrabilityClause& sq = r.square_integrability;
  j["square_integrability"] = {{"finite", sq.finite},
                               {"change_full", sq.change_full},
                               {"change_half", sq.change_half},
                               {"tail_convergent", sq.tail_convergent},
                               {"pass", sq.pass},
                               {"prefix_norms", sq.prefix_norms}};
  const PositivityClause& p = r.positivity;
  j["positivity"] = {{"xi", p.xi},
                     {"min_eig", p.min_eig},
                     {"failing_xi", p.failing_xi ? ordered_json(*p.failing_xi) : ordered_json(nullptr)},
                     {"monotone", p.monotone},
                     {"pass", p.pass}};
  return j;
}

ordered_json residual_json(const JResiduals& r) {
  return {{"beta_j_beta", r.sup_beta_beta()},
          {"gamma_j_gamma", r.sup_gamma_gamma()},
          {"beta_j_gamma", r.sup_beta_gamma()},
          {"dgamma_j_gamma", r.sup_dgamma_gamma()},
          {"curves",
           {{"beta_j_beta", r.beta_beta},
            {"gamma_j_gamma", r.gamma_gamma},
            {"beta_j_gamma", r.beta_gamma},
            {"dgamma_j_gamma", r.dgamma_gamma}}}};
}

ordered_json diagnostics_json(const InversionResult& r) {
  const InversionDiagnostics& d = r.diagnostics;
  ordered_json j;
  ordered_json procs = ordered_json::object();
  for (const ProcedureResult& p : r.procedures) procs[to_string(p.procedure)] = residual_json(p.residuals);
  j["procedures"] = procs;
  ordered_json deltas = ordered_json::object();
  for (const auto& [k, v] : d.deltas) deltas[k] = v;
  j["deltas"] = deltas;
  j["invariants"] = {{"gamma_phi_j", sup(d.gamma_phi_j)},
                     {"gamma_phi_beta_j", sup(d.gamma_phi_beta_j)},
                     {"beta_j", sup(d.beta_j)},
                     {"dbeta_beta_j", sup(d.dbeta_beta_j)},
                     {"dgamma_hat_j", sup(d.dgamma_hat_j)},
                     {"gamma_hat_beta_j", sup(d.gamma_hat_beta_j)},
                     {"hamiltonian_fd_agreement", d.hamiltonian_fd_agreement},
                     {"psi_max_sigma", d.psi_max_sigma},
                     {"gamma_tilde_max_sigma", d.gamma_tilde_max_sigma},
                     {"gamma_phi_vs_gamma_hat", d.gamma_phi_vs_gamma_hat},
                     {"min_eig_S", d.min_eig_S}};
  j["curves"] = {{"gamma_phi_j", d.gamma_phi_j},
                 {"gamma_phi_beta_j", d.gamma_phi_beta_j},
                 {"beta_j", d.beta_j},
                 {"dbeta_beta_j", d.dbeta_beta_j},
                 {"dgamma_hat_j", d.dgamma_hat_j},
                 {"gamma_hat_beta_j", d.gamma_hat_beta_j}};
  return j;
}

void write_json(const std::string& path, const ordered_json& j) { write_atomic(path, j.dump(2) + "\n"); }

/// Boundaries between cells of the input potential where its value changes.
std::vector<double> jump_points(const PotentialProfile& v) {
  std::vector<double> jumps;
  for (std::size_t i = 1; i < v.v().size(); ++i) {
    if ((v.v()[i] - v.v()[i - 1]).cwiseAbs().maxCoeff() > 1e-12) jumps.push_back(static_cast<double>(i) * v.step());
  }
  return jumps;
}

struct RecoveryError {
  double max = 0.0;
  double l2 = 0.0;
  double max_away = 0.0;
};

RecoveryError recovery_error(const PotentialProfile& truth, const PotentialProfile& v, double trim,
                             const std::vector<double>& jumps) {
  RecoveryError e;
  const double h = v.step();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.v().size(); ++i) {
    const double x = v.v().coordinate(i);
    if (x > trim * v.length() + 1e-12) break;
    const Matrix diff = v.v()[i] - truth.at(x);
    const double d = diff.cwiseAbs().maxCoeff();
    e.max = std::max(e.max, d);
    sum += diff.squaredNorm() * h;
    bool near = x <= 3 * h;
    for (double jx : jumps) near = near || std::abs(x - jx) <= 3 * h;
    if (!near) e.max_away = std::max(e.max_away, d);
  }
  e.l2 = std::sqrt(sum);
  return e;
}

}  // namespace

void RunConfig::validate() const {
  for (const auto& [name, value] : {std::pair<const char*, double>{"tol_weyl", tol_weyl},
                                    {"tol_contr", tol_contr},
                                    {"tol_origin", tol_origin},
                                    {"tol_definite", tol_definite},
                                    {"L", L},
                                    {"eta", eta},
                                    {"a", a}}) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(std::string(name) + " must be positive");
    }
  }
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("n must be a power of two >= 2");
  if (nz < 2) throw std::invalid_argument("nz must be at least 2");
  if (sweep_points < 1) throw std::invalid_argument("sweep_points must be positive");
  for (double b : b_schedule) {
    if (!(b > 0.0)) throw std::invalid_argument("b_schedule entries must be positive");
  }
  try {
    procedure_from_string(procedure);
  } catch (const Error& e) {
    throw std::invalid_argument(e.what());
  }
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  j["potential"] = c.potential;
  j["weyl"] = c.weyl;
  j["phi1"] = c.phi1;
  j["output"] = c.output;
  j["diagnostics"] = c.diagnostics;
  j["report"] = c.report;
  j["L"] = c.L;
  j["n"] = c.n;
  j["eta"] = c.eta;
  j["a"] = c.a;
  j["nz"] = c.nz;
  j["b_schedule"] = c.b_schedule;
  j["procedure"] = c.procedure;
  j["tol_weyl"] = c.tol_weyl;
  j["tol_contr"] = c.tol_contr;
  j["tol_origin"] = c.tol_origin;
  j["tol_definite"] = c.tol_definite;
  j["sweep_points"] = c.sweep_points;
  j["taper"] = c.taper;
  j["tail_subtraction"] = c.tail_subtraction;
  j["round_trip_preset"] = c.round_trip_preset;
  j["force"] = c.force;
  return j;
}

RunConfig config_from_json(const ordered_json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  RunConfig c;
  const ordered_json defaults = to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    get("command", c.command);
    get("potential", c.potential);
    get("weyl", c.weyl);
    get("phi1", c.phi1);
    get("output", c.output);
    get("diagnostics", c.diagnostics);
    get("report", c.report);
    get("L", c.L);
    get("n", c.n);
    get("eta", c.eta);
    get("a", c.a);
    get("nz", c.nz);
    get("b_schedule", c.b_schedule);
    get("procedure", c.procedure);
    get("tol_weyl", c.tol_weyl);
    get("tol_contr", c.tol_contr);
    get("tol_origin", c.tol_origin);
    get("tol_definite", c.tol_definite);
    get("sweep_points", c.sweep_points);
    get("taper", c.taper);
    get("tail_subtraction", c.tail_subtraction);
    get("round_trip_preset", c.round_trip_preset);
    get("force", c.force);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  return c;
}

int cmd_direct(const RunConfig& c) {
  require(c.potential, "--potential");
  require(c.output, "--output");
  const PotentialProfile v = read_potential(c.potential);
  const WeylSamples w = weyl_line(v, c.eta, c.a, c.nz, direct_options(c));
  write_weyl(c.output, w);
  std::cout << "wrote " << w.nz() << " Weyl samples to " << c.output << " (max sigma " << w.max_singular_value()
            << ")\n";
  if (w.failures() > 0) {
    std::cerr << w.failures() << " of " << w.nz() << " points did not converge within the b schedule\n";
    return exit_nonconvergence;
  }
  return exit_ok;
}

int cmd_transform(const RunConfig& c) {
  require(c.weyl, "--weyl");
  require(c.output, "--output");
  const WeylSamples w = read_weyl(c.weyl);
  const Phi1Profile p = phi1_from_weyl(w, c.L, c.n, inversion_transform(c));
  write_phi1(c.output, p);
  std::cout << "wrote Phi1 on [0, " << c.L << "] with " << c.n << " cells to " << c.output << " (tail estimate "
            << p.tail_estimate << ")\n";
  return exit_ok;
}

int cmd_check(const RunConfig& c) {
  require(c.weyl, "--weyl");
  const WeylSamples w = read_weyl(c.weyl);
  const CharacterizationReport r = check(w, c.L, c.n, {}, check_options(c));
  const ordered_json j = report_json(r);
  if (c.report.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json(c.report, j);
  }
  std::cerr << (r.accept ? "accept" : "reject on " + r.failing_clause) << " (" << CharacterizationReport::holomorphy_banner
            << ")\n";
  return r.accept ? exit_ok : exit_reject;
}

int cmd_invert(const RunConfig& c) {
  require(c.output, "--output");
  if (c.weyl.empty() && c.phi1.empty()) throw std::invalid_argument("missing required --weyl or --phi1");
  const Procedure procedure = procedure_from_string(c.procedure);
  std::optional<Phi1Profile> phi;
  if (!c.weyl.empty()) {
    const WeylSamples w = read_weyl(c.weyl);
    if (!c.force) {
      const CharacterizationReport r = check(w, c.L, c.n, {}, check_options(c));
      if (!r.accept) {
        const std::string path = c.report.empty() ? c.output + ".report.json" : c.report;
        write_json(path, report_json(r));
        std::cerr << "characterization rejects the samples on the " << r.failing_clause << " clause; report in "
                  << path << " (use --force to invert anyway)\n";
        return exit_reject;
      }
    }
    phi = phi1_from_weyl(w, c.L, c.n, inversion_transform(c));
  } else {
    phi = read_phi1(c.phi1);
  }
  const InversionResult r = invert(*phi, procedure, inverse_options(c));
  write_potential(c.output, r.potential());
  if (!c.diagnostics.empty()) write_json(c.diagnostics, diagnostics_json(r));
  std::cout << "wrote potential from procedure " << to_string(r.procedures.front().procedure) << " to " << c.output;
  for (const auto& [k, v] : r.diagnostics.deltas) std::cout << "; delta " << k << " = " << v;
  std::cout << "\n";
  return exit_ok;
}

int cmd_roundtrip(const RunConfig& c) {
  require(c.potential, "--potential");
  require(c.output, "--output");
  const PotentialProfile truth = read_potential(c.potential);
  const WeylSamples w = weyl_line(truth, c.eta, c.a, c.nz, direct_options(c));
  const std::vector<double> jumps = jump_points(truth);
  const InverseOptions io = inverse_options(c);
  InvertOptions opts;
  opts.transform = inversion_transform(c);
  opts.inverse = io;

  std::ostringstream table;
  table << std::setprecision(10);
  table << "n,procedure,max_error,l2_error,max_error_away_from_jumps,j_residual,gamma_phi_residual,orthogonality_residual,"
           "gamma_hat_residual,max_delta\n";
  ordered_json levels = ordered_json::array();
  for (int level : {c.n, 2 * c.n}) {
    const InversionResult r = invert(w, c.L, level, Procedure::all, opts);
    const InversionDiagnostics& d = r.diagnostics;
    double max_delta = 0.0;
    for (const auto& [k, v] : d.deltas) max_delta = std::max(max_delta, v);
    const double gamma_hat = std::max(sup(d.dgamma_hat_j), sup(d.gamma_hat_beta_j));
    for (const ProcedureResult& p : r.procedures) {
      const RecoveryError e = recovery_error(truth, p.v, io.trim, jumps);
      table << level << ',' << to_string(p.procedure) << ',' << e.max << ',' << e.l2 << ',' << e.max_away << ','
            << p.residuals.sup() << ',' << sup(d.gamma_phi_j) << ',' << sup(d.gamma_phi_beta_j) << ',' << gamma_hat
            << ',' << max_delta << '\n';
    }
    ordered_json lj = diagnostics_json(r);
    lj["n"] = level;
    levels.push_back(lj);
  }
  write_atomic(c.output, table.str());
  if (!c.diagnostics.empty()) write_json(c.diagnostics, ordered_json{{"levels", levels}});
  std::cout << table.str();
  if (w.failures() > 0) {
    std::cerr << w.failures() << " Weyl samples did not converge; errors above use them as computed\n";
    return exit_nonconvergence;
  }
  return exit_ok;
}

int run(const RunConfig& c) {
  try {
    c.validate();
    if (c.command == "direct") return cmd_direct(c);
    if (c.command == "transform") return cmd_transform(c);
    if (c.command == "invert") return cmd_invert(c);
    if (c.command == "check") return cmd_check(c);
    if (c.command == "roundtrip") return cmd_roundtrip(c);
    throw std::invalid_argument("unknown command '" + c.command + "'");
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const IntegrationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const StageFailure& e) {
    std::cerr << "error: stage " << e.stage() << " at sample " << e.node() << ": " << e.what() << "\n";
    return exit_stage_failure;
  } catch (const NotPositiveDefinite& e) {
    std::cerr << "error: stage factorize at block " << e.failing_block() << ": " << e.what() << "\n";
    return exit_stage_failure;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const OffGridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const AliasingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_stage_failure;
  }
}

}  // namespace diracweyl::cli

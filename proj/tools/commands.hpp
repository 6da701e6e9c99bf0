#ifndef DIRACWEYL_TOOLS_COMMANDS_HPP
#define DIRACWEYL_TOOLS_COMMANDS_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace diracweyl::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_io = 1,
  exit_nonconvergence = 2,
  exit_reject = 3,
  exit_stage_failure = 4,
};

struct RunConfig {
  std::string command;

  std::string potential;    // potential CSV (direct, roundtrip)
  std::string weyl;         // Weyl samples CSV (transform, invert, check)
  std::string phi1;         // Phi1 CSV (invert from a transform result)
  std::string output;       // primary output file
  std::string diagnostics;  // JSON diagnostics (invert, roundtrip)
  std::string report;       // JSON characterization report

  double L = 2.0;
  int n = 512;
  double eta = 1.0;
  double a = 200.0;
  int nz = 1601;
  std::vector<double> b_schedule;
  std::string procedure = "all";

  double tol_weyl = 1e-6;
  double tol_contr = 1e-8;
  double tol_origin = 1e-2;
  double tol_definite = 1e-8;
  int sweep_points = 16;

  bool taper = false;
  bool tail_subtraction = false;
  /// Use the round-trip transform preset (taper + tail subtraction) in invert and roundtrip.
  bool round_trip_preset = true;
  bool force = false;

  /// Throws std::invalid_argument on a non-positive tolerance, n not a power of two, etc.
  void validate() const;
};

nlohmann::ordered_json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::ordered_json& j);

int cmd_direct(const RunConfig& c);
int cmd_transform(const RunConfig& c);
int cmd_invert(const RunConfig& c);
int cmd_check(const RunConfig& c);
int cmd_roundtrip(const RunConfig& c);

/// Dispatches on c.command, mapping library errors onto exit codes and printing them.
int run(const RunConfig& c);

}  // namespace diracweyl::cli

#endif  // DIRACWEYL_TOOLS_COMMANDS_HPP

#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include <diracweyl/io.hpp>

namespace {

using diracweyl::cli::RunConfig;

struct Binding {
  CLI::Option* option;
  std::function<void(RunConfig&)> copy;
};

template <class T>
void bind_option(CLI::App& app, std::vector<Binding>& out, RunConfig& flags, const std::string& name, T RunConfig::*field,
          const std::string& help) {
  CLI::Option* opt = app.add_option(name, flags.*field, help);
  out.push_back({opt, [&flags, field](RunConfig& c) { c.*field = flags.*field; }});
}

void bind_flag(CLI::App& app, std::vector<Binding>& out, RunConfig& flags, const std::string& name,
               bool RunConfig::*field, const std::string& help) {
  CLI::Option* opt = app.add_flag(name, flags.*field, help);
  out.push_back({opt, [&flags, field](RunConfig& c) { c.*field = flags.*field; }});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diracweyl: direct and inverse problems for Dirac-type systems via Weyl functions"};
  app.require_subcommand(1);

  RunConfig flags;
  std::string config_path;
  bool dump_config = false;
  std::vector<std::pair<CLI::App*, std::vector<Binding>>> commands;

  auto add_common = [&](CLI::App* sub, std::vector<Binding>& b) {
    sub->add_option("--config", config_path, "JSON run configuration; flags given on the command line override it");
    sub->add_flag("--dump-config", dump_config, "Print the effective configuration as JSON and exit");
    bind_option(*sub, b, flags, "--output,-o", &RunConfig::output, "Output file");
    bind_option(*sub, b, flags, "--tol-contr", &RunConfig::tol_contr, "Contractivity slack");
  };
  auto add_grid = [&](CLI::App* sub, std::vector<Binding>& b) {
    bind_option(*sub, b, flags, "--L", &RunConfig::L, "Recovery window length");
    bind_option(*sub, b, flags, "--n", &RunConfig::n, "Number of cells on [0, L] (power of two)");
  };
  auto add_zeta = [&](CLI::App* sub, std::vector<Binding>& b) {
    bind_option(*sub, b, flags, "--eta", &RunConfig::eta, "Height of the sampling line");
    bind_option(*sub, b, flags, "--a", &RunConfig::a, "Half-width of the zeta window");
    bind_option(*sub, b, flags, "--nz", &RunConfig::nz, "Number of zeta samples on [-a, a]");
    bind_option(*sub, b, flags, "--b-schedule", &RunConfig::b_schedule, "Truncation lengths for the Weyl extraction");
    bind_option(*sub, b, flags, "--tol-weyl", &RunConfig::tol_weyl, "Increment tolerance of the Weyl extraction");
  };
  auto add_transform = [&](CLI::App* sub, std::vector<Binding>& b) {
    bind_flag(*sub, b, flags, "--taper", &RunConfig::taper, "Raised-cosine taper on the outer 10% of [-a, a]");
    bind_flag(*sub, b, flags, "--tail-subtraction", &RunConfig::tail_subtraction,
              "Subtract a fitted 1/z expansion before the quadrature");
  };
  auto add_preset = [&](CLI::App* sub, std::vector<Binding>& b) {
    CLI::Option* plain = sub->add_flag("--no-round-trip-preset", "Use --taper/--tail-subtraction as given");
    b.push_back({plain, [](RunConfig& c) { c.round_trip_preset = false; }});
  };
  auto add_check = [&](CLI::App* sub, std::vector<Binding>& b) {
    bind_option(*sub, b, flags, "--tol-origin", &RunConfig::tol_origin, "Origin clause threshold relative to sup|Phi1|");
    bind_option(*sub, b, flags, "--sweep-points", &RunConfig::sweep_points, "Number of xi prefixes in the positivity sweep");
    bind_option(*sub, b, flags, "--report", &RunConfig::report, "JSON characterization report");
  };
  auto add_inverse = [&](CLI::App* sub, std::vector<Binding>& b) {
    bind_option(*sub, b, flags, "--procedure", &RunConfig::procedure, "A, B, C or all");
    bind_option(*sub, b, flags, "--diagnostics", &RunConfig::diagnostics, "JSON diagnostics file");
    bind_option(*sub, b, flags, "--tol-definite", &RunConfig::tol_definite, "Definiteness guard of the recovery ODEs");
  };

  auto* direct = app.add_subcommand("direct", "Potential file -> Weyl samples file");
  commands.push_back({direct, {}});
  add_common(direct, commands.back().second);
  add_zeta(direct, commands.back().second);
  bind_option(*direct, commands.back().second, flags, "--potential", &RunConfig::potential, "Potential CSV");

  auto* transform = app.add_subcommand("transform", "Weyl samples -> Phi1 profile");
  commands.push_back({transform, {}});
  add_common(transform, commands.back().second);
  add_grid(transform, commands.back().second);
  add_transform(transform, commands.back().second);
  add_preset(transform, commands.back().second);
  bind_option(*transform, commands.back().second, flags, "--weyl", &RunConfig::weyl, "Weyl samples CSV");

  auto* invert = app.add_subcommand("invert", "Weyl samples (or Phi1 profile) -> potential");
  commands.push_back({invert, {}});
  add_common(invert, commands.back().second);
  add_grid(invert, commands.back().second);
  add_transform(invert, commands.back().second);
  add_check(invert, commands.back().second);
  add_inverse(invert, commands.back().second);
  add_preset(invert, commands.back().second);
  bind_option(*invert, commands.back().second, flags, "--weyl", &RunConfig::weyl, "Weyl samples CSV");
  bind_option(*invert, commands.back().second, flags, "--phi1", &RunConfig::phi1, "Phi1 CSV (skips the check)");
  bind_flag(*invert, commands.back().second, flags, "--force", &RunConfig::force, "Invert even if the check rejects");

  auto* checkc = app.add_subcommand("check", "Characterization check of Weyl samples");
  commands.push_back({checkc, {}});
  add_common(checkc, commands.back().second);
  add_grid(checkc, commands.back().second);
  add_transform(checkc, commands.back().second);
  add_check(checkc, commands.back().second);
  bind_option(*checkc, commands.back().second, flags, "--weyl", &RunConfig::weyl, "Weyl samples CSV");

  auto* roundtrip = app.add_subcommand("roundtrip", "Potential -> Weyl samples -> potential at n and 2n");
  commands.push_back({roundtrip, {}});
  add_common(roundtrip, commands.back().second);
  add_grid(roundtrip, commands.back().second);
  add_zeta(roundtrip, commands.back().second);
  add_transform(roundtrip, commands.back().second);
  add_inverse(roundtrip, commands.back().second);
  add_preset(roundtrip, commands.back().second);
  bind_option(*roundtrip, commands.back().second, flags, "--potential", &RunConfig::potential, "Potential CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : diracweyl::cli::exit_io;
  }

  for (auto& [sub, bindings] : commands) {
    if (!sub->parsed()) continue;
    RunConfig config;
    if (!config_path.empty()) {
      try {
        config = diracweyl::cli::config_from_json(nlohmann::ordered_json::parse(diracweyl::read_text(config_path)));
      } catch (const std::exception& e) {
        std::cerr << "error: config " << config_path << ": " << e.what() << "\n";
        return diracweyl::cli::exit_io;
      }
      for (const Binding& b : bindings) {
        if (b.option->count() > 0) b.copy(config);
      }
    } else {
      config = flags;
      for (const Binding& b : bindings) {
        if (b.option->count() > 0) b.copy(config);
      }
    }
    config.command = sub->get_name();
    if (dump_config) {
      std::cout << diracweyl::cli::to_json(config).dump(2) << "\n";
      return diracweyl::cli::exit_ok;
    }
    return diracweyl::cli::run(config);
  }
  return diracweyl::cli::exit_io;
}

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cvmono/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gaussian multimode states: entanglement and steering quantifiers, "
               "monogamy checks, parameter sweeps, fuzzing and Monte-Carlo validation"};
  app.require_subcommand(1);

  std::string params_json, spec_json, preset_name, out_path;
  bool json_output = false, with_closed_form = false;
  std::uint64_t seed = 42, trials = 10000, mc_count = 1000000;
  int depth = 6;

  auto* scenario = app.add_subcommand("scenario", "evaluate one parameter point");
  scenario->add_option("params", params_json, "circuit parameters as JSON, e.g. "
                       "'{\"r\":2,\"eta0\":0.5}'")->required();
  scenario->add_flag("--closed-form", with_closed_form,
                     "also evaluate the closed-form oracle and report the discrepancy");
  scenario->add_flag("--json", json_output, "JSON output");

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep, emit CSV");
  sweep->add_option("--preset", preset_name, "bundled preset name (fig3a, fig8b, ...)");
  sweep->add_option("--spec", spec_json, "sweep specification as JSON");
  sweep->add_option("--out", out_path, "output path ('-' for stdout)");

  auto* fuzz = app.add_subcommand("fuzz", "random-state monogamy search");
  fuzz->add_option("--trials", trials, "number of random states");
  fuzz->add_option("--seed", seed, "base seed");
  fuzz->add_option("--depth", depth, "random layers per state");

  auto* mc = app.add_subcommand("mc", "Monte-Carlo validation of conditional variances");
  mc->add_option("params", params_json, "circuit parameters as JSON")->required();
  mc->add_option("--trials", mc_count, "number of phase-space samples");
  mc->add_option("--seed", seed, "sampling seed");
  mc->add_flag("--json", json_output, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cvmono::kExitBadInput;
  }

  try {
    if (scenario->parsed())
      return cvmono::cmd_scenario(params_json, with_closed_form, json_output, std::cout,
                                  std::cerr);
    if (sweep->parsed())
      return cvmono::cmd_sweep(preset_name, spec_json, out_path, std::cout, std::cerr);
    if (fuzz->parsed()) return cvmono::cmd_fuzz(trials, seed, depth, std::cout, std::cerr);
    if (mc->parsed())
      return cvmono::cmd_mc(params_json, mc_count, seed, json_output, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cvmono::kExitBadInput;
  }
  return cvmono::kExitBadInput;
}

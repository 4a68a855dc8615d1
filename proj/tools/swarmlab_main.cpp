// Command-line front end: five subcommands over the experiment driver, with
// global flags for config path, output directory, seed, and verbosity.
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "swarmlab/config.hpp"
#include "swarmlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"swarmlab: attraction-repulsion particle runs, energy "
               "minimizers, and their certification suites"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string csv_path;
  std::string kind;
  std::string suite = "all";
  std::uint64_t seed = 0;
  bool quiet = false;

  app.add_option("--config", config_path, "experiment configuration file");
  app.add_option("--out", out_dir,
                 "output directory (default: the config's [output] entry)");
  app.add_option("--seed", seed, "override the configured seed (0 keeps it)");
  app.add_flag("--quiet", quiet, "suppress progress lines");

  CLI::App* minimize = app.add_subcommand(
      "minimize", "compute and certify the energy minimizer");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run the particle system at one epsilon");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "run the epsilon sweep with limit diagnostics");
  CLI::App* check =
      app.add_subcommand("check", "run an aggregated property suite");
  check->add_option(
      "suite", suite,
      "one of: kernels, minimizers, coercivity, ode, modulated, all");
  CLI::App* plot =
      app.add_subcommand("plot", "render an SVG from a CSV output");
  plot->add_option("csv", csv_path, "input CSV file")->required();
  plot->add_option("kind", kind, "one of: trajectory, slope, frostman")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  swarmlab::RunnerOptions opt;
  opt.out_dir = out_dir;
  opt.seed = seed;
  opt.quiet = quiet;

  auto with_config =
      [&](int (*fn)(const swarmlab::ExperimentConfig&,
                    const swarmlab::RunnerOptions&)) {
        if (config_path.empty()) {
          std::fprintf(stderr,
                       "config error: --config is required for this command\n");
          return 1;
        }
        swarmlab::ExperimentConfig cfg;
        try {
          cfg = swarmlab::load_config(config_path);
        } catch (const std::exception& e) {
          std::fprintf(stderr, "config error: %s\n", e.what());
          return 1;
        }
        return fn(cfg, opt);
      };

  if (minimize->parsed()) return with_config(&swarmlab::cmd_minimize);
  if (simulate->parsed()) return with_config(&swarmlab::cmd_simulate);
  if (sweep->parsed()) return with_config(&swarmlab::cmd_sweep);
  if (check->parsed()) return swarmlab::cmd_check(suite, opt);
  if (plot->parsed()) return swarmlab::cmd_plot(csv_path, kind, opt);
  return 1;
}

// misx: run, validate and list multiple importance sampling experiments.
//
// Exit codes: 0 success, 1 unexpected failure, 2 invalid input or config,
// 3 non-finite values in the results.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mis/errors.hpp"
#include "mis/experiment_config.hpp"
#include "mis/experiment_runner.hpp"
#include "mis/mis_scheme.hpp"
#include "mis/result_writer.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<std::string> out;
  std::size_t threads = 0;
  bool json = false;
  bool timing = false;
};

int run(const RunArgs& args) {
  const mis::ExperimentConfig cfg = mis::load_config(args.config);
  mis::RunOptions options;
  options.seed = args.seed;
  options.replicates = args.replicates;
  options.threads = args.threads;
  options.timing = args.timing;
  const mis::ExperimentResult result = mis::run_experiment(cfg, options);

  std::ostringstream text;
  if (args.json) {
    mis::write_json(text, result.rows, args.timing);
  } else {
    mis::write_csv(text, result.rows, args.timing);
  }
  const std::optional<std::string> out = args.out ? args.out : cfg.output;
  if (out) {
    mis::write_file(*out, text.str());
  } else {
    std::cout << text.str() << std::flush;
  }
  if (cfg.adaptive && cfg.adaptive->diagnostics_path) {
    std::ostringstream diag;
    mis::write_diagnostics_csv(diag, result.diagnostics);
    mis::write_file(*cfg.adaptive->diagnostics_path, diag.str());
  }

  const auto bad = mis::nonfinite_cells(result);
  for (const auto& cell : bad) {
    std::cerr << "misx: non-finite result at " << cell << '\n';
  }
  return bad.empty() ? 0 : 3;
}

int validate(const std::string& path) {
  const mis::ExperimentConfig cfg = mis::load_config(path);
  std::size_t cells = 0;
  if (cfg.adaptive) {
    cells = cfg.adaptive->variants.size() * cfg.estimators.size();
  } else {
    cells = cfg.schemes.size() * cfg.samples.size() * cfg.estimators.size();
  }
  std::cout << "ok: " << cfg.experiment << " (" << cells << " cells, " << cfg.replicates << " replicates)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple importance sampling experiment harness"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment config and write CSV (or JSON)");
  run_cmd->add_option("config", run_args.config, "Experiment config file")->required();
  run_cmd->add_option("--seed", run_args.seed, "Master seed (overrides the config)");
  run_cmd->add_option("--replicates", run_args.replicates, "Replicates per cell (overrides the config)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run_args.out, "Output path (overrides the config; default stdout)");
  run_cmd->add_option("--threads", run_args.threads, "Worker threads (default: MISX_THREADS or all cores)");
  run_cmd->add_flag("--json", run_args.json, "Write JSON instead of CSV");
  run_cmd->add_flag("--timing", run_args.timing, "Add a wall_time column (breaks byte-identical output)");

  bool expert = false;
  CLI::App* list_cmd = app.add_subcommand("list-schemes", "Print the six named schemes and their costs");
  list_cmd->add_flag("--expert", expert, "Also print the 15-cell (mode, option) matrix");

  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
  validate_cmd->add_option("config", validate_path, "Experiment config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      return run(run_args);
    }
    if (*list_cmd) {
      std::cout << mis::scheme_table(expert);
      return 0;
    }
    if (*validate_cmd) {
      return validate(validate_path);
    }
  } catch (const mis::ConfigError& e) {
    std::cerr << "misx: " << e.what() << '\n';
    return 2;
  } catch (const mis::InputError& e) {
    std::cerr << "misx: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "misx: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

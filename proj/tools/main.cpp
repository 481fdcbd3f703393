#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "advrisk/errors.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace advrisk;
using namespace advrisk::cli;

int main(int argc, char** argv) {
  CLI::App app{"advrisk: adversarial Bayes classifiers, duals and surrogate consistency on 1-D grids"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "advrisk 0.1.0");

  unsigned jobs = 1;
  std::string out_flag;
  app.add_option("-j,--jobs", jobs, "Sweep cells evaluated in parallel (outputs are identical for any value)")->check(CLI::PositiveNumber);
  app.add_option("-o,--out", out_flag, "Output directory (overrides the config; ADVRISK_OUT overrides both)");

  std::string loss_name;
  double eta_step = 0.005;
  auto* analyze = app.add_subcommand("analyze-loss", "Tabulate C*(eta), alpha(eta) and the modified minimizer for one loss");
  analyze->add_option("loss", loss_name,
                      "Loss name: hinge, squared_hinge, exponential, sigmoid, zero_one, rho_margin:<rho>, custom:<csv with alpha,value>")
      ->required();
  analyze->add_option("--eta-step", eta_step, "Spacing of the eta mesh (rounded so that 1/step is an integer)");

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "Primal DP and exact dual for every eps in the config");
  solve->add_option("config", config_path, "JSON config file")->required();
  auto* consistency = app.add_subcommand("consistency", "Consistency experiment for every (loss, eps) cell of the config");
  consistency->add_option("config", config_path, "JSON config file")->required();
  auto* reproduce = app.add_subcommand("reproduce", "Run the built-in Gaussian fixture set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ExitCode::config_error;
  }

  auto out_dir = [&](const std::filesystem::path& configured) {
    return resolve_output_dir(out_flag.empty() ? configured : std::filesystem::path(out_flag));
  };

  try {
    if (*analyze) return cmd_analyze_loss(loss_name, eta_step, out_dir("advrisk_out"));
    if (*reproduce) return cmd_reproduce(out_dir("advrisk_out"), jobs);
    const Config cfg = load_config(config_path);
    if (*solve) return cmd_solve(cfg, out_dir(cfg.output_dir), jobs);
    if (*consistency) return cmd_consistency(cfg, out_dir(cfg.output_dir), jobs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ExitCode::config_error;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return ExitCode::config_error;
  } catch (const BudgetError& e) {
    std::cerr << "solver budget exceeded: " << e.what() << "\n";
    return ExitCode::solver_budget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode::failure;
  }
  return ExitCode::failure;
}

#pragma once

#include <filesystem>
#include <string>

#include "config.hpp"

namespace advrisk::cli {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, solver_budget = 3, certification_failure = 4 };

int cmd_analyze_loss(const std::string& loss_name, double eta_step, const std::filesystem::path& out_dir);
int cmd_solve(const Config& cfg, const std::filesystem::path& out_dir, unsigned jobs);
int cmd_consistency(const Config& cfg, const std::filesystem::path& out_dir, unsigned jobs);
/// The built-in acceptance fixtures: solves and consistency sweeps on both Gaussian families.
int cmd_reproduce(const std::filesystem::path& out_dir, unsigned jobs);

}  // namespace advrisk::cli

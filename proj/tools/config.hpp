#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "advrisk/grid.hpp"
#include "advrisk/risks.hpp"

namespace advrisk::cli {

/// Thrown for anything wrong with the config file; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Distribution {
  std::string kind = "gaussian_mixture";  // or "grid_csv"
  double mu0 = 0.0, sigma0 = 1.0, w0 = 0.5;
  double mu1 = 2.0, sigma1 = 1.0, w1 = 0.5;
  std::string path;  // grid_csv only
};

struct Config {
  Distribution distribution;
  double h = 0.01;
  double span_sigmas = 6.0;
  std::vector<double> eps{0.5};
  std::vector<std::string> losses{"hinge"};
  double half_tol = 1e-6;
  double mass_tol = -1.0;
  double solver_tol = 1e-9;
  double budget = 5e8;
  risks::TieBreak tie_break = risks::TieBreak::fewest_intervals;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "advrisk_out";

  /// Canonical JSON of every field except output_dir, with defaults filled in.
  std::string canonical() const;
  /// 16 hex digits of the FNV-1a hash of canonical().
  std::string hash() const;

  grid::GridPtr build_grid() const;
};

Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// ADVRISK_OUT, if set and non-empty, replaces the configured output directory.
std::filesystem::path resolve_output_dir(const std::filesystem::path& configured);

const char* to_string(risks::TieBreak t);

}  // namespace advrisk::cli

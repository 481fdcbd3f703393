#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "advrisk/errors.hpp"
#include "json.hpp"
#include "output.hpp"

namespace advrisk::cli {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

risks::TieBreak tie_break_from(const std::string& s) {
  if (s == "fewest_intervals") return risks::TieBreak::fewest_intervals;
  if (s == "min_p0_term") return risks::TieBreak::min_p0_term;
  if (s == "max_p0_term") return risks::TieBreak::max_p0_term;
  throw ConfigError("unknown tie_break '" + s + "'");
}

}  // namespace

const char* to_string(risks::TieBreak t) {
  switch (t) {
    case risks::TieBreak::fewest_intervals: return "fewest_intervals";
    case risks::TieBreak::min_p0_term: return "min_p0_term";
    case risks::TieBreak::max_p0_term: return "max_p0_term";
  }
  return "?";
}

Config parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"distribution", "h", "span_sigmas", "eps", "losses", "tolerances", "budget", "tie_break", "seed", "output_dir"}, "config");

  Config c;
  if (j.contains("distribution")) {
    const auto& d = j["distribution"];
    if (!d.is_object()) throw ConfigError("'distribution' must be an object");
    reject_unknown(d, {"kind", "mu0", "sigma0", "w0", "mu1", "sigma1", "w1", "path"}, "distribution");
    auto& out = c.distribution;
    read(d, "kind", out.kind);
    read(d, "mu0", out.mu0);
    read(d, "sigma0", out.sigma0);
    read(d, "w0", out.w0);
    read(d, "mu1", out.mu1);
    read(d, "sigma1", out.sigma1);
    read(d, "w1", out.w1);
    read(d, "path", out.path);
    if (out.kind == "grid_csv") {
      if (out.path.empty()) throw ConfigError("grid_csv distribution needs 'path'");
      if (std::filesystem::path(out.path).is_relative() && !base_dir.empty()) out.path = (base_dir / out.path).string();
    } else if (out.kind != "gaussian_mixture") {
      throw ConfigError("unknown distribution kind '" + out.kind + "'");
    }
  }
  read(j, "h", c.h);
  read(j, "span_sigmas", c.span_sigmas);
  read(j, "eps", c.eps);
  read(j, "losses", c.losses);
  read(j, "budget", c.budget);
  read(j, "seed", c.seed);
  if (j.contains("tie_break")) {
    std::string s;
    read(j, "tie_break", s);
    c.tie_break = tie_break_from(s);
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("'tolerances' must be an object");
    reject_unknown(t, {"half_tol", "mass_tol", "solver_tol"}, "tolerances");
    read(t, "half_tol", c.half_tol);
    read(t, "mass_tol", c.mass_tol);
    read(t, "solver_tol", c.solver_tol);
  }
  if (j.contains("output_dir")) {
    std::string s;
    read(j, "output_dir", s);
    c.output_dir = s;
  }

  if (!(c.h > 0.0)) throw ConfigError("'h' must be positive");
  if (!(c.span_sigmas > 0.0)) throw ConfigError("'span_sigmas' must be positive");
  if (c.eps.empty()) throw ConfigError("'eps' list is empty");
  for (double e : c.eps)
    if (!(e >= 0.0)) throw ConfigError("'eps' values must be nonnegative");
  if (!(c.half_tol >= 0.0) || !(c.solver_tol > 0.0)) throw ConfigError("tolerances must be nonnegative");
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string Config::canonical() const {
  json j;
  json d;
  d["kind"] = distribution.kind;
  if (distribution.kind == "grid_csv") {
    // The file contents, not its location, determine the results.
    std::ifstream in(distribution.path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    d["content_fnv1a"] = fnv1a_hex(ss.str());
  } else {
    d["mu0"] = distribution.mu0;
    d["sigma0"] = distribution.sigma0;
    d["w0"] = distribution.w0;
    d["mu1"] = distribution.mu1;
    d["sigma1"] = distribution.sigma1;
    d["w1"] = distribution.w1;
  }
  j["distribution"] = d;
  j["h"] = h;
  j["span_sigmas"] = span_sigmas;
  j["eps"] = eps;
  j["losses"] = losses;
  j["tolerances"] = {{"half_tol", half_tol}, {"mass_tol", mass_tol}, {"solver_tol", solver_tol}};
  j["budget"] = budget;
  j["tie_break"] = to_string(tie_break);
  j["seed"] = seed;
  return j.dump();
}

std::string Config::hash() const { return fnv1a_hex(canonical()); }

grid::GridPtr Config::build_grid() const {
  if (distribution.kind == "grid_csv") return grid::read_csv(distribution.path);
  const auto& d = distribution;
  return grid::from_gaussian_mixture(d.mu0, d.sigma0, d.w0, d.mu1, d.sigma1, d.w1, span_sigmas, h);
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& configured) {
  const char* env = std::getenv("ADVRISK_OUT");
  if (env && *env) return env;
  return configured;
}

}  // namespace advrisk::cli

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <thread>
#include <vector>

#include "advrisk/conlab.hpp"
#include "advrisk/errors.hpp"
#include "json.hpp"
#include "output.hpp"
#include "svg.hpp"

namespace advrisk::cli {

namespace {

using json = nlohmann::ordered_json;
using grid::EpsilonRadius;
using grid::GridPtr;

// Runs body(i) for i in [0, n) on up to `jobs` threads. Exceptions are rethrown
// in index order so the reported error does not depend on scheduling.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string eps_label(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

std::string loss_label(const std::string& name) {
  std::string out;
  if (name.rfind("custom:", 0) == 0) return "custom_" + std::filesystem::path(name.substr(7)).stem().string();
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') ? c : '_';
  return out;
}

std::string csv_header(const std::string& hash) { return "# config_hash=" + hash + "\n"; }

json intervals_json(const risks::ClassifierSet& s) {
  json a = json::array();
  for (const auto& iv : s.intervals())
    a.push_back({{"first", iv.first}, {"last", iv.last}, {"a", num(iv.a)}, {"b", num(iv.b)}});
  return a;
}

json grid_manifest(const grid::Grid& g) {
  return {{"x0", g.x0()}, {"h", g.h()}, {"n", g.n()}, {"total0", g.total0()}, {"total1", g.total1()}, {"truncated_mass", g.truncated_mass()}};
}

json manifest(const Config& cfg, const grid::Grid& g, const std::string& command) {
  json m;
  m["command"] = command;
  m["config_hash"] = cfg.hash();
  m["config"] = json::parse(cfg.canonical());
  m["grid"] = grid_manifest(g);
  json ks = json::array();
  for (double e : cfg.eps) ks.push_back({{"eps", e}, {"k", EpsilonRadius(e, g).k()}, {"snapped_eps", EpsilonRadius(e, g).snapped()}});
  m["radii"] = ks;
  // The dual solver is deterministic and uses no pivot rule; the seed only drives the near-minimizer noise.
  m["solver"] = {{"dual", "taut_string"}, {"pivot_seed", cfg.seed}};
  return m;
}

// ---- analyze-loss ----------------------------------------------------------

std::string loss_svg(const losses::Loss& loss, const std::string& hash) {
  svg::Plot p(-2.0, 2.0, 0.0, 3.0);
  p.title("loss " + loss.name() + " against the 0-1 indicator");
  p.metadata("config_hash=" + hash);
  std::vector<double> xs, phi, ind;
  for (int i = 0; i <= 400; ++i) {
    const double a = -2.0 + i / 100.0;
    xs.push_back(a);
    phi.push_back(loss(a));
    ind.push_back(a <= 0.0 ? 1.0 : 0.0);
  }
  p.polyline(xs, ind, "#555555", "1{alpha <= 0}", 1.5, true);
  p.polyline(xs, phi, "#1f77b4", loss.name(), 2.0);
  return p.render();
}

// ---- solve ----------------------------------------------------------------

struct SolveCell {
  double eps = 0.0;
  std::size_t k = 0;
  std::optional<risks::Minimizer> primal;
  std::optional<duality::DualSolution> dual;
  std::optional<duality::Extremal> extremal;
  duality::UniquenessVerdict uniqueness;
  duality::CertReport cert;
};

SolveCell solve_one(const GridPtr& g, const Config& cfg, double eps) {
  const EpsilonRadius r(eps, *g);
  risks::DpOptions opts;
  opts.tie_break = cfg.tie_break;
  opts.budget = cfg.budget;
  SolveCell c;
  c.eps = eps;
  c.k = r.k();
  c.primal = risks::minimize_adversarial_risk(g, r, opts);
  c.dual = duality::dual_classification_max(g, r, cfg.solver_tol, cfg.budget);
  c.extremal = duality::extremal_classifiers(*c.dual, r, cfg.half_tol, cfg.solver_tol);
  c.uniqueness = duality::check_uniqueness(*c.dual, cfg.half_tol, cfg.mass_tol);
  c.cert = duality::certify_complementary_slackness(c.primal->set, *c.dual, r, cfg.solver_tol);
  return c;
}

std::string solve_svg(const grid::Grid& g, const SolveCell& c, const std::string& hash) {
  svg::Plot p(g.edge(0), g.edge(g.n()), 0.0, 1.0);
  p.title("eps = " + eps_label(c.eps) + ": eta, eta*, adversarial Bayes classifier (shaded), verdict " + duality::to_string(c.uniqueness.verdict));
  p.metadata("config_hash=" + hash);
  for (const auto& iv : c.primal->set.intervals()) p.band(iv.a, iv.b, "#2ca02c", 0.18);
  std::vector<double> xs(g.n()), eta(g.n()), eta_star(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    xs[i] = g.x(i);
    const double t = g.m0()[i] + g.m1()[i];
    eta[i] = t > 0 ? g.m1()[i] / t : NAN;
    eta_star[i] = c.dual->zero_mass[i] ? NAN : c.dual->eta_star[i];
  }
  p.polyline(xs, eta, "#1f77b4", "eta", 1.5);
  p.polyline(xs, eta_star, "#ff7f0e", "eta*", 2.0, true);
  return p.render();
}

// ---- consistency ----------------------------------------------------------

conlab::ExperimentConfig experiment_config(const Config& cfg) {
  conlab::ExperimentConfig e;
  e.half_tol = cfg.half_tol;
  e.mass_tol = cfg.mass_tol;
  e.solver_tol = cfg.solver_tol;
  e.seed = cfg.seed;
  return e;
}

std::string traces_csv(const conlab::ConsistencyReport& r, const std::string& hash) {
  std::string s = csv_header(hash) + "n,surrogate_risk,adv_risk,pointwise,window_p1,window_p0,one_sided_ok\n";
  for (std::size_t i = 0; i < r.n_values.size(); ++i) {
    s += std::to_string(r.n_values[i]) + "," + num(r.surrogate_trace[i]) + "," + num(r.adv_risk_trace[i]);
    if (i < r.diagnostics.size()) {
      const auto& d = r.diagnostics[i];
      s += "," + num(d.pointwise) + "," + num(d.window_p1) + "," + num(d.window_p0) + "," + (d.one_sided_ok ? "1" : "0");
    } else {
      s += ",,,,";
    }
    s += "\n";
  }
  return s;
}

std::string threshold_csv(const conlab::ConsistencyReport& r, const std::string& hash) {
  std::string s = csv_header(hash) + "N,surrogate_risk\n";
  for (std::size_t i = 0; i < r.threshold_N.size(); ++i) s += num(r.threshold_N[i]) + "," + num(r.threshold_trace[i]) + "\n";
  return s;
}

}  // namespace

int cmd_analyze_loss(const std::string& loss_name, double eta_step, const std::filesystem::path& out_dir) {
  if (!(eta_step > 0.0) || eta_step > 0.5) throw DomainError("eta step must lie in (0, 1/2]");
  const auto loss = losses::Loss::from_name(loss_name);
  const long steps = std::lround(1.0 / eta_step);
  json canon{{"command", "analyze-loss"}, {"loss", loss_name}, {"eta_steps", steps}};
  const std::string hash = fnv1a_hex(canon.dump());
  const bool premise = losses::half_risk_equals_phi0(loss) && [&] {
    try {
      return losses::is_consistent(loss);
    } catch (const UndecidableError&) {
      return false;
    }
  }();

  std::string csv = csv_header(hash) + "eta,c_star,alpha,alpha_tilde\n";
  for (long i = 0; i <= steps; ++i) {
    const double eta = static_cast<double>(i) / static_cast<double>(steps);
    const auto p = losses::optimal_conditional_risk(loss, eta);
    csv += num(eta) + "," + num(p.c_star) + "," + num(p.alpha_min.value()) + ",";
    csv += premise ? num(losses::modified_minimizer_map(loss, eta).value.value()) : "na";
    csv += "\n";
  }
  OutputSink sink(out_dir);
  const std::string label = loss_label(loss_name);
  sink.add("analyze_" + label + ".csv", std::move(csv));
  sink.add("loss_" + label + ".svg", loss_svg(loss, hash));
  sink.flush();
  std::cout << "analyze-loss " << loss_name << ": C*(1/2)=" << num(losses::optimal_conditional_risk_value(loss, 0.5)) << " phi(0)=" << num(loss(0.0))
            << " -> " << out_dir.string() << "\n";
  return ExitCode::ok;
}

int cmd_solve(const Config& cfg, const std::filesystem::path& out_dir, unsigned jobs) {
  const auto g = cfg.build_grid();
  const std::string hash = cfg.hash();
  std::vector<std::optional<SolveCell>> cells(cfg.eps.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) { cells[i] = solve_one(g, cfg, cfg.eps[i]); });

  OutputSink sink(out_dir);
  std::string summary = csv_header(hash) + "eps,k,primal,dual,gap,verdict,mass_at_half,certified\n";
  bool all_certified = true;
  for (const auto& cell : cells) {
    const auto& c = *cell;
    const std::string e = eps_label(c.eps);
    const double gap = std::abs(c.primal->report.value - c.dual->value);
    json j;
    j["config_hash"] = hash;
    j["eps"] = c.eps;
    j["k"] = c.k;
    j["snapped_eps"] = static_cast<double>(c.k) * g->h();
    j["primal"] = json::parse(risks::to_json(c.primal->report));
    j["dual_value"] = c.dual->value;
    j["gap"] = gap;
    j["minimizer_intervals"] = intervals_json(c.primal->set);
    j["uniqueness"] = json::parse(duality::to_json(c.uniqueness));
    j["certification"] = json::parse(duality::to_json(c.cert));
    j["extremal"] = {{"a_min", intervals_json(c.extremal->a_min)},
                     {"a_max", intervals_json(c.extremal->a_max)},
                     {"cert_min", json::parse(duality::to_json(c.extremal->cert_min))},
                     {"cert_max", json::parse(duality::to_json(c.extremal->cert_max))},
                     {"extended_cells", c.extremal->extended_cells},
                     {"extension_rule", "eta_hat off supp(P*): 1/2 if both sides within eps, else nearest supported eta*"}};
    sink.add("solve_eps" + e + ".json", j.dump(2) + "\n");
    sink.add("intervals_eps" + e + ".csv", csv_header(hash) + risks::intervals_csv(c.primal->set));
    json d;
    d["config_hash"] = hash;
    d["dual"] = json::parse(duality::to_json(*c.dual));
    sink.add("dual_eps" + e + ".json", d.dump() + "\n");
    sink.add("solve_eps" + e + ".svg", solve_svg(*g, c, hash));
    summary += e + "," + std::to_string(c.k) + "," + num(c.primal->report.value) + "," + num(c.dual->value) + "," + num(gap) + "," +
               duality::to_string(c.uniqueness.verdict) + "," + num(c.uniqueness.mass_at_half) + "," + (c.cert.pass ? "1" : "0") + "\n";
    all_certified = all_certified && c.cert.pass;
    std::cout << "solve eps=" << e << " k=" << c.k << " primal=" << num(c.primal->report.value) << " dual=" << num(c.dual->value)
              << " verdict=" << duality::to_string(c.uniqueness.verdict) << (c.cert.pass ? "" : " CERTIFICATION FAILED") << "\n";
  }
  sink.add("solve_summary.csv", std::move(summary));
  sink.add("manifest.json", manifest(cfg, *g, "solve").dump(2) + "\n");
  sink.flush();
  return all_certified ? ExitCode::ok : ExitCode::certification_failure;
}

int cmd_consistency(const Config& cfg, const std::filesystem::path& out_dir, unsigned jobs) {
  if (cfg.losses.empty()) throw ConfigError("'losses' list is empty");
  std::vector<losses::Loss> ls;
  for (const auto& name : cfg.losses) {
    auto l = losses::Loss::from_name(name);
    bool consistent = false;
    try {
      consistent = losses::is_consistent(l);
    } catch (const UndecidableError& e) {
      throw ConfigError("loss '" + name + "': " + e.what());
    }
    if (!consistent) throw ConfigError("loss '" + name + "' is not consistent; the experiment needs a consistent loss");
    ls.push_back(std::move(l));
  }
  const auto g = cfg.build_grid();
  const std::string hash = cfg.hash();
  const auto ecfg = experiment_config(cfg);
  const std::size_t ne = cfg.eps.size();
  std::vector<std::optional<conlab::ConsistencyReport>> reports(ls.size() * ne);
  parallel_for(reports.size(), jobs, [&](std::size_t i) {
    reports[i] = conlab::run_consistency_experiment(g, EpsilonRadius(cfg.eps[i % ne], *g), ls[i / ne], ecfg);
  });

  OutputSink sink(out_dir);
  std::string matrix = csv_header(hash) + "eps";
  for (const auto& name : cfg.losses) matrix += "," + name;
  matrix += "\n";
  for (std::size_t e = 0; e < ne; ++e) {
    matrix += eps_label(cfg.eps[e]);
    for (std::size_t l = 0; l < ls.size(); ++l) matrix += std::string(",") + conlab::to_string(reports[l * ne + e]->verdict);
    matrix += "\n";
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = *reports[i];
    const std::string stem = "consistency/" + loss_label(cfg.losses[i / ne]) + "_eps" + eps_label(r.eps);
    json j;
    j["config_hash"] = hash;
    j["report"] = json::parse(conlab::to_json(r));
    sink.add(stem + ".json", j.dump(2) + "\n");
    sink.add(stem + "_traces.csv", traces_csv(r, hash));
    sink.add(stem + "_threshold.csv", threshold_csv(r, hash));
    std::cout << "consistency " << cfg.losses[i / ne] << " eps=" << eps_label(r.eps) << " -> " << conlab::to_string(r.verdict) << "\n";
  }
  sink.add("summary_matrix.csv", std::move(matrix));
  sink.add("manifest.json", manifest(cfg, *g, "consistency").dump(2) + "\n");
  sink.flush();
  return ExitCode::ok;
}

int cmd_reproduce(const std::filesystem::path& out_dir, unsigned jobs) {
  Config equal;
  equal.eps = {0.5, 0.6, 0.8, 0.9, 1.1, 1.2, 1.4, 1.5};
  Config unequal;
  unequal.distribution.mu1 = 0.0;
  unequal.distribution.sigma1 = 2.0;
  unequal.eps = {0.25, 0.5, 1.0, 2.0};
  Config sweep;
  sweep.eps = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
  sweep.losses = {"hinge", "rho_margin:1"};

  int rc = ExitCode::ok;
  rc = std::max(rc, cmd_solve(equal, out_dir / "equal_sigma", jobs));
  rc = std::max(rc, cmd_solve(unequal, out_dir / "unequal_sigma", jobs));
  rc = std::max(rc, cmd_consistency(sweep, out_dir / "consistency_sweep", jobs));
  rc = std::max(rc, cmd_analyze_loss("hinge", 0.005, out_dir / "losses"));
  rc = std::max(rc, cmd_analyze_loss("rho_margin:0.333", 0.005, out_dir / "losses"));
  return rc;
}

}  // namespace advrisk::cli

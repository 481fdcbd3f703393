#include <cmath>
#include <cstdio>

#include "advrisk/conlab.hpp"
#include "advrisk/duality.hpp"
#include "advrisk/risks.hpp"
#include "json.hpp"

namespace advrisk {

namespace {

using json = nlohmann::ordered_json;

// JSON has no infinities; they are written as the strings "inf" / "-inf".
json ext(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json ext_vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(ext(x));
  return a;
}

json coupling_json(const duality::Coupling& c) {
  json j;
  j["source"] = c.source();
  j["n"] = c.n();
  j["k"] = c.k();
  json e = json::array();
  for (const auto& t : c.nonzeros()) e.push_back(json::array({t.i, t.j, t.w}));
  j["triplets"] = std::move(e);
  return j;
}

json cert_json(const duality::CertReport& c) {
  json j;
  j["pass"] = c.pass;
  j["tol"] = c.tol;
  j["condition1"] = {{"pass", c.cond1_pass}, {"p1_gap", c.p1_gap}, {"p0_gap", c.p0_gap}};
  j["condition2"] = {{"pass", c.cond2_pass},
                     {"worst_weighted_deficit", c.pointwise_worst},
                     {"worst_cell", c.pointwise_cell},
                     {"worst_eta_star", c.pointwise_worst_eta},
                     {"cells_checked", c.cells_checked}};
  return j;
}

json uniq_json(const duality::UniquenessVerdict& v) {
  json j;
  j["verdict"] = duality::to_string(v.verdict);
  j["mass_at_half"] = v.mass_at_half;
  j["half_tol"] = v.half_tol;
  j["mass_tol"] = v.mass_tol;
  j["p0_term_min"] = v.p0_term_min;
  j["p0_term_max"] = v.p0_term_max;
  j["cross_check_agrees"] = v.cross_check_agrees;
  return j;
}

}  // namespace

namespace risks {

std::string to_json(const RiskReport& r) {
  json j;
  j["value"] = ext(r.value);
  j["term_p1"] = ext(r.term_p1);
  j["term_p0"] = ext(r.term_p0);
  return j.dump(2);
}

std::string intervals_csv(const ClassifierSet& set) {
  std::string out = "first,last,a,b\n";
  char buf[128];
  for (const auto& iv : set.intervals()) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", iv.first, iv.last, iv.a, iv.b);
    out += buf;
  }
  return out;
}

}  // namespace risks

namespace duality {

std::string to_json(const DualSolution& d) {
  json j;
  j["objective_kind"] = d.objective_kind == ObjectiveKind::classification ? "classification" : "surrogate";
  if (!d.loss_name.empty()) j["loss"] = d.loss_name;
  j["eps"] = d.radius.eps();
  j["k"] = d.radius.k();
  j["value"] = d.value;
  j["m0_star"] = d.m0_star;
  j["m1_star"] = d.m1_star;
  j["eta_star"] = d.eta_star.values();
  j["zero_mass"] = d.zero_mass;
  j["gamma0"] = coupling_json(d.gamma0);
  j["gamma1"] = coupling_json(d.gamma1);
  return j.dump();
}

std::string to_json(const CertReport& c) { return cert_json(c).dump(2); }
std::string to_json(const UniquenessVerdict& v) { return uniq_json(v).dump(2); }

}  // namespace duality

namespace conlab {

std::string to_json(const ConsistencyReport& r) {
  json j;
  j["loss"] = r.loss;
  j["eps"] = r.eps;
  j["k"] = r.k;
  j["h"] = r.h;
  j["total_mass"] = r.total_mass;
  j["verdict"] = to_string(r.verdict);
  j["branch"] = r.branch;
  j["universal"] = r.universal;
  j["premise_half"] = r.premise_half;
  j["uniqueness"] = uniq_json(r.uniqueness);
  j["bayes_adv_risk"] = r.bayes_adv_risk;
  j["classification_dual_value"] = r.classification_dual_value;
  j["dual_value"] = r.dual_value;
  j["minimizer_surrogate"] = ext(r.minimizer_surrogate);
  j["modified_matches_optimal"] = r.modified_matches_optimal;
  j["n_values"] = r.n_values;
  j["surrogate_trace"] = ext_vec(r.surrogate_trace);
  j["adv_risk_trace"] = ext_vec(r.adv_risk_trace);
  json diag = json::array();
  for (const auto& d : r.diagnostics)
    diag.push_back({{"pointwise", ext(d.pointwise)}, {"window_p1", ext(d.window_p1)}, {"window_p0", ext(d.window_p0)}, {"one_sided_ok", d.one_sided_ok}});
  j["diagnostics"] = std::move(diag);
  j["threshold_N"] = r.threshold_N;
  j["threshold_trace"] = ext_vec(r.threshold_trace);
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump(2);
}

}  // namespace conlab

}  // namespace advrisk

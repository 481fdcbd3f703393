#include "advrisk/conlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "advrisk/errors.hpp"

namespace advrisk::conlab {

using grid::EpsilonRadius;
using grid::GridFunction;
using grid::GridPtr;
using risks::ClassifierSet;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool premise_half(const losses::Loss& loss) {
  try {
    return losses::is_consistent(loss) && losses::half_risk_equals_phi0(loss);
  } catch (const UndecidableError&) {
    return false;
  }
}

double resolve_mass_tol(double mass_tol, const grid::Grid& g) { return mass_tol < 0.0 ? 1e-4 * g.total() : mass_tol; }

// a - b where both may be +inf; inf - inf counts as +inf (no slack is certified).
double gap(double a, double b) {
  const double d = a - b;
  return std::isnan(d) ? kInf : d;
}

// Uniform draw in [-1, 1] from the raw engine output, identical on every platform.
double unit_noise(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-52 - 1.0; }

}  // namespace

std::vector<int> default_n_values() {
  std::vector<int> v;
  for (int n = 1; n <= 1024; n *= 2) v.push_back(n);
  return v;
}

std::vector<double> default_threshold_N() {
  std::vector<double> v;
  for (double n = 1; n <= 64; n *= 2) v.push_back(n);
  return v;
}

GridFunction optimal_surrogate_function(const GridFunction& eta_hat, const losses::Loss& loss) {
  std::vector<double> v(eta_hat.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = losses::smallest_minimizer(loss, eta_hat[i]).value();
  return GridFunction(eta_hat.grid_ptr(), std::move(v));
}

GridFunction modified_optimal_function(const GridFunction& eta_hat, const losses::Loss& loss, double half_tol) {
  if (!premise_half(loss)) throw DomainError("modified optimal function needs a consistent loss with C_phi*(1/2) = phi(0)");
  std::vector<double> v(eta_hat.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::abs(eta_hat[i] - 0.5) <= half_tol ? 0.0 : losses::smallest_minimizer(loss, eta_hat[i]).value();
  return GridFunction(eta_hat.grid_ptr(), std::move(v));
}

ClassifierSet default_tilde_set(const GridFunction& eta_hat, double half_tol) {
  const std::size_t n = eta_hat.size();
  std::vector<std::uint8_t> mask(n, 0);
  std::vector<std::size_t> zero;
  for (std::size_t i = 0; i < n; ++i) {
    if (eta_hat[i] > 0.5 + half_tol) mask[i] = 1;
    if (std::abs(eta_hat[i] - 0.5) <= half_tol) zero.push_back(i);
  }
  if (zero.empty()) throw NoWitnessError("eta_hat never equals 1/2; no inconsistency witness exists");
  const double mid = 0.5 * static_cast<double>(zero.front() + zero.back());
  std::size_t best = zero.front();
  for (std::size_t i : zero)
    if (std::abs(static_cast<double>(i) - mid) < std::abs(static_cast<double>(best) - mid)) best = i;
  mask[best] = 1;
  return ClassifierSet(eta_hat.grid_ptr(), std::move(mask));
}

std::vector<GridFunction> inconsistency_sequence(const SequenceSpec& spec, const losses::Loss& loss) {
  if (!premise_half(loss)) throw DomainError("inconsistency sequence needs a consistent loss with C_phi*(1/2) = phi(0)");
  const GridFunction& eta = spec.base_eta_hat;
  const auto& g = eta.grid();
  const std::size_t n = eta.size();
  if (spec.tilde_set.mask().size() != n) throw DomainError("tilde set lives on a different grid");
  const double mass_tol = resolve_mass_tol(spec.mass_tol, g);

  double band_mass = 0.0, below = 0.0, above = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_min = eta[i] > 0.5 + spec.half_tol;
    const bool in_max = eta[i] >= 0.5 - spec.half_tol;
    const bool in_t = spec.tilde_set.contains(i);
    const double m = g.m0()[i] + g.m1()[i];
    if (in_max && !in_min) band_mass += m;
    if (in_min && !in_t) throw DomainError("tilde set must contain A_min");
    if (in_t && !in_max) throw DomainError("tilde set must lie inside A_max");
    if (in_max && !in_min) (in_t ? above : below) += 1.0;
  }
  if (band_mass <= mass_tol) throw NoWitnessError("adversarial Bayes classifier is unique up to degeneracy; no inconsistency witness exists");
  if (above == 0.0 || below == 0.0) throw DomainError("tilde set must lie strictly between A_min and A_max");

  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i)
    base[i] = std::abs(eta[i] - 0.5) <= spec.half_tol ? 0.0 : losses::smallest_minimizer(loss, eta[i]).value();

  std::vector<GridFunction> out;
  for (int nv : spec.n_values) {
    if (nv <= 0) throw DomainError("n values must be positive");
    std::vector<double> f(base);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(eta[i] - 0.5) <= spec.half_tol) f[i] = (spec.tilde_set.contains(i) ? 1.0 : -1.0) / nv;
    GridFunction fn(eta.grid_ptr(), std::move(f));
    if (!(ClassifierSet::positive_part(fn) == spec.tilde_set)) throw NumericError("{f_n > 0} differs from the tilde set");
    out.push_back(std::move(fn));
  }
  return out;
}

GridFunction threshold_function(const GridFunction& f, double N) {
  if (!(N > 0.0)) throw DomainError("threshold N must be positive");
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::clamp(f[i], -N, N);
    if ((v[i] > 0.0) != (f[i] > 0.0)) throw NumericError("thresholding changed the sign pattern");
  }
  return GridFunction(f.grid_ptr(), std::move(v));
}

DiagnosticsReport slackness_diagnostics(const GridFunction& f, const duality::DualSolution& dual, const losses::Loss& loss,
                                        const EpsilonRadius& r, double tol) {
  const auto& g = f.grid();
  if (dual.m0_star.size() != g.n()) throw DomainError("dual lives on a different grid");
  const auto adv = risks::adversarial_surrogate_risk(f, loss, r);
  double star1 = 0.0, star0 = 0.0, point = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double p = loss(f[j]), q = loss(-f[j]);
    if (dual.m1_star[j] > 0.0) star1 += dual.m1_star[j] * p;
    if (dual.m0_star[j] > 0.0) star0 += dual.m0_star[j] * q;
    const double t = dual.m0_star[j] + dual.m1_star[j];
    if (t > 0.0) point += gap(losses::conditional_risk(loss, dual.eta_star[j], f[j]), losses::optimal_conditional_risk_value(loss, dual.eta_star[j])) * t;
  }
  DiagnosticsReport d;
  d.tol = tol;
  d.pointwise = std::isnan(point) ? kInf : point;
  d.window_p1 = gap(adv.term_p1, star1);
  d.window_p0 = gap(adv.term_p0, star0);
  d.one_sided_ok = d.pointwise >= -tol && d.window_p1 >= -tol && d.window_p0 >= -tol;
  return d;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent_behavior: return "consistent_behavior";
    case Verdict::inconsistency_witnessed: return "inconsistency_witnessed";
    case Verdict::ambiguous: return "ambiguous";
  }
  return "?";
}

ConsistencyReport run_consistency_experiment(const GridPtr& gp, const EpsilonRadius& r, const losses::Loss& loss, const ExperimentConfig& cfg) {
  if (!losses::is_consistent(loss)) throw DomainError("consistency experiment needs a consistent loss");
  const auto& g = *gp;
  ConsistencyReport rep;
  rep.loss = loss.name();
  rep.eps = r.eps();
  rep.k = r.k();
  rep.h = g.h();
  rep.total_mass = g.total();
  rep.n_values = cfg.n_values;
  rep.threshold_N = cfg.threshold_N;
  rep.universal = losses::is_adversarially_consistent_universal(loss);
  rep.premise_half = premise_half(loss);

  const auto dual = duality::dual_classification_max(gp, r, cfg.solver_tol);
  const auto ex = duality::extremal_classifiers(dual, r, cfg.half_tol);
  rep.uniqueness = duality::check_uniqueness(dual, cfg.half_tol, cfg.mass_tol);
  rep.bayes_adv_risk = risks::minimize_adversarial_risk(gp, r).report.value;
  rep.classification_dual_value = dual.value;
  rep.dual_value = duality::dual_surrogate_value(dual, loss);

  const GridFunction f_opt = optimal_surrogate_function(ex.eta_hat, loss);
  const GridFunction f_star = rep.premise_half ? modified_optimal_function(ex.eta_hat, loss, cfg.half_tol) : f_opt;
  rep.minimizer_surrogate = risks::adversarial_surrogate_risk(f_star, loss, r).value;
  const double tol_duality = 4.0 * g.h() * g.total() + cfg.solver_tol;
  if (rep.premise_half)
    rep.modified_matches_optimal = std::abs(rep.minimizer_surrogate - risks::adversarial_surrogate_risk(f_opt, loss, r).value) <= tol_duality;
  for (double N : cfg.threshold_N) rep.threshold_trace.push_back(risks::adversarial_surrogate_risk(threshold_function(f_star, N), loss, r).value);

  const bool witness_branch = rep.uniqueness.verdict == duality::Uniqueness::not_unique && rep.premise_half;
  if (witness_branch) {
    rep.branch = "witness";
    SequenceSpec spec{ex.eta_hat, cfg.tilde_set ? *cfg.tilde_set : default_tilde_set(ex.eta_hat, cfg.half_tol), cfg.n_values, cfg.threshold_N,
                      cfg.half_tol, cfg.mass_tol};
    for (const auto& fn : inconsistency_sequence(spec, loss)) {
      rep.surrogate_trace.push_back(risks::adversarial_surrogate_risk(fn, loss, r).value);
      rep.adv_risk_trace.push_back(risks::adversarial_risk(ClassifierSet::positive_part(fn), r).value);
      rep.diagnostics.push_back(slackness_diagnostics(fn, dual, loss, r));
    }
    double min_gap = kInf;
    for (double v : rep.adv_risk_trace) min_gap = std::min(min_gap, v - rep.bayes_adv_risk);
    const bool surrogate_ok = rep.surrogate_trace.back() - rep.dual_value <= cfg.witness_surrogate_tol * g.total();
    const bool gap_ok = min_gap >= cfg.witness_gap_min * g.total();
    rep.verdict = surrogate_ok && gap_ok ? Verdict::inconsistency_witnessed : Verdict::consistent_behavior;
    if (rep.verdict != Verdict::inconsistency_witnessed) rep.note = "witness sequence did not separate the risks";
  } else {
    // Near-minimizers: f* plus vanishing deterministic noise on every cell.
    rep.branch = "near_minimizers";
    std::mt19937_64 eng(cfg.seed);
    std::vector<double> noise(g.n());
    for (double& z : noise) z = unit_noise(eng);
    for (int nv : cfg.n_values) {
      std::vector<double> v(f_star.values());
      for (std::size_t i = 0; i < v.size(); ++i)
        if (std::isfinite(v[i])) v[i] += noise[i] / nv;
      const GridFunction fn(gp, std::move(v));
      rep.surrogate_trace.push_back(risks::adversarial_surrogate_risk(fn, loss, r).value);
      rep.adv_risk_trace.push_back(risks::adversarial_risk(ClassifierSet::positive_part(fn), r).value);
      rep.diagnostics.push_back(slackness_diagnostics(fn, dual, loss, r));
    }
    const bool converged = !rep.adv_risk_trace.empty() &&
                           std::abs(rep.adv_risk_trace.back() - rep.bayes_adv_risk) <= cfg.convergence_h_multiple * g.h() * g.total() + cfg.solver_tol;
    if (rep.uniqueness.verdict == duality::Uniqueness::ambiguous) {
      rep.verdict = Verdict::ambiguous;
      rep.note = "mass at eta* = 1/2 lies between mass_tol and 10 mass_tol";
    } else {
      rep.verdict = converged ? Verdict::consistent_behavior : Verdict::inconsistency_witnessed;
      if (!converged) rep.note = "near-minimizers did not reach the adversarial Bayes risk";
    }
  }
  return rep;
}

}  // namespace advrisk::conlab

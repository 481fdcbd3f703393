// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "advrisk/conlab.hpp"
#include "oracles.hpp"

using namespace advrisk;
using grid::EpsilonRadius;
using grid::GridPtr;
using losses::Loss;

namespace {

constexpr double kH = 0.01;

GridPtr equal_sigma() { return grid::from_gaussian_mixture(0.0, 1.0, 0.5, 2.0, 1.0, 0.5, 6.0, kH); }
GridPtr unequal_sigma() { return grid::from_gaussian_mixture(0.0, 1.0, 0.5, 0.0, 2.0, 0.5, 6.0, kH); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

duality::Uniqueness verdict_at(const GridPtr& g, double eps) {
  const auto d = duality::dual_classification_max(g, EpsilonRadius(eps, *g));
  return duality::check_uniqueness(d).verdict;
}

void duality_gap() {
  struct Fixture {
    const char* name;
    GridPtr g;
    double eps;
  };
  const Fixture fx[] = {{"equal-sigma eps=0.5", equal_sigma(), 0.5}, {"equal-sigma eps=1.5", equal_sigma(), 1.5}, {"unequal-sigma eps=1.0", unequal_sigma(), 1.0}};
  bool ok = true;
  std::string detail;
  for (const auto& f : fx) {
    const auto t0 = std::chrono::steady_clock::now();
    const EpsilonRadius r(f.eps, *f.g);
    const double primal = risks::minimize_adversarial_risk(f.g, r).report.value;
    const double dual = duality::dual_classification_max(f.g, r).value;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double gap = std::abs(primal - dual);
    ok = ok && gap <= 4 * kH + 1e-6 && secs < 10.0;
    detail += fmt("[%s: primal=%.10f dual=%.10f gap=%.2e %.2fs] ", f.name, primal, dual, gap, secs);
  }
  report(1, ok, detail);
}

void phase_boundary() {
  const auto g = equal_sigma();
  bool ok = true;
  std::string detail;
  for (double eps : {0.6, 0.8, 0.9, 1.1, 1.2, 1.4}) {
    const auto v = verdict_at(g, eps);
    const auto want = eps < 1.0 ? duality::Uniqueness::unique : duality::Uniqueness::not_unique;
    ok = ok && v == want;
    detail += fmt("eps=%.1f:%s ", eps, duality::to_string(v));
  }
  report(2, ok, detail);
}

void unequal_variance() {
  const auto g = unequal_sigma();
  bool ok = true;
  std::string detail;
  for (double eps : {0.25, 0.5, 1.0, 2.0}) {
    const auto v = verdict_at(g, eps);
    ok = ok && v == duality::Uniqueness::unique;
    detail += fmt("eps=%.2f:%s ", eps, duality::to_string(v));
  }
  report(3, ok, detail);
}

void witness() {
  const auto g = equal_sigma();
  const auto rep = conlab::run_consistency_experiment(g, EpsilonRadius(1.5, *g), Loss::hinge());
  const double surrogate_gap = rep.surrogate_trace.back() - rep.dual_value;
  const auto [lo, hi] = std::minmax_element(rep.adv_risk_trace.begin(), rep.adv_risk_trace.end());
  const bool ok = rep.verdict == conlab::Verdict::inconsistency_witnessed && surrogate_gap <= 1e-3 * rep.total_mass &&
                  *lo - 0.5 >= 0.01 && *hi - *lo <= 1e-9;
  report(4, ok,
         fmt("verdict=%s R_phi(f_%d)-dual=%.3e (bound %.3e) min R(f_n)-0.5=%.4f spread=%.1e", conlab::to_string(rep.verdict),
             rep.n_values.back(), surrogate_gap, 1e-3 * rep.total_mass, *lo - 0.5, *hi - *lo));
}

void unique_regime() {
  const auto g = equal_sigma();
  const auto rep = conlab::run_consistency_experiment(g, EpsilonRadius(0.5, *g), Loss::hinge());
  const double dev = std::abs(rep.adv_risk_trace.back() - rep.bayes_adv_risk);
  const bool ok = rep.verdict == conlab::Verdict::consistent_behavior && dev <= 4 * kH;
  report(5, ok, fmt("verdict=%s |R(f_%d)-DP optimum|=%.3e (bound %.3e)", conlab::to_string(rep.verdict), rep.n_values.back(), dev, 4 * kH));
}

void rho_margin() {
  const auto g = equal_sigma();
  const Loss rho = Loss::rho_margin(1.0);
  const double c_half = losses::optimal_conditional_risk(rho, 0.5).c_star;
  const double phi0 = rho(0.0);
  bool ok = std::abs(c_half - 0.5) <= 1e-9 && phi0 == 1.0;
  std::string detail = fmt("C*(1/2)=%.12f phi(0)=%g ", c_half, phi0);
  for (double eps : {0.5, 1.5}) {
    const auto rep = conlab::run_consistency_experiment(g, EpsilonRadius(eps, *g), rho);
    ok = ok && rep.verdict == conlab::Verdict::consistent_behavior;
    detail += fmt("eps=%.1f:%s ", eps, conlab::to_string(rep.verdict));
  }
  report(6, ok, detail);
}

void oracle_equivalence() {
  // Masses on the lattice 2^-20 keep every partial sum exact, so "equal" means bitwise equal.
  std::mt19937_64 rng(20240601);
  bool ok = true;
  int dp_mismatch = 0, weak_violations = 0;
  double worst_dual_excess = -1.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng() % 18, k = rng() % 4;
    std::vector<double> m0(n), m1(n);
    for (std::size_t i = 0; i < n; ++i) {
      m0[i] = std::ldexp(static_cast<double>(rng() % 1024), -20);
      m1[i] = std::ldexp(static_cast<double>(rng() % 1024), -20);
    }
    const auto g = std::make_shared<const grid::Grid>(0.0, 1.0, m0, m1);
    const auto r = EpsilonRadius::cells(k, *g);
    const double brute = oracle::brute_min_adv_risk(m0, m1, k);
    const double dp = risks::minimize_adversarial_risk(g, r).report.value;
    const double dual = duality::dual_classification_max(g, r).value;
    if (dp != brute) ++dp_mismatch;
    if (dual > brute + 1e-12 * g->total()) ++weak_violations;
    worst_dual_excess = std::max(worst_dual_excess, dual - brute);
  }
  ok = dp_mismatch == 0 && weak_violations == 0;
  report(7, ok, fmt("50 grids: DP!=brute in %d, dual>brute in %d, max(dual-brute)=%.2e", dp_mismatch, weak_violations, worst_dual_excess));
}

void loss_calculus() {
  const std::vector<Loss> builtins = {Loss::hinge(), Loss::squared_hinge(), Loss::exponential(), Loss::sigmoid(), Loss::rho_margin(1.0),
                                      Loss::zero_one_indicator()};
  std::vector<double> mesh;
  for (int i = 0; i <= 200; ++i) mesh.push_back(i / 200.0);
  bool monotone = true, symmetric = true;
  for (const auto& l : builtins) {
    const auto a = losses::smallest_minimizer_map(l, mesh);
    for (std::size_t i = 1; i < a.size(); ++i) monotone = monotone && a[i - 1] <= a[i];
    // Dyadic eta so that 1 - (1 - eta) == eta in floating point.
    for (int i = 0; i <= 256; ++i)
      for (double alpha : {-4.0, -1.0, -0.3, 0.0, 0.3, 1.0, 4.0}) {
        const double eta = i / 256.0;
        symmetric = symmetric && losses::conditional_risk(l, eta, alpha) == losses::conditional_risk(l, 1.0 - eta, -alpha);
      }
  }
  bool gap_ok = true;
  std::string detail;
  for (const auto& l : {Loss::hinge(), Loss::exponential()})
    for (double r : {0.1, 0.25}) {
      const auto u = losses::uniform_gap(l, r);
      gap_ok = gap_ok && u.k_r > 0.0;
      detail += fmt("%s r=%.2f k_r=%.4g ", l.name().c_str(), r, u.k_r);
    }
  report(8, monotone && symmetric && gap_ok, fmt("monotone=%d symmetric=%d ", monotone, symmetric) + detail);
}

struct ThresholdRun {
  long infinite = 0;
  bool monotone = true;
  double deviation = 0.0;
  double target = 0.0;
};

ThresholdRun threshold_run(const GridPtr& g, double eps, const Loss& loss) {
  const EpsilonRadius r(eps, *g);
  const auto d = duality::dual_classification_max(g, r);
  const auto x = duality::extremal_classifiers(d, r);
  const auto f = conlab::modified_optimal_function(x.eta_hat, loss);
  ThresholdRun out;
  out.infinite = static_cast<long>(std::count_if(f.values().begin(), f.values().end(), [](double v) { return std::isinf(v); }));
  out.target = risks::adversarial_surrogate_risk(f, loss, r).value;
  double prev = std::numeric_limits<double>::infinity(), last = prev;
  for (double N : conlab::default_threshold_N()) {
    last = risks::adversarial_surrogate_risk(conlab::threshold_function(f, N), loss, r).value;
    out.monotone = out.monotone && last <= prev;
    prev = last;
  }
  out.deviation = std::isinf(out.target) ? std::numeric_limits<double>::infinity() : std::abs(last - out.target);
  return out;
}

void thresholding() {
  // The criterion concerns an f* that takes infinite values; without such cells the clamp is eventually the identity.
  const auto t = threshold_run(equal_sigma(), 0.5, Loss::exponential());
  const bool ok = t.infinite > 0 && t.monotone && t.deviation <= 1e-6;
  // For reference: on the unequal-variance fixture the only infinite cells come from tail masses below
  // the resolution of the cumulative sums, and there R_phi(f*) itself is infinite.
  const auto u = threshold_run(unequal_sigma(), 1.0, Loss::exponential());
  report(9, ok,
         fmt("equal-sigma eps=0.5: infinite cells=%ld monotone=%d final deviation=%.2e R_phi(f*)=%.12f | unequal-sigma eps=1.0: infinite cells=%ld "
             "monotone=%d R_phi(f*)=%g",
             t.infinite, t.monotone, t.deviation, t.target, u.infinite, u.monotone, u.target));
}

}  // namespace

int main() {
  duality_gap();
  phase_boundary();
  unequal_variance();
  witness();
  unique_regime();
  rho_margin();
  oracle_equivalence();
  loss_calculus();
  thresholding();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

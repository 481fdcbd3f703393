#include "advrisk/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advrisk/errors.hpp"
#include "taut_string.hpp"

namespace advrisk::duality {

using grid::EpsilonRadius;
using grid::GridFunction;
using grid::GridPtr;
using risks::ClassifierSet;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<long double> cumulative(const std::vector<double>& m) {
  std::vector<long double> c(m.size());
  long double a = 0;
  for (std::size_t i = 0; i < m.size(); ++i) c[i] = (a += m[i]);
  return c;
}

Coupling transport(const std::vector<double>& mass, const std::vector<long double>& target, std::size_t k, int source) {
  const std::size_t n = mass.size();
  Coupling g(n, k, source);
  auto f = cumulative(mass);
  f.back() = target.back();
  const double total = static_cast<double>(f.back()) + 1e-300;
  detail::monotone_transport(f, target, [&](std::size_t i, std::size_t j, double w) {
    if (!g.in_band(i, j)) {
      if (w > 1e-13 * total) throw NumericError("monotone transport left the band", static_cast<double>(i), static_cast<double>(j));
      return;  // rounding residue at a box corner
    }
    g.at(i, j) += w;
  });
  return g;
}

double ratio(double m0, double m1) { return m0 + m1 > 0.0 ? m1 / (m0 + m1) : 0.5; }

// Euclidean projection of v onto {x >= 0, sum x = z}.
void project_simplex(double* v, std::size_t len, double z, std::vector<double>& scratch) {
  scratch.assign(v, v + len);
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    cum += scratch[i];
    const double t = (cum - z) / static_cast<double>(i + 1);
    if (scratch[i] - t > 0.0) theta = t;
  }
  for (std::size_t i = 0; i < len; ++i) v[i] = std::max(0.0, v[i] - theta);
}

}  // namespace

Coupling::Coupling(std::size_t n, std::size_t k, int source) : n_(n), k_(k), source_(source), band_(n * (2 * k + 1), 0.0) {}

double& Coupling::at(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_ || !in_band(i, j)) throw DomainError("coupling entry outside the band");
  return band_[slot(i, j)];
}

std::vector<double> Coupling::row_sums() const {
  std::vector<double> r(n_, 0.0);
  for (const auto& e : nonzeros()) r[e.i] += e.w;
  return r;
}

std::vector<double> Coupling::col_sums() const {
  std::vector<double> c(n_, 0.0);
  for (const auto& e : nonzeros()) c[e.j] += e.w;
  return c;
}

std::vector<Coupling::Entry> Coupling::nonzeros() const {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i >= k_ ? i - k_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + k_);
    for (std::size_t j = lo; j <= hi; ++j) {
      const double w = band_[slot(i, j)];
      if (w != 0.0) out.push_back({i, j, w});
    }
  }
  return out;
}

double band_matching_value(const grid::Grid& g, std::size_t k) {
  // P1 cell i can meet P0 cell i' iff |i - i'| <= 2k. Neighbourhoods are intervals
  // with monotone ends, so matching each P1 cell to the earliest open P0 cell is a maximum flow.
  const std::size_t n = g.n();
  std::vector<long double> r0(g.m0().begin(), g.m0().end());
  long double total = 0;
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long double need = g.m1()[i];
    const std::size_t lo = i >= 2 * k ? i - 2 * k : 0;
    const std::size_t hi = std::min(n - 1, i + 2 * k);
    std::size_t q = std::max(p, lo);
    while (need > 0 && q <= hi) {
      const long double t = std::min(need, r0[q]);
      r0[q] -= t;
      need -= t;
      total += t;
      if (r0[q] <= 0) ++q;
    }
    p = q;  // cells in [lo, q) are exhausted
  }
  return static_cast<double>(total);
}

DualSolution dual_classification_max(const GridPtr& gp, const EpsilonRadius& r, double solver_tol, double budget) {
  const auto& g = *gp;
  if (!r.matches(g)) throw DomainError("radius was derived from a different grid");
  const double vars = 2.0 * static_cast<double>(g.n()) * static_cast<double>(2 * r.k() + 1);
  if (vars > budget) throw BudgetError("dual LP: " + std::to_string(vars) + " variables exceed budget");
  const std::size_t n = g.n(), k = r.k();

  const detail::BandPath path = detail::taut_band_path(g.m0(), g.m1(), k);
  std::vector<double> m0s(n), m1s(n);
  for (std::size_t j = 0; j < n; ++j) {
    m0s[j] = static_cast<double>(path.g0[j] - (j ? path.g0[j - 1] : 0));
    m1s[j] = static_cast<double>(path.g1[j] - (j ? path.g1[j - 1] : 0));
  }
  double value = 0.0;
  for (std::size_t j = 0; j < n; ++j) value += (m0s[j] + m1s[j]) * std::min(path.eta[j], 1.0 - path.eta[j]);

  const double check = band_matching_value(g, k);
  if (std::abs(value - check) > solver_tol)
    throw NumericError("dual LP: taut-string value " + std::to_string(value) + " disagrees with band matching " + std::to_string(check),
                       std::min(value, check), std::max(value, check));

  DualSolution d{gp,
                 r,
                 m0s,
                 m1s,
                 transport(g.m0(), path.g0, k, 0),
                 transport(g.m1(), path.g1, k, 1),
                 GridFunction(gp, path.eta),
                 std::vector<std::uint8_t>(path.zero.begin(), path.zero.end()),
                 value,
                 ObjectiveKind::classification,
                 ""};
  return d;
}

double dual_surrogate_value(const DualSolution& dual, const losses::Loss& loss) {
  double v = 0.0;
  for (std::size_t j = 0; j < dual.m0_star.size(); ++j) {
    const double t = dual.m0_star[j] + dual.m1_star[j];
    if (t > 0.0) v += t * losses::optimal_conditional_risk_value(loss, dual.eta_star[j]);
  }
  return v;
}

AscentResult dual_surrogate_ascent(const GridPtr& gp, const EpsilonRadius& r, const losses::Loss& loss, int iters, double step,
                                   double stall_tol, int stall_window) {
  const auto& g = *gp;
  if (!r.matches(g)) throw DomainError("radius was derived from a different grid");
  if (iters < 1 || !(step > 0.0)) throw DomainError("ascent needs iters >= 1 and step > 0");
  const std::size_t n = g.n(), k = r.k(), width = 2 * k + 1;

  auto cstar = [&](double eta) { return losses::optimal_conditional_risk_value(loss, std::clamp(eta, 0.0, 1.0)); };
  {
    // Concavity spot check of C_phi* on a coarse mesh.
    for (int i = 1; i < 100; ++i) {
      const double e = i / 100.0, d = 0.01;
      if (cstar(e) + 1e-9 < 0.5 * (cstar(e - d) + cstar(e + d))) throw NumericError("C_phi* is not concave", e - d, e + d);
    }
  }

  // x[c][i*width + (j - i + k)]: fraction of source cell i's mass sent to j.
  std::vector<double> x[2] = {std::vector<double>(n * width, 0.0), std::vector<double>(n * width, 0.0)};
  // Start from the plan spreading each cell evenly over its in-grid window.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t jlo = i >= k ? 0 : k - i;
    const std::size_t jhi = std::min(width - 1, n - 1 + k - i);
    for (std::size_t s = jlo; s <= jhi; ++s) x[0][i * width + s] = x[1][i * width + s] = 1.0 / static_cast<double>(jhi - jlo + 1);
  }
  const std::vector<double>* mass[2] = {&g.m0(), &g.m1()};

  std::vector<double> a(n), b(n), ga(n), gb(n), scratch, best_a, best_b;
  std::vector<double> best_x[2];
  auto marginals = [&](const std::vector<double>* plan) {
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(b.begin(), b.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < width; ++s) {
        const long long j = static_cast<long long>(i + s) - static_cast<long long>(k);
        if (j < 0 || j >= static_cast<long long>(n)) continue;
        a[static_cast<std::size_t>(j)] += (*mass[0])[i] * plan[0][i * width + s];
        b[static_cast<std::size_t>(j)] += (*mass[1])[i] * plan[1][i * width + s];
      }
  };
  auto objective = [&] {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (a[j] + b[j] > 0.0) v += (a[j] + b[j]) * cstar(ratio(a[j], b[j]));
    return v;
  };

  AscentResult res{DualSolution{gp, r, {}, {}, Coupling(), Coupling(), GridFunction(gp, 0.5), {}, 0.0, ObjectiveKind::surrogate, loss.name()},
                   {},
                   false,
                   0};
  marginals(x);
  double best = objective();
  best_a = a;
  best_b = b;
  best_x[0] = x[0];
  best_x[1] = x[1];
  int since = 0;
  const double dh = 0x1p-23;  // a power of two keeps e +- dh exact near 1/2
  for (int it = 0; it < iters; ++it) {
    res.iterations = it + 1;
    res.trace.push_back(best);
    if (k == 0) break;  // the feasible set is a single point
    for (std::size_t j = 0; j < n; ++j) {
      const double e = ratio(a[j], b[j]);
      const double c = cstar(e);
      const double lo = std::max(0.0, e - dh), hi = std::min(1.0, e + dh);
      const double dc = (cstar(hi) - cstar(lo)) / (hi - lo);
      ga[j] = c - e * dc;
      gb[j] = c + (1.0 - e) * dc;
    }
    const double st = step / std::sqrt(static_cast<double>(it) + 1.0);
    for (int cls = 0; cls < 2; ++cls) {
      const auto& grad = cls == 0 ? ga : gb;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t jlo = i >= k ? 0 : k - i;
        const std::size_t jhi = std::min(width - 1, n - 1 + k - i);
        double* row = &x[cls][i * width];
        for (std::size_t s = jlo; s <= jhi; ++s) row[s] += st * grad[i + s - k];
        project_simplex(row + jlo, jhi - jlo + 1, 1.0, scratch);
      }
    }
    marginals(x);
    const double v = objective();
    if (v > best + stall_tol) {
      best = v;
      best_a = a;
      best_b = b;
      best_x[0] = x[0];
      best_x[1] = x[1];
      since = 0;
    } else if (++since >= stall_window) {
      res.stalled = true;
      res.trace.push_back(best);
      break;
    }
  }

  DualSolution& d = res.dual;
  d.m0_star = best_a;
  d.m1_star = best_b;
  d.value = best;
  std::vector<double> eta(n, 0.5);
  d.zero_mass.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (best_a[j] + best_b[j] > 0.0) eta[j] = ratio(best_a[j], best_b[j]);
    else d.zero_mass[j] = 1;
  }
  d.eta_star = GridFunction(gp, std::move(eta));
  for (int cls = 0; cls < 2; ++cls) {
    Coupling c(n, k, cls);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < width; ++s) {
        const long long j = static_cast<long long>(i + s) - static_cast<long long>(k);
        if (j < 0 || j >= static_cast<long long>(n)) continue;
        const double w = (*mass[cls])[i] * best_x[cls][i * width + s];
        if (w > 0.0) c.at(i, static_cast<std::size_t>(j)) = w;
      }
    (cls == 0 ? d.gamma0 : d.gamma1) = std::move(c);
  }
  return res;
}

double classification_conditional_risk(double eta, bool in_a) { return in_a ? 1.0 - eta : eta; }

CertReport certify_complementary_slackness(const ClassifierSet& set, const DualSolution& dual, const EpsilonRadius& r, double tol) {
  const auto& g = set.grid();
  if (g.n() != dual.m0_star.size() || r.k() != dual.radius.k()) throw DomainError("set and dual live on different grids or radii");
  CertReport c;
  c.tol = tol;
  const auto adv = risks::adversarial_risk(set, r);
  double p1s = 0.0, p0s = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (set.contains(j)) p0s += dual.m0_star[j];
    else p1s += dual.m1_star[j];
  }
  c.p1_gap = adv.term_p1 - p1s;
  c.p0_gap = adv.term_p0 - p0s;
  c.cond1_pass = std::abs(c.p1_gap) <= tol && std::abs(c.p0_gap) <= tol;

  for (std::size_t j = 0; j < g.n(); ++j) {
    const double t = dual.m0_star[j] + dual.m1_star[j];
    if (!(t > tol)) continue;
    ++c.cells_checked;
    const double e = dual.eta_star[j];
    const double deficit = t * (classification_conditional_risk(e, set.contains(j)) - std::min(e, 1.0 - e));
    if (deficit > c.pointwise_worst) {
      c.pointwise_worst = deficit;
      c.pointwise_cell = j;
      c.pointwise_worst_eta = e;
    }
  }
  c.cond2_pass = c.pointwise_worst <= tol;
  c.pass = c.cond1_pass && c.cond2_pass;
  return c;
}

const char* to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::unique: return "unique";
    case Uniqueness::not_unique: return "not_unique";
    case Uniqueness::ambiguous: return "ambiguous";
  }
  return "?";
}

Extremal extremal_classifiers(const DualSolution& dual, const EpsilonRadius& r, double half_tol, double cert_tol) {
  const GridPtr& gp = dual.grid;
  const std::size_t n = gp->n(), k = r.k();
  std::vector<double> eta(dual.eta_star.values());
  std::vector<double> upper(n, 0.0), lower(n, 0.0);  // supported cells on each side of 1/2
  std::vector<long long> supported;
  for (std::size_t j = 0; j < n; ++j) {
    if (dual.zero_mass[j]) continue;
    supported.push_back(static_cast<long long>(j));
    if (eta[j] > 0.5 - half_tol) upper[j] = 1.0;
    if (eta[j] < 0.5 + half_tol) lower[j] = 1.0;
  }
  upper = grid::sliding_max(upper, k);
  lower = grid::sliding_max(lower, k);
  std::size_t extended = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!dual.zero_mass[j]) continue;
    ++extended;
    if (upper[j] > 0.0 && lower[j] > 0.0) {
      eta[j] = 0.5;
      continue;
    }
    if (supported.empty()) continue;
    const auto it = std::lower_bound(supported.begin(), supported.end(), static_cast<long long>(j));
    long long best = it == supported.end() ? supported.back() : *it;
    if (it != supported.begin()) {
      const long long left = *(it - 1);
      if (it == supported.end() || static_cast<long long>(j) - left <= best - static_cast<long long>(j)) best = left;
    }
    eta[j] = dual.eta_star[static_cast<std::size_t>(best)];
  }
  std::vector<std::uint8_t> mn(n), mx(n);
  for (std::size_t j = 0; j < n; ++j) {
    mn[j] = eta[j] > 0.5 + half_tol ? 1 : 0;
    mx[j] = eta[j] >= 0.5 - half_tol ? 1 : 0;
  }
  ClassifierSet a_min(gp, std::move(mn)), a_max(gp, std::move(mx));
  CertReport c_min = certify_complementary_slackness(a_min, dual, r, cert_tol);
  CertReport c_max = certify_complementary_slackness(a_max, dual, r, cert_tol);
  return {std::move(a_min), std::move(a_max), GridFunction(gp, std::move(eta)), c_min, c_max, extended};
}

UniquenessVerdict check_uniqueness(const DualSolution& dual, double half_tol, double mass_tol) {
  UniquenessVerdict v;
  v.half_tol = half_tol;
  v.mass_tol = mass_tol < 0.0 ? 1e-4 * dual.grid->total() : mass_tol;
  for (std::size_t j = 0; j < dual.m0_star.size(); ++j) {
    const double t = dual.m0_star[j] + dual.m1_star[j];
    if (t > 0.0 && std::abs(dual.eta_star[j] - 0.5) <= half_tol) v.mass_at_half += t;
  }
  if (v.mass_at_half <= v.mass_tol) v.verdict = Uniqueness::unique;
  else if (v.mass_at_half >= 10.0 * v.mass_tol) v.verdict = Uniqueness::not_unique;
  else v.verdict = Uniqueness::ambiguous;

  const Extremal ex = extremal_classifiers(dual, dual.radius, half_tol);
  v.p0_term_min = risks::adversarial_risk(ex.a_min, dual.radius).term_p0;
  v.p0_term_max = risks::adversarial_risk(ex.a_max, dual.radius).term_p0;
  const bool same = std::abs(v.p0_term_max - v.p0_term_min) <= v.mass_tol;
  v.cross_check_agrees = v.verdict == Uniqueness::ambiguous || (v.verdict == Uniqueness::unique) == same;
  return v;
}

}  // namespace advrisk::duality

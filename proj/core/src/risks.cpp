#include "advrisk/risks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advrisk/errors.hpp"

namespace advrisk::risks {

using grid::EpsilonRadius;
using grid::GridFunction;
using grid::GridPtr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sum of mass * value where mass > 0 (0 * inf = 0).
double weighted(const std::vector<double>& mass, const std::vector<double>& value) {
  double s = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (mass[i] > 0.0) s += mass[i] * value[i];
  return s;
}

RiskReport report(double p1, double p0) { return {p1 + p0, p1, p0}; }

}  // namespace

ClassifierSet::ClassifierSet(GridPtr grid, std::vector<std::uint8_t> mask) : grid_(std::move(grid)), mask_(std::move(mask)) {
  if (!grid_) throw DomainError("classifier set needs a grid");
  if (mask_.size() != grid_->n()) throw DomainError("classifier mask length does not match grid");
  for (auto& m : mask_) m = m ? 1 : 0;
}

ClassifierSet ClassifierSet::empty(GridPtr grid) {
  const auto n = grid->n();
  return ClassifierSet(std::move(grid), std::vector<std::uint8_t>(n, 0));
}

ClassifierSet ClassifierSet::full(GridPtr grid) {
  const auto n = grid->n();
  return ClassifierSet(std::move(grid), std::vector<std::uint8_t>(n, 1));
}

ClassifierSet ClassifierSet::from_intervals(GridPtr grid, const std::vector<std::pair<double, double>>& intervals) {
  std::vector<std::uint8_t> mask(grid->n(), 0);
  for (std::size_t i = 0; i < grid->n(); ++i)
    for (const auto& [a, b] : intervals)
      if (grid->x(i) >= a && grid->x(i) <= b) mask[i] = 1;
  return ClassifierSet(std::move(grid), std::move(mask));
}

ClassifierSet ClassifierSet::positive_part(const GridFunction& f) {
  std::vector<std::uint8_t> mask(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) mask[i] = f[i] > 0.0 ? 1 : 0;
  return ClassifierSet(f.grid_ptr(), std::move(mask));
}

std::vector<Interval> ClassifierSet::intervals() const {
  std::vector<Interval> out;
  const std::size_t n = mask_.size();
  std::size_t i = 0;
  while (i < n) {
    if (!mask_[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && mask_[j + 1]) ++j;
    out.push_back({i == 0 ? -kInf : grid_->edge(i), j + 1 == n ? kInf : grid_->edge(j + 1), i, j});
    i = j + 1;
  }
  return out;
}

bool ClassifierSet::separated(const EpsilonRadius& r) const {
  std::vector<double> bnd;
  for (const auto& iv : intervals()) {
    if (std::isfinite(iv.a)) bnd.push_back(iv.a);
    if (std::isfinite(iv.b)) bnd.push_back(iv.b);
  }
  for (std::size_t i = 1; i < bnd.size(); ++i)
    if (!(bnd[i] - bnd[i - 1] > 2.0 * r.snapped() + 1e-9 * grid_->h())) return false;
  return true;
}

RiskReport risk(const ClassifierSet& set) {
  const auto& g = set.grid();
  double p1 = 0.0, p0 = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (set.contains(i)) p0 += g.m0()[i];
    else p1 += g.m1()[i];
  }
  return report(p1, p0);
}

RiskReport adversarial_risk(const ClassifierSet& set, const EpsilonRadius& r) {
  const auto& g = set.grid();
  if (!r.matches(g)) throw DomainError("radius was derived from a different grid");
  const std::size_t n = g.n();
  std::vector<double> in_a(n), in_ac(n);
  for (std::size_t i = 0; i < n; ++i) {
    in_a[i] = set.contains(i) ? 1.0 : 0.0;
    in_ac[i] = 1.0 - in_a[i];
  }
  return report(weighted(g.m1(), grid::sliding_max(in_ac, r.k())), weighted(g.m0(), grid::sliding_max(in_a, r.k())));
}

RiskReport surrogate_risk(const GridFunction& f, const losses::Loss& loss) {
  const auto& g = f.grid();
  std::vector<double> pos(f.size()), neg(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    pos[i] = loss(f[i]);
    neg[i] = loss(-f[i]);
  }
  return report(weighted(g.m1(), pos), weighted(g.m0(), neg));
}

RiskReport adversarial_surrogate_risk(const GridFunction& f, const losses::Loss& loss, const EpsilonRadius& r) {
  const auto& g = f.grid();
  if (!r.matches(g)) throw DomainError("radius was derived from a different grid");
  std::vector<double> pos(f.size()), neg(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    pos[i] = loss(f[i]);
    neg[i] = loss(-f[i]);
  }
  return report(weighted(g.m1(), grid::sliding_max(pos, r.k())), weighted(g.m0(), grid::sliding_max(neg, r.k())));
}

namespace {

struct Cost {
  double risk = kInf;
  double sec = kInf;
};

}  // namespace

// Run-based DP. A labeling is a sequence of maximal runs; interior runs have
// at least 2k+1 cells, so every cell sees at most one boundary and a run's
// cost depends only on its own extent and whether it has neighbors.
Minimizer minimize_adversarial_risk(const GridPtr& gp, const EpsilonRadius& r, const DpOptions& opts) {
  const auto& g = *gp;
  if (!r.matches(g)) throw DomainError("radius was derived from a different grid");
  const std::size_t n = g.n();
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  if (nn > opts.budget) throw BudgetError("adversarial risk DP on " + std::to_string(n) + " cells exceeds the budget of n^2 transitions");
  const std::size_t k = r.k();
  const std::size_t min_interior = 2 * k + 1;

  std::vector<double> c0(n + 1, 0.0), c1(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    c0[i + 1] = c0[i] + g.m0()[i];
    c1[i + 1] = c1[i] + g.m1()[i];
  }
  auto sum = [](const std::vector<double>& c, std::size_t a, std::size_t b) { return b < a ? 0.0 : c[b + 1] - c[a]; };

  // Mass of `c` over cells of [s,e] within k of a neighbor run.
  auto edge_mass = [&](const std::vector<double>& c, std::size_t s, std::size_t e) {
    const bool left = s > 0, right = e + 1 < n;
    if (k == 0 || (!left && !right)) return 0.0;
    const std::size_t len = e - s + 1;
    if ((left && right && len <= 2 * k) || (left != right && len <= k)) return sum(c, s, e);
    double m = 0.0;
    if (left) m += sum(c, s, s + k - 1);
    if (right) m += sum(c, e + 1 - k, e);
    return m;
  };

  const double tie_tol = 1e-13 * g.total();
  auto run_cost = [&](std::size_t s, std::size_t e, int label) {
    double p1, p0;
    if (label == 1) {
      p0 = sum(c0, s, e);
      p1 = edge_mass(c1, s, e);
    } else {
      p1 = sum(c1, s, e);
      p0 = edge_mass(c0, s, e);
    }
    Cost c;
    c.risk = p1 + p0;
    switch (opts.tie_break) {
      case TieBreak::fewest_intervals: c.sec = label == 1 ? 1.0 : 0.0; break;
      case TieBreak::min_p0_term: c.sec = p0; break;
      case TieBreak::max_p0_term: c.sec = -p0; break;
    }
    return c;
  };
  auto better = [&](const Cost& a, const Cost& b) {
    if (a.risk < b.risk - tie_tol) return true;
    if (a.risk > b.risk + tie_tol) return false;
    return a.sec < b.sec - 1e-15;
  };

  std::vector<Cost> best(2 * n);
  std::vector<std::size_t> start(2 * n, 0);
  for (std::size_t e = 0; e < n; ++e) {
    const bool last = e + 1 == n;
    for (int label = 0; label < 2; ++label) {
      Cost b = run_cost(0, e, label);
      std::size_t arg = 0;
      for (std::size_t s = 1; s <= e; ++s) {
        if (!last && e - s + 1 < min_interior) break;
        const Cost& prev = best[2 * (s - 1) + (1 - label)];
        const Cost rc = run_cost(s, e, label);
        const Cost c{prev.risk + rc.risk, prev.sec + rc.sec};
        if (better(c, b)) {
          b = c;
          arg = s;
        }
      }
      best[2 * e + label] = b;
      start[2 * e + label] = arg;
    }
  }

  int label = better(best[2 * (n - 1) + 1], best[2 * (n - 1)]) ? 1 : 0;
  std::vector<std::uint8_t> mask(n, 0);
  std::size_t e = n - 1;
  while (true) {
    const std::size_t s = start[2 * e + label];
    for (std::size_t i = s; i <= e; ++i) mask[i] = static_cast<std::uint8_t>(label);
    if (s == 0) break;
    e = s - 1;
    label = 1 - label;
  }
  ClassifierSet set(gp, std::move(mask));
  const RiskReport rep = adversarial_risk(set, r);
  return {std::move(set), rep};
}

}  // namespace advrisk::risks

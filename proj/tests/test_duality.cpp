#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "advrisk/duality.hpp"
#include "advrisk/errors.hpp"
#include "oracles.hpp"

using namespace advrisk;
using duality::DualSolution;
using grid::EpsilonRadius;
using grid::GridPtr;
using risks::ClassifierSet;

namespace {

GridPtr two_atoms(std::size_t d) {
  std::vector<double> m0(d + 1, 0.0), m1(d + 1, 0.0);
  m1[0] = 0.5;
  m0[d] = 0.5;
  return std::make_shared<const grid::Grid>(0.0, 1.0, m0, m1);
}

GridPtr equal_sigma(double h = 0.01) { return grid::from_gaussian_mixture(0.0, 1.0, 0.5, 2.0, 1.0, 0.5, 6.0, h); }
GridPtr unequal_sigma(double h = 0.01) { return grid::from_gaussian_mixture(0.0, 1.0, 0.5, 0.0, 2.0, 0.5, 6.0, h); }

// Random masses that are integer multiples of 2^-20, so the max-flow oracle is exact.
GridPtr random_lattice_grid(std::mt19937_64& rng, std::size_t n, std::vector<long long>& a0, std::vector<long long>& a1) {
  a0.assign(n, 0);
  a1.assign(n, 0);
  std::vector<double> m0(n), m1(n);
  for (std::size_t i = 0; i < n; ++i) {
    a0[i] = (rng() % 3 == 0) ? 0 : static_cast<long long>(rng() % 1000);
    a1[i] = (rng() % 3 == 0) ? 0 : static_cast<long long>(rng() % 1000);
    m0[i] = std::ldexp(static_cast<double>(a0[i]), -20);
    m1[i] = std::ldexp(static_cast<double>(a1[i]), -20);
  }
  return std::make_shared<const grid::Grid>(0.0, 1.0, m0, m1);
}

void expect_valid(const DualSolution& d, double tol) {
  const auto& g = *d.grid;
  const auto r0 = d.gamma0.row_sums(), c0 = d.gamma0.col_sums();
  const auto r1 = d.gamma1.row_sums(), c1 = d.gamma1.col_sums();
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    EXPECT_NEAR(r0[i], g.m0()[i], tol);
    EXPECT_NEAR(r1[i], g.m1()[i], tol);
    EXPECT_NEAR(c0[i], d.m0_star[i], tol);
    EXPECT_NEAR(c1[i], d.m1_star[i], tol);
    EXPECT_GE(d.m0_star[i], 0.0);
    EXPECT_GE(d.m1_star[i], 0.0);
    s0 += d.m0_star[i];
    s1 += d.m1_star[i];
  }
  EXPECT_NEAR(s0, g.total0(), 1e-12 * g.total() + 1e-300);
  EXPECT_NEAR(s1, g.total1(), 1e-12 * g.total() + 1e-300);
  for (const auto& e : d.gamma0.nonzeros()) EXPECT_LE(e.i > e.j ? e.i - e.j : e.j - e.i, d.radius.k());
  double v = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double t = d.m0_star[j] + d.m1_star[j];
    if (t > 0) v += t * std::min(d.eta_star[j], 1.0 - d.eta_star[j]);
  }
  EXPECT_NEAR(v, d.value, 1e-12);
}

}  // namespace

TEST(Coupling, BandStorage) {
  duality::Coupling c(5, 1, 0);
  c.at(0, 1) = 0.25;
  c.at(2, 2) = 0.5;
  EXPECT_EQ(c(0, 1), 0.25);
  EXPECT_EQ(c(0, 3), 0.0);
  EXPECT_THROW(c.at(0, 3), DomainError);
  EXPECT_EQ(c.row_sums()[0], 0.25);
  EXPECT_EQ(c.col_sums()[1], 0.25);
  EXPECT_EQ(c.nonzeros().size(), 2u);
}

TEST(ClassificationDual, TwoAtoms) {
  const auto near = two_atoms(2);
  const auto d = duality::dual_classification_max(near, EpsilonRadius::cells(1, *near));
  EXPECT_NEAR(d.value, 0.5, 1e-12);
  expect_valid(d, 1e-12);
  EXPECT_NEAR(duality::dual_surrogate_value(d, losses::Loss::hinge()), 1.0, 1e-12);
  EXPECT_NEAR(duality::dual_surrogate_value(d, losses::Loss::rho_margin(1.0)), 0.5, 1e-12);

  const auto far = two_atoms(3);
  EXPECT_NEAR(duality::dual_classification_max(far, EpsilonRadius::cells(1, *far)).value, 0.0, 1e-15);
}

TEST(ClassificationDual, ZeroRadiusIsNonAdversarialOptimum) {
  const auto g = unequal_sigma(0.05);
  const auto d = duality::dual_classification_max(g, EpsilonRadius(0.0, *g));
  double expect = 0.0, hinge = 0.0;
  for (std::size_t i = 0; i < g->n(); ++i) {
    expect += std::min(g->m0()[i], g->m1()[i]);
    const double t = g->m0()[i] + g->m1()[i];
    if (t > 0) hinge += t * losses::optimal_conditional_risk_value(losses::Loss::hinge(), g->m1()[i] / t);
  }
  EXPECT_NEAR(d.value, expect, 1e-12);
  EXPECT_NEAR(duality::dual_surrogate_value(d, losses::Loss::hinge()), hinge, 1e-12);
}

TEST(ClassificationDual, MatchesMaxFlowOracle) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    std::vector<long long> a0, a1;
    const auto g = random_lattice_grid(rng, 1 + rng() % 20, a0, a1);
    const std::size_t k = rng() % 4;
    const auto d = duality::dual_classification_max(g, EpsilonRadius::cells(k, *g));
    const double flow = std::ldexp(static_cast<double>(oracle::max_matching(a1, a0, k)), -20);
    EXPECT_NEAR(d.value, flow, 1e-12) << "trial " << t;
    EXPECT_NEAR(duality::band_matching_value(*g, k), flow, 1e-12);
    expect_valid(d, 1e-12);
  }
}

TEST(ClassificationDual, WeakAndStrongDualityRandom) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    std::vector<long long> a0, a1;
    const auto g = random_lattice_grid(rng, 1 + rng() % 16, a0, a1);
    const auto r = EpsilonRadius::cells(rng() % 4, *g);
    const double dual = duality::dual_classification_max(g, r).value;
    const double primal = oracle::brute_min_adv_risk(g->m0(), g->m1(), r.k());
    EXPECT_LE(dual, primal + 1e-12);
    // Grids of atoms can sit strictly inside the gap only through the separation restriction, never here.
    EXPECT_NEAR(dual, primal, 1e-12) << "trial " << t;
  }
}

TEST(ClassificationDual, GaussianFixtures) {
  struct Case {
    GridPtr g;
    double eps;
  };
  for (const auto& c : {Case{equal_sigma(), 0.5}, Case{equal_sigma(), 1.5}, Case{unequal_sigma(), 1.0}}) {
    const EpsilonRadius r(c.eps, *c.g);
    const auto d = duality::dual_classification_max(c.g, r);
    const auto m = risks::minimize_adversarial_risk(c.g, r);
    EXPECT_LE(std::abs(m.report.value - d.value), 4 * c.g->h() * c.g->total() + 1e-9);
    EXPECT_LE(d.value, m.report.value + 2 * c.g->h() * c.g->total());
    expect_valid(d, 1e-12);
  }
  const auto g = equal_sigma();
  EXPECT_NEAR(duality::dual_classification_max(g, EpsilonRadius(1.5, *g)).value, 0.5, 2 * g->h());
}

TEST(ClassificationDual, CouplingsRespectWindowLemma) {
  const auto g = unequal_sigma(0.05);
  const EpsilonRadius r(0.5, *g);
  const auto d = duality::dual_classification_max(g, r);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> e(g->n());
    for (auto& x : e) x = rng() % 5 == 0 ? 1.0 : 0.0;
    const auto se = grid::sliding_max(e, r.k());
    double lhs0 = 0.0, rhs0 = 0.0, lhs1 = 0.0, rhs1 = 0.0;
    for (std::size_t i = 0; i < g->n(); ++i) {
      lhs0 += se[i] * g->m0()[i];
      rhs0 += e[i] * d.m0_star[i];
      lhs1 += se[i] * g->m1()[i];
      rhs1 += e[i] * d.m1_star[i];
    }
    EXPECT_GE(lhs0, rhs0 - 1e-12);
    EXPECT_GE(lhs1, rhs1 - 1e-12);
  }
}

TEST(ClassificationDual, BudgetExceeded) {
  const auto g = equal_sigma();
  EXPECT_THROW(duality::dual_classification_max(g, EpsilonRadius(0.5, *g), 1e-9, 10.0), BudgetError);
}

TEST(SurrogateAscent, TwoAtomsAndZeroRadius) {
  const auto near = two_atoms(2);
  const auto a = duality::dual_surrogate_ascent(near, EpsilonRadius::cells(1, *near), losses::Loss::hinge());
  EXPECT_NEAR(a.dual.value, 1.0, 1e-4);

  const auto g = unequal_sigma(0.1);
  const auto z = duality::dual_surrogate_ascent(g, EpsilonRadius(0.0, *g), losses::Loss::hinge());
  EXPECT_LE(z.iterations, 1);
  const auto d = duality::dual_classification_max(g, EpsilonRadius(0.0, *g));
  EXPECT_NEAR(z.dual.value, duality::dual_surrogate_value(d, losses::Loss::hinge()), 1e-12);
}

TEST(SurrogateAscent, DistinguishedSolutionIsSimultaneousMaximizer) {
  const auto g = unequal_sigma(0.1);
  const EpsilonRadius r(0.5, *g);
  const auto d = duality::dual_classification_max(g, r);
  for (const auto& loss : {losses::Loss::hinge(), losses::Loss::squared_hinge(), losses::Loss::exponential(), losses::Loss::sigmoid(),
                           losses::Loss::rho_margin(1.0)}) {
    const auto a = duality::dual_surrogate_ascent(g, r, loss, 600);
    const double dv = duality::dual_surrogate_value(d, loss);
    EXPECT_GE(dv, a.dual.value - 1e-9) << loss.name();
    EXPECT_LE(std::abs(dv - a.dual.value), 2 * g->h() * g->total() + 1e-9) << loss.name();
    for (std::size_t i = 1; i < a.trace.size(); ++i) EXPECT_GE(a.trace[i], a.trace[i - 1]);
  }
}

TEST(Certification, EqualSigmaSmallEps) {
  const auto g = equal_sigma();
  const EpsilonRadius r(0.5, *g);
  const auto d = duality::dual_classification_max(g, r);
  const auto m = risks::minimize_adversarial_risk(g, r);
  const auto ok = duality::certify_complementary_slackness(m.set, d, r);
  EXPECT_TRUE(ok.cond1_pass);
  EXPECT_TRUE(ok.cond2_pass);
  EXPECT_TRUE(ok.pass);
  const auto bad = duality::certify_complementary_slackness(ClassifierSet::empty(g), d, r);
  EXPECT_FALSE(bad.cond2_pass);
  EXPECT_GT(bad.pointwise_worst_eta, 0.5);
}

TEST(Certification, EqualSigmaLargeEpsTrivialSetsPass) {
  const auto g = equal_sigma();
  const EpsilonRadius r(1.5, *g);
  const auto d = duality::dual_classification_max(g, r);
  EXPECT_TRUE(duality::certify_complementary_slackness(ClassifierSet::empty(g), d, r).pass);
  EXPECT_TRUE(duality::certify_complementary_slackness(ClassifierSet::full(g), d, r).pass);
}

TEST(Certification, ConditionalRisk) {
  EXPECT_DOUBLE_EQ(duality::classification_conditional_risk(0.8, true), 1.0 - 0.8);
  EXPECT_DOUBLE_EQ(duality::classification_conditional_risk(0.8, false), 0.8);
}

TEST(Uniqueness, EqualSigmaRegimes) {
  const auto g = equal_sigma();
  {
    const EpsilonRadius r(0.5, *g);
    const auto d = duality::dual_classification_max(g, r);
    EXPECT_EQ(duality::check_uniqueness(d).verdict, duality::Uniqueness::unique);
    const auto x = duality::extremal_classifiers(d, r);
    EXPECT_EQ(x.a_min, x.a_max);
    ASSERT_EQ(x.a_min.interval_count(), 1u);
    EXPECT_NEAR(x.a_min.intervals()[0].a, 1.0, g->h());
    EXPECT_TRUE(x.cert_min.pass);
  }
  {
    const EpsilonRadius r(1.5, *g);
    const auto d = duality::dual_classification_max(g, r);
    const auto v = duality::check_uniqueness(d);
    EXPECT_EQ(v.verdict, duality::Uniqueness::not_unique);
    EXPECT_TRUE(v.cross_check_agrees);
    const auto x = duality::extremal_classifiers(d, r);
    EXPECT_EQ(x.a_min, ClassifierSet::empty(g));
    EXPECT_EQ(x.a_max, ClassifierSet::full(g));
    EXPECT_TRUE(x.cert_min.pass);
    EXPECT_TRUE(x.cert_max.pass);
    // Sandwich: the p0 terms of the extremal sets bracket those of any adversarial Bayes classifier.
    const auto m = risks::minimize_adversarial_risk(g, r);
    EXPECT_LE(v.p0_term_min, m.report.term_p0 + 1e-9);
    EXPECT_GE(v.p0_term_max, m.report.term_p0 - 1e-9);
  }
}

TEST(Uniqueness, UnequalSigmaAllEps) {
  const auto g = unequal_sigma();
  for (double eps : {0.25, 1.0, 2.0}) {
    const EpsilonRadius r(eps, *g);
    const auto d = duality::dual_classification_max(g, r);
    EXPECT_EQ(duality::check_uniqueness(d).verdict, duality::Uniqueness::unique) << eps;
    const auto x = duality::extremal_classifiers(d, r);
    EXPECT_TRUE(x.cert_min.pass) << eps;
    EXPECT_TRUE(x.cert_max.pass) << eps;
  }
}

TEST(Uniqueness, ToString) {
  EXPECT_STREQ(duality::to_string(duality::Uniqueness::not_unique), "not_unique");
  EXPECT_STREQ(duality::to_string(duality::Uniqueness::unique), "unique");
}

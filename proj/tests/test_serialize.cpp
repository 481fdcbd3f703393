#include <gtest/gtest.h>

#include <sstream>

#include "advrisk/conlab.hpp"
#include "json.hpp"

using namespace advrisk;
using json = nlohmann::json;
using grid::EpsilonRadius;

namespace {

grid::GridPtr small_grid() { return grid::from_gaussian_mixture(0.0, 1.0, 0.5, 2.0, 1.0, 0.5, 6.0, 0.05); }

}  // namespace

TEST(Serialize, RiskReportAndIntervals) {
  const auto g = small_grid();
  const EpsilonRadius r(0.5, *g);
  const auto m = risks::minimize_adversarial_risk(g, r);
  const auto j = json::parse(risks::to_json(m.report));
  EXPECT_DOUBLE_EQ(j["value"].get<double>(), m.report.value);
  EXPECT_DOUBLE_EQ(j["term_p1"].get<double>() + j["term_p0"].get<double>(), m.report.value);

  std::istringstream csv(risks::intervals_csv(m.set));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "first,last,a,b");
  std::getline(csv, line);
  std::size_t first = 0, last = 0;
  ASSERT_EQ(std::sscanf(line.c_str(), "%zu,%zu", &first, &last), 2);
  EXPECT_EQ(first, m.set.intervals()[0].first);
  EXPECT_NE(line.find(",inf"), std::string::npos);

  const auto inf = risks::RiskReport{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 0.0};
  EXPECT_EQ(json::parse(risks::to_json(inf))["value"], "inf");
}

TEST(Serialize, DualSolutionTriplets) {
  const auto g = small_grid();
  const EpsilonRadius r(0.5, *g);
  const auto d = duality::dual_classification_max(g, r);
  const auto j = json::parse(duality::to_json(d));
  EXPECT_EQ(j["objective_kind"], "classification");
  EXPECT_EQ(j["k"].get<std::size_t>(), r.k());
  EXPECT_EQ(j["m0_star"].size(), g->n());
  std::vector<double> col(g->n(), 0.0);
  for (const auto& t : j["gamma1"]["triplets"]) {
    const auto i = t[0].get<std::size_t>(), jj = t[1].get<std::size_t>();
    EXPECT_LE(i > jj ? i - jj : jj - i, r.k());
    col[jj] += t[2].get<double>();
  }
  for (std::size_t i = 0; i < g->n(); ++i) EXPECT_NEAR(col[i], d.m1_star[i], 1e-15);
  EXPECT_EQ(duality::to_json(d), duality::to_json(duality::dual_classification_max(g, r)));
}

TEST(Serialize, CertificationAndVerdict) {
  const auto g = small_grid();
  const EpsilonRadius r(1.5, *g);
  const auto d = duality::dual_classification_max(g, r);
  const auto c = json::parse(duality::to_json(duality::certify_complementary_slackness(risks::ClassifierSet::empty(g), d, r)));
  EXPECT_TRUE(c["pass"].get<bool>());
  EXPECT_TRUE(c["condition1"].contains("p1_gap"));
  EXPECT_TRUE(c["condition2"].contains("worst_weighted_deficit"));
  const auto v = json::parse(duality::to_json(duality::check_uniqueness(d)));
  EXPECT_EQ(v["verdict"], "not_unique");
}

TEST(Serialize, ConsistencyReportIsDeterministic) {
  const auto g = small_grid();
  const EpsilonRadius r(1.5, *g);
  const auto a = conlab::to_json(conlab::run_consistency_experiment(g, r, losses::Loss::hinge()));
  const auto b = conlab::to_json(conlab::run_consistency_experiment(g, r, losses::Loss::hinge()));
  EXPECT_EQ(a, b);
  const auto j = json::parse(a);
  EXPECT_EQ(j["verdict"], "inconsistency_witnessed");
  EXPECT_EQ(j["surrogate_trace"].size(), j["n_values"].size());
  EXPECT_EQ(j["adv_risk_trace"].size(), j["n_values"].size());
}

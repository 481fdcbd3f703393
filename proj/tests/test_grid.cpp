#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "advrisk/errors.hpp"
#include "advrisk/grid.hpp"
#include "oracles.hpp"

using namespace advrisk;
using namespace advrisk::grid;

TEST(Grid, CentersAndTotals) {
  const Grid g(-1.0, 0.5, {0.1, 0.2, 0.3, 0.4}, {0.4, 0.3, 0.2, 0.1});
  EXPECT_EQ(g.n(), 4u);
  EXPECT_DOUBLE_EQ(g.x(0), -0.75);
  EXPECT_DOUBLE_EQ(g.edge(4), 1.0);
  EXPECT_NEAR(g.total0(), 1.0, 1e-15);
  EXPECT_NEAR(g.total(), 2.0, 1e-15);
  EXPECT_THROW(Grid(0.0, 0.0, {1.0}, {1.0}), DomainError);
  EXPECT_THROW(Grid(0.0, 1.0, {1.0}, {1.0, 2.0}), DomainError);
  EXPECT_THROW(Grid(0.0, 1.0, {-1.0}, {1.0}), DomainError);
}

TEST(Grid, GaussianMixtureMassesMatchCdf) {
  const auto g = from_gaussian_mixture(-1.0, 1.0, 0.5, 1.0, 1.0, 0.5, 6.0, 0.01);
  // Midpoint rule: cell mass ~ density * h; compare cumulative mass up to x = 0.
  double c0 = 0.0;
  std::size_t i = 0;
  for (; g->edge(i + 1) <= 1e-12; ++i) c0 += g->m0()[i];
  EXPECT_NEAR(g->edge(i), 0.0, 1e-9);
  EXPECT_NEAR(c0, 0.5 * oracle::normal_cdf(1.0), 1e-5);
  EXPECT_NEAR(g->total(), 1.0, 1e-6);
  EXPECT_GT(g->truncated_mass(), 0.0);
  EXPECT_LT(g->truncated_mass(), 1e-6);
  EXPECT_THROW(from_gaussian_mixture(-1.0, 1.0, 0.5, 1.0, 1.0, 0.5, 2.0, 0.01), DomainError);
}

TEST(EpsilonRadius, Snapping) {
  const Grid g(0.0, 0.01, std::vector<double>(10, 0.1), std::vector<double>(10, 0.1));
  const EpsilonRadius r(0.5, g);
  EXPECT_EQ(r.k(), 50u);
  EXPECT_DOUBLE_EQ(r.snapped(), 0.5);
  EXPECT_EQ(EpsilonRadius(0.014, g).k(), 1u);
  EXPECT_EQ(EpsilonRadius(0.0, g).k(), 0u);
  EXPECT_TRUE(r.matches(g));
  const Grid g2(0.0, 0.02, {1.0}, {1.0});
  EXPECT_FALSE(r.matches(g2));
  EXPECT_THROW(EpsilonRadius(-0.1, g), DomainError);
}

TEST(SlidingWindow, SpecExampleAndEnds) {
  const std::vector<double> v{0, 1, 0, 0, 0};
  EXPECT_EQ(sliding_max(v, 1), (std::vector<double>{1, 1, 1, 0, 0}));
  EXPECT_EQ(sliding_min(std::vector<double>{1, 0, 1, 1, 1}, 1), (std::vector<double>{0, 0, 0, 1, 1}));
  EXPECT_EQ(sliding_max(v, 0), v);
  EXPECT_EQ(sliding_max(v, 100), std::vector<double>(5, 1.0));
  EXPECT_TRUE(sliding_max({}, 3).empty());
}

TEST(SlidingWindow, MatchesBruteForceAndDuality) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const double inf = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 40, k = rng() % 8;
    std::vector<double> v(n);
    for (auto& x : v) {
      const auto r = rng() % 20;
      x = r == 0 ? inf : r == 1 ? -inf : u(rng);
    }
    EXPECT_EQ(sliding_max(v, k), oracle::window_max(v, k));
    std::vector<double> neg(n);
    for (std::size_t i = 0; i < n; ++i) neg[i] = -v[i];
    auto mn = sliding_min(neg, k);
    for (auto& x : mn) x = -x;
    EXPECT_EQ(mn, sliding_max(v, k));
  }
}

TEST(SlidingWindow, GridFunctionWrappers) {
  auto g = std::make_shared<const Grid>(0.0, 1.0, std::vector<double>(5, 0.1), std::vector<double>(5, 0.1));
  const GridFunction f(g, {0, 1, 0, 0, 0});
  const auto s = sup_window(f, EpsilonRadius::cells(1, *g));
  EXPECT_EQ(s.values(), (std::vector<double>{1, 1, 1, 0, 0}));
  const auto i = inf_window(f, EpsilonRadius::cells(1, *g));
  EXPECT_EQ(i.values(), (std::vector<double>{0, 0, 0, 0, 0}));
  auto other = std::make_shared<const Grid>(0.0, 2.0, std::vector<double>(5, 0.1), std::vector<double>(5, 0.1));
  EXPECT_THROW(sup_window(f, EpsilonRadius::cells(1, *other)), DomainError);
  EXPECT_THROW(GridFunction(g, std::vector<double>{1, 2}), DomainError);
  EXPECT_THROW(GridFunction(g, std::vector<double>{0, 0, std::nan(""), 0, 0}), DomainError);
}

TEST(Posterior, ZeroMassCells) {
  auto g = std::make_shared<const Grid>(0.0, 1.0, std::vector<double>{1, 0, 0, 3}, std::vector<double>{1, 0, 2, 1});
  const auto p = posterior(g);
  EXPECT_DOUBLE_EQ(p.eta[0], 0.5);
  EXPECT_DOUBLE_EQ(p.eta[2], 1.0);
  EXPECT_DOUBLE_EQ(p.eta[3], 0.25);
  EXPECT_TRUE(p.zero_mass[1]);
  EXPECT_FALSE(p.zero_mass[0]);
}

TEST(GridIo, CsvAndJsonRoundTrip) {
  const auto g = from_gaussian_mixture(-1.0, 1.0, 0.5, 1.0, 1.4, 0.5, 6.0, 0.05);
  const auto path = std::filesystem::temp_directory_path() / "advrisk_grid_roundtrip.csv";
  write_csv(*g, path);
  const auto back = read_csv(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back->n(), g->n());
  EXPECT_EQ(back->x0(), g->x0());
  EXPECT_EQ(back->h(), g->h());
  EXPECT_EQ(back->m0(), g->m0());
  EXPECT_EQ(back->m1(), g->m1());

  const auto j = grid_from_json(to_json(*g));
  EXPECT_EQ(j->m0(), g->m0());
  EXPECT_EQ(j->m1(), g->m1());
  EXPECT_EQ(j->h(), g->h());
  EXPECT_EQ(to_json(*j), to_json(*g));
  EXPECT_THROW(grid_from_json("{\"x0\": 0}"), DomainError);
}

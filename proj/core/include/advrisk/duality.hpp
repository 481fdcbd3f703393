#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "advrisk/grid.hpp"
#include "advrisk/losses.hpp"
#include "advrisk/risks.hpp"

namespace advrisk::duality {

/// Transport plan from source cells i to target cells j, stored densely on the band |i - j| <= k.
class Coupling {
 public:
  Coupling() = default;
  Coupling(std::size_t n, std::size_t k, int source);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  int source() const { return source_; }

  bool in_band(std::size_t i, std::size_t j) const { return (i > j ? i - j : j - i) <= k_; }
  double operator()(std::size_t i, std::size_t j) const { return in_band(i, j) ? band_[slot(i, j)] : 0.0; }
  double& at(std::size_t i, std::size_t j);

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;

  struct Entry {
    std::size_t i;
    std::size_t j;
    double w;
  };
  std::vector<Entry> nonzeros() const;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const { return i * (2 * k_ + 1) + (j + k_ - i); }
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  int source_ = 0;
  std::vector<double> band_;
};

enum class ObjectiveKind { classification, surrogate };

struct DualSolution {
  grid::GridPtr grid;
  grid::EpsilonRadius radius;
  std::vector<double> m0_star;
  std::vector<double> m1_star;
  Coupling gamma0;
  Coupling gamma1;
  grid::GridFunction eta_star;
  std::vector<std::uint8_t> zero_mass;  // cells with m0* + m1* = 0
  double value = 0.0;
  ObjectiveKind objective_kind = ObjectiveKind::classification;
  std::string loss_name;  // surrogate duals only
};

/// Maximum of sum_j min(m0*_j, m1*_j) over the W-infinity balls, computed by a
/// greedy band matching. Used as an independent check of dual_classification_max.
double band_matching_value(const grid::Grid& grid, std::size_t k);

/// Exact maximizer of the classification dual.
///
/// The returned solution is the taut-string path through the cumulative-mass
/// corridor, which maximizes sum_j (m0*_j + m1*_j) C*(eta*_j) for every concave C*
/// at once and carries the least mass at eta* = 1/2 among optimal solutions.
/// Its value is checked against band_matching_value within solver_tol.
DualSolution dual_classification_max(const grid::GridPtr& grid, const grid::EpsilonRadius& r, double solver_tol = 1e-9,
                                     double budget = 5e8);

double dual_surrogate_value(const DualSolution& dual, const losses::Loss& loss);

struct AscentResult {
  DualSolution dual;
  std::vector<double> trace;  // best objective so far, per iteration
  bool stalled = false;
  int iterations = 0;
};

/// Projected supergradient ascent on sum_j (m0*_j + m1*_j) C_phi*(eta*_j) over band couplings,
/// started from the plan spreading each cell evenly over its window. Returns the best iterate.
AscentResult dual_surrogate_ascent(const grid::GridPtr& grid, const grid::EpsilonRadius& r, const losses::Loss& loss, int iters = 2000,
                                   double step = 0.5, double stall_tol = 1e-12, int stall_window = 200);

struct CertReport {
  double p1_gap = 0.0;  // int S_eps(1_{A^C}) dP1 - P1*(A^C)
  double p0_gap = 0.0;  // int S_eps(1_A) dP0 - P0*(A)
  bool cond1_pass = false;
  double pointwise_worst = 0.0;  // max over charged cells of (m0*+m1*) (C(eta*,1_A) - C*(eta*))
  std::size_t pointwise_cell = 0;
  double pointwise_worst_eta = 0.5;
  std::size_t cells_checked = 0;
  bool cond2_pass = false;
  bool pass = false;
  double tol = 0.0;
};

/// C(eta, b) = eta (1 - b) + (1 - eta) b: the cost of labelling a point b given P(Y=1) = eta.
double classification_conditional_risk(double eta, bool in_a);

CertReport certify_complementary_slackness(const risks::ClassifierSet& set, const DualSolution& dual, const grid::EpsilonRadius& r,
                                           double tol = 1e-9);

enum class Uniqueness { unique, not_unique, ambiguous };

const char* to_string(Uniqueness u);

struct Extremal {
  risks::ClassifierSet a_min;
  risks::ClassifierSet a_max;
  grid::GridFunction eta_hat;
  CertReport cert_min;
  CertReport cert_max;
  std::size_t extended_cells = 0;  // zero-mass cells whose eta_hat came from the extension rule
};

/// A_min = {eta_hat > 1/2 + half_tol}, A_max = {eta_hat >= 1/2 - half_tol}, both certified.
/// Off the support of P*, eta_hat is 1/2 where both sides are within eps, else the nearest supported eta*.
Extremal extremal_classifiers(const DualSolution& dual, const grid::EpsilonRadius& r, double half_tol = 1e-6, double cert_tol = 1e-9);

struct UniquenessVerdict {
  Uniqueness verdict = Uniqueness::ambiguous;
  double mass_at_half = 0.0;
  double half_tol = 0.0;
  double mass_tol = 0.0;
  double p0_term_min = 0.0;  // int S_eps(1_{A_min}) dP0
  double p0_term_max = 0.0;
  bool cross_check_agrees = false;
};

/// mass_tol < 0 selects 1e-4 of the total mass.
UniquenessVerdict check_uniqueness(const DualSolution& dual, double half_tol = 1e-6, double mass_tol = -1.0);

// JSON encodings (vectors plus sparse band triplets).
std::string to_json(const DualSolution& dual);
std::string to_json(const CertReport& cert);
std::string to_json(const UniquenessVerdict& v);

}  // namespace advrisk::duality

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "advrisk/grid.hpp"
#include "advrisk/losses.hpp"

namespace advrisk::risks {

/// A closed cell run [first, last]; a/b are its real endpoints, +-inf at the grid ends.
struct Interval {
  double a;
  double b;
  std::size_t first;
  std::size_t last;
};

/// A classifier A as a cell mask on a grid. Intervals are derived from the mask.
class ClassifierSet {
 public:
  ClassifierSet(grid::GridPtr grid, std::vector<std::uint8_t> mask);

  static ClassifierSet empty(grid::GridPtr grid);
  static ClassifierSet full(grid::GridPtr grid);
  /// Cells whose centers lie in one of the closed intervals [a, b].
  static ClassifierSet from_intervals(grid::GridPtr grid, const std::vector<std::pair<double, double>>& intervals);
  /// The set {f > 0}; f = 0 goes to class -1.
  static ClassifierSet positive_part(const grid::GridFunction& f);

  const grid::Grid& grid() const { return *grid_; }
  const grid::GridPtr& grid_ptr() const { return grid_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  bool contains(std::size_t i) const { return mask_[i] != 0; }

  std::vector<Interval> intervals() const;
  std::size_t interval_count() const { return intervals().size(); }
  /// Consecutive finite boundary points more than 2*eps apart.
  bool separated(const grid::EpsilonRadius& r) const;

  friend bool operator==(const ClassifierSet& a, const ClassifierSet& b) { return a.mask_ == b.mask_; }

 private:
  grid::GridPtr grid_;
  std::vector<std::uint8_t> mask_;
};

struct RiskReport {
  double value = 0.0;
  double term_p1 = 0.0;
  double term_p0 = 0.0;
};

RiskReport risk(const ClassifierSet& set);
RiskReport adversarial_risk(const ClassifierSet& set, const grid::EpsilonRadius& r);

// Zero-mass cells never contribute, even where phi is infinite.
RiskReport surrogate_risk(const grid::GridFunction& f, const losses::Loss& loss);
RiskReport adversarial_surrogate_risk(const grid::GridFunction& f, const losses::Loss& loss, const grid::EpsilonRadius& r);

/// Secondary key among sets of equal adversarial risk.
enum class TieBreak { fewest_intervals, min_p0_term, max_p0_term };

struct DpOptions {
  TieBreak tie_break = TieBreak::fewest_intervals;
  /// Upper bound on n*n, the number of run transitions examined.
  double budget = 5e8;
};

struct Minimizer {
  ClassifierSet set;
  RiskReport report;
};

Minimizer minimize_adversarial_risk(const grid::GridPtr& grid, const grid::EpsilonRadius& r, const DpOptions& opts = {});

std::string to_json(const RiskReport& report);
/// Interval list as CSV rows "first,last,a,b" (cell indices and real endpoints).
std::string intervals_csv(const ClassifierSet& set);

}  // namespace advrisk::risks

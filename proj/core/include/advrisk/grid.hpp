#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace advrisk::grid {

/// Uniform 1-D grid with cell centers x0 + (i + 1/2) h and per-cell masses of P0 and P1.
class Grid {
 public:
  Grid(double x0, double h, std::vector<double> m0, std::vector<double> m1, double truncated_mass = 0.0);

  double x0() const { return x0_; }
  double h() const { return h_; }
  std::size_t n() const { return m0_.size(); }
  double x(std::size_t i) const { return x0_ + (static_cast<double>(i) + 0.5) * h_; }
  /// Left edge of cell i (i == n gives the right end of the domain).
  double edge(std::size_t i) const { return x0_ + static_cast<double>(i) * h_; }

  const std::vector<double>& m0() const { return m0_; }
  const std::vector<double>& m1() const { return m1_; }
  double total0() const { return total0_; }
  double total1() const { return total1_; }
  double total() const { return total0_ + total1_; }

  // Tail mass dropped by truncation when built from a Gaussian mixture (0 otherwise).
  double truncated_mass() const { return truncated_; }

 private:
  double x0_;
  double h_;
  std::vector<double> m0_;
  std::vector<double> m1_;
  double total0_ = 0.0;
  double total1_ = 0.0;
  double truncated_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

std::shared_ptr<const Grid> from_gaussian_mixture(double mu0, double sigma0, double w0, double mu1, double sigma1, double w1,
                                                  double span_sigmas, double h);

/// Extended-real samples on a grid; +-inf are stored as IEEE infinities.
class GridFunction {
 public:
  GridFunction(GridPtr grid, std::vector<double> values);
  GridFunction(GridPtr grid, double fill);

  const GridPtr& grid_ptr() const { return grid_; }
  const Grid& grid() const { return *grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// eps snapped to k = round(eps / h) cells.
class EpsilonRadius {
 public:
  EpsilonRadius(double eps, const Grid& grid);
  static EpsilonRadius cells(std::size_t k, const Grid& grid);

  double eps() const { return eps_; }
  std::size_t k() const { return k_; }
  double h() const { return h_; }
  double snapped() const { return static_cast<double>(k_) * h_; }
  bool matches(const Grid& g) const { return g.h() == h_; }

 private:
  EpsilonRadius(double eps, std::size_t k, double h) : eps_(eps), k_(k), h_(h) {}
  double eps_;
  std::size_t k_;
  double h_;
};

// Raw sliding-window kernels; truncated windows at the ends.
std::vector<double> sliding_max(const std::vector<double>& v, std::size_t k);
std::vector<double> sliding_min(const std::vector<double>& v, std::size_t k);

GridFunction sup_window(const GridFunction& f, const EpsilonRadius& r);
GridFunction inf_window(const GridFunction& f, const EpsilonRadius& r);

struct Posterior {
  GridFunction eta;
  std::vector<bool> zero_mass;
};

Posterior posterior(const GridPtr& grid);

void write_csv(const Grid& grid, const std::filesystem::path& path);
GridPtr read_csv(const std::filesystem::path& path);
std::string to_json(const Grid& grid);
GridPtr grid_from_json(const std::string& text);

}  // namespace advrisk::grid

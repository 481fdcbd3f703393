#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "advrisk/extended_real.hpp"

namespace advrisk::losses {

enum class LossKind { hinge, squared_hinge, exponential, sigmoid, rho_margin, zero_one_indicator, custom };

/// A margin loss phi: non-increasing, continuous on R, phi(+inf) = 0.
///
/// Built-ins are evaluated in closed form. Custom losses are monotone tables
/// (alpha_i, phi_i) interpolated linearly and clamped to the end values
/// outside the table; the last value must be 0.
class Loss {
 public:
  static Loss hinge();
  static Loss squared_hinge();
  static Loss exponential();
  static Loss sigmoid();
  static Loss rho_margin(double rho);
  static Loss zero_one_indicator();
  static Loss custom(std::vector<double> alpha, std::vector<double> value, std::string name = "custom");

  /// Registry lookup: "hinge", "squared_hinge", "exponential", "sigmoid",
  /// "rho_margin:<rho>", "zero_one", or "custom:<path to csv>".
  static Loss from_name(std::string_view spec);
  static Loss from_csv(const std::filesystem::path& path, std::string name = "custom");

  LossKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double rho() const { return rho_; }
  bool convex() const { return convex_; }

  double operator()(double alpha) const;
  double operator()(ExtendedReal alpha) const { return (*this)(alpha.value()); }

  /// phi(-inf); +inf for the unbounded built-ins.
  double sup_value() const;

  const std::vector<double>& table_alpha() const { return alpha_; }
  const std::vector<double>& table_value() const { return value_; }

 private:
  Loss(LossKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  LossKind kind_;
  std::string name_;
  double rho_ = 1.0;
  bool convex_ = false;
  std::vector<double> alpha_;
  std::vector<double> value_;
};

struct ConditionalRiskProfile {
  double eta = 0.0;
  double c_star = 0.0;
  ExtendedReal alpha_min;
  ExtendedReal minimizer_set_lo;
  ExtendedReal minimizer_set_hi;
};

/// eta*phi(alpha) + (1-eta)*phi(-alpha), with 0 * inf = 0.
double conditional_risk(const Loss& loss, double eta, ExtendedReal alpha);
double conditional_risk(const Loss& loss, double eta, double alpha);

ConditionalRiskProfile optimal_conditional_risk(const Loss& loss, double eta, double tol = 1e-9);

/// C_phi*(eta) alone; closed form for built-ins.
double optimal_conditional_risk_value(const Loss& loss, double eta);

ExtendedReal smallest_minimizer(const Loss& loss, double eta);
std::vector<ExtendedReal> smallest_minimizer_map(const Loss& loss, const std::vector<double>& etas);

struct ModifiedMinimizer {
  ExtendedReal value;
  bool premise_holds = true;  // loss consistent and C_phi*(1/2) = phi(0)
};

ModifiedMinimizer modified_minimizer_map(const Loss& loss, double eta, double tol = 1e-9);

// Throws UndecidableError for custom non-convex losses.
bool is_consistent(const Loss& loss, double tol = 1e-6);

bool is_adversarially_consistent_universal(const Loss& loss, double tol = 1e-9);

/// True when C_phi*(1/2) = phi(0) within tol.
bool half_risk_equals_phi0(const Loss& loss, double tol = 1e-9);

struct UniformGap {
  double alpha_r = 0.0;
  double k_r = 0.0;
};

UniformGap uniform_gap(const Loss& loss, double r, double tol = 1e-9);

}  // namespace advrisk::losses

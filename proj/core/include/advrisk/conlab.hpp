#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advrisk/duality.hpp"
#include "advrisk/grid.hpp"
#include "advrisk/losses.hpp"
#include "advrisk/risks.hpp"

namespace advrisk::conlab {

/// Cellwise alpha_phi(eta_hat).
grid::GridFunction optimal_surrogate_function(const grid::GridFunction& eta_hat, const losses::Loss& loss);

/// Cellwise alpha~_phi(eta_hat): 0 where |eta_hat - 1/2| <= half_tol. Throws DomainError
/// unless the loss is consistent with C_phi*(1/2) = phi(0).
grid::GridFunction modified_optimal_function(const grid::GridFunction& eta_hat, const losses::Loss& loss, double half_tol = 1e-6);

struct SequenceSpec {
  grid::GridFunction base_eta_hat;
  risks::ClassifierSet tilde_set;
  std::vector<int> n_values;
  std::vector<double> threshold_N;
  double half_tol = 1e-6;
  double mass_tol = -1.0;  // < 0: 1e-4 of total mass
};

std::vector<int> default_n_values();       // 1, 2, 4, ..., 1024
std::vector<double> default_threshold_N();  // 1, 2, 4, ..., 64

/// A_min plus the zero-set cell nearest the middle of {|eta_hat - 1/2| <= half_tol}.
risks::ClassifierSet default_tilde_set(const grid::GridFunction& eta_hat, double half_tol = 1e-6);

/// f_n = alpha~(eta_hat) off the zero set, +1/n on its part inside A~, -1/n elsewhere on it.
std::vector<grid::GridFunction> inconsistency_sequence(const SequenceSpec& spec, const losses::Loss& loss);

grid::GridFunction threshold_function(const grid::GridFunction& f, double N);

struct DiagnosticsReport {
  double pointwise = 0.0;  // int C_phi(eta*, f) dP* - int C_phi*(eta*) dP*
  double window_p1 = 0.0;  // int S_eps(phi o f) dP1 - int phi o f dP1*
  double window_p0 = 0.0;  // int S_eps(phi o -f) dP0 - int phi o -f dP0*
  bool one_sided_ok = false;
  double tol = 0.0;
  double total() const { return pointwise + window_p1 + window_p0; }
};

DiagnosticsReport slackness_diagnostics(const grid::GridFunction& f, const duality::DualSolution& dual, const losses::Loss& loss,
                                        const grid::EpsilonRadius& r, double tol = 1e-9);

enum class Verdict { consistent_behavior, inconsistency_witnessed, ambiguous };

const char* to_string(Verdict v);

struct ExperimentConfig {
  double half_tol = 1e-6;
  double mass_tol = -1.0;
  double solver_tol = 1e-9;
  std::vector<int> n_values = default_n_values();
  std::vector<double> threshold_N = default_threshold_N();
  /// Witness: final surrogate gap at most this fraction of total mass ...
  double witness_surrogate_tol = 1e-3;
  /// ... while every R^eps(f_n) exceeds the adversarial Bayes risk by this fraction of total mass.
  double witness_gap_min = 1e-2;
  /// Unique branch: R^eps of the last near-minimizer within this many h (times total mass) of the optimum.
  double convergence_h_multiple = 4.0;
  std::uint64_t seed = 0;
  std::optional<risks::ClassifierSet> tilde_set;
};

struct ConsistencyReport {
  std::string loss;
  double eps = 0.0;
  std::size_t k = 0;
  double h = 0.0;
  double total_mass = 0.0;
  std::string branch;  // "near_minimizers" or "witness"
  std::vector<int> n_values;
  std::vector<double> surrogate_trace;
  std::vector<double> adv_risk_trace;
  std::vector<DiagnosticsReport> diagnostics;
  std::vector<double> threshold_N;
  std::vector<double> threshold_trace;  // R_phi^eps of the clamped minimizer
  double minimizer_surrogate = 0.0;     // R_phi^eps of the unclamped minimizer
  double dual_value = 0.0;              // surrogate dual at the distinguished solution
  double classification_dual_value = 0.0;
  double bayes_adv_risk = 0.0;
  duality::UniquenessVerdict uniqueness;
  bool universal = false;       // C_phi*(1/2) < phi(0)
  bool premise_half = false;    // consistent and C_phi*(1/2) = phi(0)
  bool modified_matches_optimal = true;
  Verdict verdict = Verdict::ambiguous;
  std::string note;
};

ConsistencyReport run_consistency_experiment(const grid::GridPtr& grid, const grid::EpsilonRadius& r, const losses::Loss& loss,
                                             const ExperimentConfig& cfg = {});

std::string to_json(const ConsistencyReport& report);

}  // namespace advrisk::conlab

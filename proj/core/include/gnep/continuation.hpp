#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "gnep/master_vi.hpp"

namespace gnep {

/// Geometric penalty schedule tau_k = tau0 * rho^k, k = 0..k_max.
struct TauSchedule {
  double tau0 = 1.0;
  double rho = 10.0;
  int k_max = 5;

  double tau(int k) const;
  void validate() const;
};

struct ContinuationConfig {
  TauSchedule schedule;
  MasterConfig master;
  double eps_feas = 1e-6;
  double eps_eq = 1e-4;
};

struct StageRecord {
  int k = 0;
  double tau = 0.0;
  MasterResult master;
  double penalty = 0.0;  // P(w(tau_k))
  Vector joint_residual;
  MultiplierEstimate multipliers;
};

enum class GnepStatus { kConverged, kBudgetExhausted, kInnerFailure };

std::string_view to_string(GnepStatus status);

struct GnepReport {
  std::vector<StageRecord> stages;
  Vector x;
  ShareMatrix u;
  Vector lambda_hat;
  GnepStatus status = GnepStatus::kBudgetExhausted;
};

/// Penalty continuation: solves the penalized problem for each tau_k, warm
/// starting shares and profile from the previous stage, and stops early once
/// the penalty P <= eps_feas, the multiplier spread <= eps_eq and the master
/// residual <= tol_u all hold. Default shares split b evenly.
GnepReport solve_gnep(const Game& game, const PenaltyFunction& phi,
                      const ShareSet& set, const ContinuationConfig& cfg,
                      const std::optional<ShareMatrix>& u0 = std::nullopt);

/// (tau_k, P(w(tau_k))) per stage.
std::vector<std::pair<double, double>> feasibility_trace(
    const GnepReport& report);

}  // namespace gnep

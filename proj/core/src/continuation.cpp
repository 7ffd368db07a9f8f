#include "gnep/continuation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gnep/error.hpp"

namespace gnep {

double TauSchedule::tau(int k) const { return tau0 * std::pow(rho, k); }

void TauSchedule::validate() const {
  if (!(tau0 > 0.0)) throw ConfigError("schedule.tau0 must be positive");
  if (!(rho > 1.0)) throw ConfigError("schedule.rho must exceed 1");
  if (k_max < 0) throw ConfigError("schedule.k_max must be >= 0");
}

std::string_view to_string(GnepStatus status) {
  switch (status) {
    case GnepStatus::kConverged:
      return "converged";
    case GnepStatus::kBudgetExhausted:
      return "budget-exhausted";
    case GnepStatus::kInnerFailure:
      return "inner-failure";
  }
  return "unknown";
}

GnepReport solve_gnep(const Game& game, const PenaltyFunction& phi,
                      const ShareSet& set, const ContinuationConfig& cfg,
                      const std::optional<ShareMatrix>& u0) {
  cfg.schedule.validate();
  cfg.master.validate(phi.cocoercivity());
  if (set.b.size() != game.num_joint()) {
    throw DimensionError("solve_gnep: share set does not match joint.m");
  }

  const int l = game.num_players();
  ShareMatrix u = u0 ? *u0
                     : ShareMatrix(set.b.transpose().replicate(l, 1) /
                                   static_cast<double>(l));
  Vector x = project_X(game, Vector::Zero(game.dim()));

  GnepReport report;
  report.status = GnepStatus::kBudgetExhausted;
  for (int k = 0; k <= cfg.schedule.k_max; ++k) {
    StageRecord stage;
    stage.k = k;
    stage.tau = cfg.schedule.tau(k);
    stage.master =
        solve_master(game, phi, stage.tau, set, u, x, cfg.master);
    const MasterResult& mr = stage.master;
    stage.penalty = penalty_total(game, phi, mr.x, mr.u);
    stage.joint_residual = joint_residual(game, mr.x);
    stage.multipliers = recover_multipliers(stage.tau, mr.g);

    spdlog::info(
        "{}: stage {} tau={:.3g} master_iters={} nep_iters={} P={:.3e} "
        "spread={:.3e} residual_u={:.3e}",
        game.name(), k, stage.tau, mr.iters, mr.total_nep_iters, stage.penalty,
        stage.multipliers.spread, mr.residual_u);

    // Warm start for the next stage. Solutions of the penalized problem move
    // smoothly in 1/tau once the active pattern settles, so with two stages
    // available extrapolate linearly in 1/tau; for a geometric schedule the
    // step ratio is (1/tau_{k+1} - 1/tau_k) / (1/tau_k - 1/tau_{k-1}) = 1/rho.
    if (!report.stages.empty()) {
      const MasterResult& prev = report.stages.back().master;
      const double ratio = 1.0 / cfg.schedule.rho;
      u = project_U(mr.u + ratio * (mr.u - prev.u), set);
      x = project_X(game, mr.x + ratio * (mr.x - prev.x));
    } else {
      u = mr.u;
      x = mr.x;
    }
    const MasterStatus status = mr.status;
    const bool done = mr.converged() && stage.penalty <= cfg.eps_feas &&
                      stage.multipliers.spread <= cfg.eps_eq;
    report.stages.push_back(std::move(stage));

    if (status == MasterStatus::kInnerFailure) {
      spdlog::warn("{}: {}", game.name(), report.stages.back().master.diagnostics);
      report.status = GnepStatus::kInnerFailure;
      break;
    }
    if (done) {
      report.status = GnepStatus::kConverged;
      break;
    }
  }

  // A failed stage stays in the trace, but the reported point comes from the
  // last stage whose inner solves all converged.
  auto last_it = std::find_if(
      report.stages.rbegin(), report.stages.rend(), [](const StageRecord& s) {
        return s.master.status != MasterStatus::kInnerFailure;
      });
  const StageRecord& last =
      last_it != report.stages.rend() ? *last_it : report.stages.back();
  report.x = last.master.x;
  report.u = last.master.u;
  report.lambda_hat = last.multipliers.shared;
  return report;
}

std::vector<std::pair<double, double>> feasibility_trace(
    const GnepReport& report) {
  std::vector<std::pair<double, double>> trace;
  trace.reserve(report.stages.size());
  for (const StageRecord& s : report.stages) trace.emplace_back(s.tau, s.penalty);
  return trace;
}

}  // namespace gnep

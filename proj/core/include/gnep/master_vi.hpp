#pragma once

#include <string>

#include "gnep/nep_solver.hpp"

namespace gnep {

/// Optional restrictions U_0 on the shares on top of sum_i u_i = b.
struct ShareFlags {
  bool nonneg = false;  // u_i >= 0
  bool cap = false;     // u_i <= b
};

struct ShareSet {
  Vector b;
  ShareFlags flags;
};

struct MasterConfig {
  double lambda = 1.0;  // fixed projection step, must lie in (0, 2 gamma)
  double tol_u = 1e-8;
  int max_iter = 500000;
  NepConfig nep;

  void validate(double gamma) const;
};

enum class MasterStatus { kConverged, kMaxIter, kInnerFailure };

struct MasterResult {
  ShareMatrix u;
  Vector x;  // x(u) used for the final g
  double residual_u = 0.0;
  Matrix g;
  int iters = 0;
  long total_nep_iters = 0;
  MasterStatus status = MasterStatus::kMaxIter;
  std::string diagnostics;

  bool converged() const { return status == MasterStatus::kConverged; }
};

/// Euclidean projection onto U = {u : sum_i u_i = b} intersected with the
/// optional sign/cap restrictions, applied column by column. Throws
/// InfeasibleSetError when a restricted column has b_t < 0.
ShareMatrix project_U(const ShareMatrix& raw, const ShareSet& set);

/// Natural residual ||u - Proj_U(u - lambda g)||_F.
double share_residual(const ShareMatrix& u, const Matrix& g, double lambda,
                      const ShareSet& set);

/// Fixed-step projection method u <- Proj_U(u - lambda g(u)) for the master
/// variational inequality <g(u*), u - u*> >= 0 on U. Each g evaluation
/// solves the penalized Nash problem at the current shares, warm-started
/// from the previous profile. `x0` seeds the first inner solve.
MasterResult solve_master(const Game& game, const PenaltyFunction& phi,
                          double tau, const ShareSet& set,
                          const ShareMatrix& u0, const Vector& x0,
                          const MasterConfig& cfg);

/// Natural residual of the master problem at u, with the inner Nash problem
/// solved from x0. Throws SolveError if that solve does not converge.
double master_residual(const Game& game, const PenaltyFunction& phi,
                       double tau, const ShareSet& set, const ShareMatrix& u,
                       const Vector& x0, const MasterConfig& cfg);

struct MultiplierEstimate {
  Matrix per_player;  // -tau g_i, l x m
  Vector shared;      // componentwise max over players
  double spread = 0.0;
};

/// Multiplier estimates v_i = tau phi'(h_i(x_i) - u_i) = -tau g_i. A small
/// spread across players certifies a normalized (shared-multiplier)
/// equilibrium.
MultiplierEstimate recover_multipliers(double tau, const Matrix& g);

}  // namespace gnep

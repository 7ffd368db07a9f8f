#pragma once

#include <vector>

#include "gnep/penalty.hpp"

namespace gnep {

struct NepConfig {
  double tol = 1e-9;
  double tol_unit = 1e-7;  // bound on the residual at unit step, via r_beta / beta
  int max_iter = 50000;
  double step0 = 1.0;
  double backtrack = 0.5;  // step shrink factor in (0, 1)
  double theta = 0.9;      // acceptance: beta ||F(y) - F(x)|| <= theta ||y - x||

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct NepResult {
  Vector x;
  double residual = 0.0;
  double step = 0.0;  // step used for the reported residual
  int iters = 0;
  bool converged = false;
};

/// The penalized pseudo-gradient
///   F~(x) = F(x) + tau * (J_{h_i}(x_i)^T phi'(h_i(x_i) - u_i))_i
/// i.e. F~_i = -grad_{x_i} (f_i - tau P_i). Holds references; the game,
/// penalty and shares must outlive it.
class PenalizedMap {
 public:
  PenalizedMap(const Game& game, const PenaltyFunction& phi, double tau,
               const ShareMatrix& u);

  void evaluate(const Vector& x, Vector& out) const;
  Vector operator()(const Vector& x) const;

 private:
  const Game& game_;
  const PenaltyFunction& phi_;
  double tau_;
  const ShareMatrix& u_;
  Matrix jac_F_;
  Vector shift_;
  // Affine constraints: v_i = A_i x_i + (a_i - u_i), precomputed per player.
  bool affine_;
  std::vector<Vector> offset_;
  mutable Vector v_;
  mutable Vector dphi_;
};

Vector penalized_map(const Game& game, const PenaltyFunction& phi, double tau,
                     const ShareMatrix& u, const Vector& x);

/// Natural residual ||x - Proj_X(x - beta F~(x))||_2.
double nep_residual(const Game& game, const PenaltyFunction& phi, double tau,
                    const ShareMatrix& u, const Vector& x, double beta);

/// Solves the penalized Nash problem with utilities f_i - tau P_i(., u_i)
/// over X by the extragradient method with backtracking on the step.
/// `x0` is projected onto X first. Non-convergence is reported through
/// `NepResult::converged`, never thrown.
NepResult solve_nep(const Game& game, const PenaltyFunction& phi, double tau,
                    const ShareMatrix& u, const Vector& x0,
                    const NepConfig& cfg);

}  // namespace gnep

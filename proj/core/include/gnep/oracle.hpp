#pragma once

#include <vector>

#include "gnep/error.hpp"
#include "gnep/game.hpp"

namespace gnep {

/// Size limits for exhaustive active-set enumeration.
struct OracleBudget {
  int max_dim = 12;
  int max_joint = 4;
};

/// Normalized equilibrium of a quadratic game with affine joint
/// constraints: the profile x*, the multiplier lambda* shared by all players
/// and the active sets that certify it.
struct GroundTruth {
  Vector x_star;
  Vector lambda_star;
  std::vector<int> active_joint;
  std::vector<std::vector<int>> active_lower;  // per player, local indices
  std::vector<std::vector<int>> active_upper;
  double certificate_residual = 0.0;
  long candidates = 0;  // active-set combinations examined
};

class OracleError : public Error {
 public:
  enum class Kind { kNoCandidate, kNonUnique };
  OracleError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr double kEpsKkt = 1e-10;

/// Enumerates every combination of active joint constraints and box-bound
/// states, solves the linear KKT system of each and keeps the candidates that
/// pass feasibility, sign and complementarity checks within eps_kkt.
///
/// Throws BudgetError when n or m exceed the budget, ConfigError for
/// non-affine joint constraints, and OracleError when no candidate survives
/// or two distinct candidates (or a continuum) do.
GroundTruth oracle_solve(const Game& game, double eps_kkt = kEpsKkt,
                         const OracleBudget& budget = {});

struct GneCheck {
  Vector violation;  // per player: f_i(best response) - f_i(x)
  bool ok = false;   // all entries <= tol
};

/// Per player, maximizes f_i(x_{-i}, .) over X_i intersected with the share
/// of the joint constraints left by the other players, and reports the gain
/// over the current strategy. The right-hand side is widened by the joint
/// residual [sum_i h_i(x_i) - b]_+ of x itself, so a slightly infeasible
/// point is judged against the set it lies in; for x in D nothing changes.
/// A player whose restricted set is empty gets an infinite violation.
GneCheck check_is_gne(const Game& game, const Vector& x, double tol,
                      const OracleBudget& budget = {});

}  // namespace gnep

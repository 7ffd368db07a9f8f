#pragma once

#include <map>
#include <string>
#include <vector>

#include "gnep/types.hpp"

namespace gnep {

/// One player of a concave-quadratic game.
///
/// The payoff is
///   f_i(x) = c^T x_i - 0.5 x_i^T Q x_i + sum_{j != i} x_i^T R[j] x_j
/// and the strategy set X_i is the box [lower, upper] (entries may be
/// infinite).
struct PlayerSpec {
  int n = 0;
  Vector c;
  Matrix Q;
  std::map<int, Matrix> R;  // keyed by opponent index j, each n x n_j
  Vector lower;
  Vector upper;
};

/// Joint constraints sum_i h_i(x_i) <= b with
///   h_ij(x_i) = a_ij + (A_i x_i)_j + x_i^T C_ij x_i.
/// `C` is either empty (affine constraints) or holds, per player, one PSD
/// n_i x n_i matrix per constraint row.
struct JointConstraintSpec {
  int m = 0;
  std::vector<Matrix> A;
  std::vector<Vector> a;
  std::vector<std::vector<Matrix>> C;
  Vector b;
};

/// Immutable game data plus the per-player slicing of strategy profiles.
///
/// A strategy profile is the concatenation x = (x_1, ..., x_l) in R^n; use
/// `block` to address a player's part.
class Game {
 public:
  Game(std::string name, std::vector<PlayerSpec> players,
       JointConstraintSpec joint);

  const std::string& name() const { return name_; }
  int num_players() const { return static_cast<int>(players_.size()); }
  int dim() const { return dim_; }
  int num_joint() const { return joint_.m; }
  const PlayerSpec& player(int i) const { return players_[i]; }
  const std::vector<PlayerSpec>& players() const { return players_; }
  const JointConstraintSpec& joint() const { return joint_; }
  int offset(int i) const { return offsets_[i]; }
  int player_dim(int i) const { return players_[i].n; }

  /// True when every C_ij vanishes (or none were given).
  bool affine_constraints() const { return affine_; }

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  auto block(const Vector& x, int i) const {
    return x.segment(offsets_[i], players_[i].n);
  }
  auto block(Vector& x, int i) const {
    return x.segment(offsets_[i], players_[i].n);
  }

  void require_profile(const Vector& x, const char* what) const;

 private:
  std::string name_;
  std::vector<PlayerSpec> players_;
  JointConstraintSpec joint_;
  std::vector<int> offsets_;
  int dim_ = 0;
  bool affine_ = true;
  Vector lower_;
  Vector upper_;
};

bool operator==(const PlayerSpec& lhs, const PlayerSpec& rhs);
bool operator==(const JointConstraintSpec& lhs, const JointConstraintSpec& rhs);
bool operator==(const Game& lhs, const Game& rhs);

double eval_payoff(const Game& game, int i, const Vector& x);

/// Psi(x, y) = sum_i f_i(x_{-i}, y_i).
double eval_psi(const Game& game, const Vector& x, const Vector& y);

/// Nikaido-Isoda bifunction Phi(x, y) = Psi(x, x) - Psi(x, y).
double eval_phi(const Game& game, const Vector& x, const Vector& y);

/// Pseudo-gradient F(x): F_i(x) = -grad_{x_i} f_i(x).
Vector eval_F(const Game& game, const Vector& x);

/// Jacobian of F; constant for the quadratic family.
Matrix jacobian_F(const Game& game);

Vector eval_h_i(const Game& game, int i, const Vector& x_i);
/// m x n_i Jacobian of h_i at x_i.
Matrix jacobian_h_i(const Game& game, int i, const Vector& x_i);

/// l x m matrix whose row i is h_i(x_i).
Matrix eval_h(const Game& game, const Vector& x);

/// [sum_i h_i(x_i) - b]_+
Vector joint_residual(const Game& game, const Vector& x);

Vector project_X(const Game& game, const Vector& z);
bool in_X(const Game& game, const Vector& x, double tol = 0.0);

enum class Severity { kWarning, kError };

struct Finding {
  Severity severity;
  std::string code;
  std::string message;
};

/// Checks the standing assumptions on the game data.
///
/// Asymmetric Q_i or C_ij, lower > upper, a nonconcave payoff or an empty
/// common feasible set raise ConfigError listing every hard finding. The
/// returned list holds warnings only: singular Q_i (the lower-level Nash
/// problem may have several solutions) and unbounded boxes without strict
/// concavity (existence is not certified).
std::vector<Finding> validate_game(const Game& game);

/// Minimum of ||[sum_i h_i(x_i) - b]_+||_inf over the box found by projected
/// gradient; zero (to solver accuracy) iff D is nonempty.
double min_joint_violation(const Game& game);

}  // namespace gnep

#include "gnep/game.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "gnep/error.hpp"

namespace gnep {

namespace {

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(fmt::format("{}: expected {}x{}, got {}x{}", what,
                                     rows, cols, m.rows(), m.cols()));
  }
}

void require_size(const Vector& v, Eigen::Index n, const std::string& what) {
  if (v.size() != n) {
    throw DimensionError(
        fmt::format("{}: expected length {}, got {}", what, n, v.size()));
  }
}

bool is_symmetric(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

Game::Game(std::string name, std::vector<PlayerSpec> players,
           JointConstraintSpec joint)
    : name_(std::move(name)),
      players_(std::move(players)),
      joint_(std::move(joint)) {
  const int l = num_players();
  if (l < 1) throw ConfigError("game needs at least one player");
  if (joint_.m < 1) throw ConfigError("joint.m must be at least 1");

  offsets_.resize(l);
  for (int i = 0; i < l; ++i) {
    offsets_[i] = dim_;
    if (players_[i].n < 1) {
      throw ConfigError(fmt::format("players[{}].n must be >= 1", i));
    }
    dim_ += players_[i].n;
  }

  for (int i = 0; i < l; ++i) {
    const PlayerSpec& p = players_[i];
    const std::string tag = fmt::format("players[{}]", i);
    require_size(p.c, p.n, tag + ".c");
    require_shape(p.Q, p.n, p.n, tag + ".Q");
    require_size(p.lower, p.n, tag + ".lower");
    require_size(p.upper, p.n, tag + ".upper");
    for (const auto& [j, r] : p.R) {
      if (j < 0 || j >= l || j == i) {
        throw ConfigError(
            fmt::format("{}.R has invalid opponent index {}", tag, j));
      }
      require_shape(r, p.n, players_[j].n, fmt::format("{}.R[{}]", tag, j));
    }
  }

  const int m = joint_.m;
  if (static_cast<int>(joint_.A.size()) != l ||
      static_cast<int>(joint_.a.size()) != l) {
    throw DimensionError("joint.A and joint.a need one entry per player");
  }
  require_size(joint_.b, m, "joint.b");
  for (int i = 0; i < l; ++i) {
    require_shape(joint_.A[i], m, players_[i].n, fmt::format("joint.A[{}]", i));
    require_size(joint_.a[i], m, fmt::format("joint.a[{}]", i));
  }
  if (!joint_.C.empty()) {
    if (static_cast<int>(joint_.C.size()) != l) {
      throw DimensionError("joint.C needs one entry per player");
    }
    for (int i = 0; i < l; ++i) {
      if (static_cast<int>(joint_.C[i].size()) != m) {
        throw DimensionError(
            fmt::format("joint.C[{}] needs one matrix per constraint", i));
      }
      for (int j = 0; j < m; ++j) {
        require_shape(joint_.C[i][j], players_[i].n, players_[i].n,
                      fmt::format("joint.C[{}][{}]", i, j));
        if (joint_.C[i][j].cwiseAbs().maxCoeff() > 0.0) affine_ = false;
      }
    }
  }

  lower_.resize(dim_);
  upper_.resize(dim_);
  for (int i = 0; i < l; ++i) {
    lower_.segment(offsets_[i], players_[i].n) = players_[i].lower;
    upper_.segment(offsets_[i], players_[i].n) = players_[i].upper;
  }
}

void Game::require_profile(const Vector& x, const char* what) const {
  require_size(x, dim_, what);
}

bool operator==(const PlayerSpec& lhs, const PlayerSpec& rhs) {
  if (lhs.n != rhs.n || lhs.c != rhs.c || lhs.Q != rhs.Q ||
      lhs.lower != rhs.lower || lhs.upper != rhs.upper ||
      lhs.R.size() != rhs.R.size()) {
    return false;
  }
  for (const auto& [j, r] : lhs.R) {
    auto it = rhs.R.find(j);
    if (it == rhs.R.end() || it->second.rows() != r.rows() ||
        it->second.cols() != r.cols() || it->second != r) {
      return false;
    }
  }
  return true;
}

bool operator==(const JointConstraintSpec& lhs,
                const JointConstraintSpec& rhs) {
  if (lhs.m != rhs.m || lhs.b != rhs.b || lhs.A.size() != rhs.A.size() ||
      lhs.a.size() != rhs.a.size() || lhs.C.size() != rhs.C.size()) {
    return false;
  }
  for (std::size_t i = 0; i < lhs.A.size(); ++i) {
    if (lhs.A[i] != rhs.A[i] || lhs.a[i] != rhs.a[i]) return false;
  }
  for (std::size_t i = 0; i < lhs.C.size(); ++i) {
    if (lhs.C[i].size() != rhs.C[i].size()) return false;
    for (std::size_t j = 0; j < lhs.C[i].size(); ++j) {
      if (lhs.C[i][j] != rhs.C[i][j]) return false;
    }
  }
  return true;
}

bool operator==(const Game& lhs, const Game& rhs) {
  return lhs.name() == rhs.name() && lhs.players() == rhs.players() &&
         lhs.joint() == rhs.joint();
}

double eval_payoff(const Game& game, int i, const Vector& x) {
  game.require_profile(x, "eval_payoff: x");
  if (i < 0 || i >= game.num_players()) {
    throw DimensionError(fmt::format("eval_payoff: no player {}", i));
  }
  const PlayerSpec& p = game.player(i);
  const auto xi = game.block(x, i);
  double value = p.c.dot(xi) - 0.5 * xi.dot(p.Q * xi);
  for (const auto& [j, r] : p.R) value += xi.dot(r * game.block(x, j));
  return value;
}

double eval_psi(const Game& game, const Vector& x, const Vector& y) {
  game.require_profile(x, "eval_psi: x");
  game.require_profile(y, "eval_psi: y");
  double total = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    const PlayerSpec& p = game.player(i);
    const auto yi = game.block(y, i);
    total += p.c.dot(yi) - 0.5 * yi.dot(p.Q * yi);
    for (const auto& [j, r] : p.R) total += yi.dot(r * game.block(x, j));
  }
  return total;
}

double eval_phi(const Game& game, const Vector& x, const Vector& y) {
  return eval_psi(game, x, x) - eval_psi(game, x, y);
}

Vector eval_F(const Game& game, const Vector& x) {
  game.require_profile(x, "eval_F: x");
  Vector out(game.dim());
  for (int i = 0; i < game.num_players(); ++i) {
    const PlayerSpec& p = game.player(i);
    auto fi = game.block(out, i);
    fi.noalias() = p.Q * game.block(x, i);
    fi -= p.c;
    for (const auto& [j, r] : p.R) fi.noalias() -= r * game.block(x, j);
  }
  return out;
}

Matrix jacobian_F(const Game& game) {
  Matrix jac = Matrix::Zero(game.dim(), game.dim());
  for (int i = 0; i < game.num_players(); ++i) {
    const PlayerSpec& p = game.player(i);
    jac.block(game.offset(i), game.offset(i), p.n, p.n) = p.Q;
    for (const auto& [j, r] : p.R) {
      jac.block(game.offset(i), game.offset(j), p.n, game.player_dim(j)) = -r;
    }
  }
  return jac;
}

Vector eval_h_i(const Game& game, int i, const Vector& x_i) {
  require_size(x_i, game.player_dim(i), "eval_h_i: x_i");
  const JointConstraintSpec& joint = game.joint();
  Vector h = joint.a[i] + joint.A[i] * x_i;
  if (!game.affine_constraints()) {
    for (int j = 0; j < joint.m; ++j) h(j) += x_i.dot(joint.C[i][j] * x_i);
  }
  return h;
}

Matrix jacobian_h_i(const Game& game, int i, const Vector& x_i) {
  require_size(x_i, game.player_dim(i), "jacobian_h_i: x_i");
  const JointConstraintSpec& joint = game.joint();
  Matrix jac = joint.A[i];
  if (!game.affine_constraints()) {
    for (int j = 0; j < joint.m; ++j) {
      jac.row(j) += 2.0 * (joint.C[i][j] * x_i).transpose();
    }
  }
  return jac;
}

Matrix eval_h(const Game& game, const Vector& x) {
  game.require_profile(x, "eval_h: x");
  Matrix h(game.num_players(), game.num_joint());
  for (int i = 0; i < game.num_players(); ++i) {
    h.row(i) = eval_h_i(game, i, game.block(x, i)).transpose();
  }
  return h;
}

Vector joint_residual(const Game& game, const Vector& x) {
  const Matrix h = eval_h(game, x);
  return (h.colwise().sum().transpose() - game.joint().b).cwiseMax(0.0);
}

Vector project_X(const Game& game, const Vector& z) {
  game.require_profile(z, "project_X: z");
  return z.cwiseMax(game.lower()).cwiseMin(game.upper());
}

bool in_X(const Game& game, const Vector& x, double tol) {
  game.require_profile(x, "in_X: x");
  return ((x - game.lower()).array() >= -tol).all() &&
         ((game.upper() - x).array() >= -tol).all();
}

double min_joint_violation(const Game& game) {
  // Projected gradient with Armijo backtracking on the convex function
  // 0.5 ||[sum_i h_i(x_i) - b]_+||^2 over X.
  auto violation = [&](const Vector& x) {
    Vector s = -game.joint().b;
    for (int i = 0; i < game.num_players(); ++i) {
      s += eval_h_i(game, i, game.block(x, i));
    }
    return Vector(s.cwiseMax(0.0));
  };
  auto gradient = [&](const Vector& x, const Vector& r) {
    Vector grad(game.dim());
    for (int i = 0; i < game.num_players(); ++i) {
      game.block(grad, i) =
          jacobian_h_i(game, i, game.block(x, i)).transpose() * r;
    }
    return grad;
  };

  Vector x = project_X(game, Vector::Zero(game.dim()));
  Vector r = violation(x);
  double value = 0.5 * r.squaredNorm();
  double step = 1.0;
  for (int it = 0; it < 20000 && r.lpNorm<Eigen::Infinity>() > 1e-13; ++it) {
    const Vector grad = gradient(x, r);
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vector trial = project_X(game, x - step * grad);
      const Vector rt = violation(trial);
      const double vt = 0.5 * rt.squaredNorm();
      if (vt <= value - 1e-4 / step * (trial - x).squaredNorm()) {
        moved = (trial - x).lpNorm<Eigen::Infinity>() > 0.0;
        x = trial;
        r = rt;
        value = vt;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return r.size() ? r.lpNorm<Eigen::Infinity>() : 0.0;
}

std::vector<Finding> validate_game(const Game& game) {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;
  auto error = [&](std::string code, std::string msg) {
    errors.push_back({Severity::kError, std::move(code), std::move(msg)});
  };

  for (int i = 0; i < game.num_players(); ++i) {
    const PlayerSpec& p = game.player(i);
    if (!p.c.allFinite() || !p.Q.allFinite()) {
      error("non-finite", fmt::format("player {}: payoff data not finite", i));
      continue;
    }
    for (int k = 0; k < p.n; ++k) {
      if (std::isnan(p.lower(k)) || std::isnan(p.upper(k)) ||
          p.lower(k) > p.upper(k)) {
        error("bad-box",
              fmt::format("player {}: lower > upper at component {}", i, k));
      }
    }
    if (!is_symmetric(p.Q)) {
      error("asymmetric-Q", fmt::format("player {}: Q is not symmetric", i));
      continue;
    }
    const double lam = min_eigenvalue(p.Q);
    if (lam < -kEpsPsd) {
      error("nonconcave-payoff",
            fmt::format("player {}: Q has eigenvalue {:.3g} < 0, payoff is "
                        "not concave in own strategy",
                        i, lam));
      continue;
    }
    const bool pd = lam > kEpsPsd;
    if (!pd) {
      warnings.push_back(
          {Severity::kWarning, "singular-Q",
           fmt::format("player {}: Q is singular, NEP solution may be "
                       "non-unique",
                       i)});
    }
    const bool bounded = p.lower.allFinite() && p.upper.allFinite();
    if (!bounded && !pd) {
      warnings.push_back(
          {Severity::kWarning, "existence-not-certified",
           fmt::format("player {}: unbounded strategy set without strict "
                       "concavity, penalized problems may have no solution",
                       i)});
    }
  }

  const JointConstraintSpec& joint = game.joint();
  if (!joint.b.allFinite()) error("non-finite", "joint.b is not finite");
  for (int i = 0; i < game.num_players(); ++i) {
    if (!joint.A[i].allFinite() || !joint.a[i].allFinite()) {
      error("non-finite", fmt::format("joint data of player {} not finite", i));
    }
  }
  if (!joint.C.empty()) {
    for (int i = 0; i < game.num_players(); ++i) {
      for (int j = 0; j < joint.m; ++j) {
        const Matrix& c = joint.C[i][j];
        if (!is_symmetric(c)) {
          error("asymmetric-C",
                fmt::format("joint.C[{}][{}] is not symmetric", i, j));
        } else if (min_eigenvalue(c) < -kEpsPsd) {
          error("nonconvex-constraint",
                fmt::format("joint.C[{}][{}] is not positive semidefinite", i,
                            j));
        }
      }
    }
  }

  if (errors.empty()) {
    const double v = min_joint_violation(game);
    if (v > 1e-6) {
      error("empty-feasible-set",
            fmt::format("common feasible set appears empty (minimal joint "
                        "violation {:.3g})",
                        v));
    }
  }

  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "invalid game '" << game.name() << "':";
    for (const Finding& f : errors) msg << "\n  [" << f.code << "] " << f.message;
    throw ConfigError(msg.str());
  }
  return warnings;
}

}  // namespace gnep

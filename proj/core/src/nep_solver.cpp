#include "gnep/nep_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gnep/error.hpp"

namespace gnep {

void NepConfig::validate() const {
  if (!(tol > 0.0)) throw ConfigError("nep tol must be positive");
  if (!(tol_unit >= tol)) throw ConfigError("nep tol_unit must be >= tol");
  if (max_iter < 1) throw ConfigError("nep max_iter must be >= 1");
  if (!(step0 > 0.0)) throw ConfigError("nep step0 must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw ConfigError("nep backtracking factor must lie in (0, 1)");
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ConfigError("nep acceptance parameter must lie in (0, 1)");
  }
}

PenalizedMap::PenalizedMap(const Game& game, const PenaltyFunction& phi,
                           double tau, const ShareMatrix& u)
    : game_(game),
      phi_(phi),
      tau_(tau),
      u_(u),
      jac_F_(jacobian_F(game)),
      affine_(game.affine_constraints()) {
  if (!(tau >= 0.0)) throw ConfigError("penalty parameter must be >= 0");
  if (u.rows() != game.num_players() || u.cols() != game.num_joint()) {
    throw DimensionError(fmt::format("penalized map: expected {}x{} shares",
                                     game.num_players(), game.num_joint()));
  }
  shift_.resize(game.dim());
  for (int i = 0; i < game.num_players(); ++i) {
    game.block(shift_, i) = -game.player(i).c;
  }
  if (affine_) {
    for (int i = 0; i < game.num_players(); ++i) {
      offset_.push_back(game.joint().a[i] - u.row(i).transpose());
    }
    v_.resize(game.num_joint());
    dphi_.resize(game.num_joint());
  }
}

void PenalizedMap::evaluate(const Vector& x, Vector& out) const {
  out.noalias() = jac_F_ * x;
  out += shift_;
  if (tau_ == 0.0) return;
  if (affine_) {
    for (int i = 0; i < game_.num_players(); ++i) {
      const Matrix& A = game_.joint().A[i];
      v_.noalias() = A * game_.block(x, i);
      v_ += offset_[i];
      if ((v_.array() <= 0.0).all()) continue;
      phi_.gradient_into(v_, dphi_);
      game_.block(out, i).noalias() += tau_ * (A.transpose() * dphi_);
    }
    return;
  }
  for (int i = 0; i < game_.num_players(); ++i) {
    const Vector xi = game_.block(x, i);
    const Vector v = eval_h_i(game_, i, xi) - u_.row(i).transpose();
    if ((v.array() <= 0.0).all()) continue;
    game_.block(out, i).noalias() +=
        tau_ * (jacobian_h_i(game_, i, xi).transpose() * phi_.gradient(v));
  }
}

Vector PenalizedMap::operator()(const Vector& x) const {
  game_.require_profile(x, "penalized_map: x");
  Vector out(game_.dim());
  evaluate(x, out);
  return out;
}

Vector penalized_map(const Game& game, const PenaltyFunction& phi, double tau,
                     const ShareMatrix& u, const Vector& x) {
  return PenalizedMap(game, phi, tau, u)(x);
}

double nep_residual(const Game& game, const PenaltyFunction& phi, double tau,
                    const ShareMatrix& u, const Vector& x, double beta) {
  const Vector fx = penalized_map(game, phi, tau, u, x);
  return (x - project_X(game, x - beta * fx)).norm();
}

NepResult solve_nep(const Game& game, const PenaltyFunction& phi, double tau,
                    const ShareMatrix& u, const Vector& x0,
                    const NepConfig& cfg) {
  cfg.validate();
  if (!(tau > 0.0)) throw ConfigError("solve_nep: tau must be positive");
  game.require_profile(x0, "solve_nep: x0");

  const PenalizedMap map(game, phi, tau, u);
  const Vector& lo = game.lower();
  const Vector& hi = game.upper();

  NepResult result;
  Vector x = project_X(game, x0);
  Vector fx(game.dim()), y(game.dim()), fy(game.dim());
  map.evaluate(x, fx);
  double beta = cfg.step0;
  // Once r <= tol, keep refining for up to as many iterations again until
  // r <= tol_unit * beta too. r_beta / beta is nonincreasing in beta, so that
  // bound caps the unit-step residual by tol_unit.
  int reached = -1;
  auto done = [&](double r, int k) {
    if (r > cfg.tol) return false;
    if (reached < 0) reached = k;
    return r <= cfg.tol_unit * beta || k >= 2 * reached + 10;
  };

  for (int k = 0;; ++k) {
    if (!fx.allFinite()) {
      result.x = std::move(x);
      result.residual = std::numeric_limits<double>::infinity();
      result.step = beta;
      result.iters = k;
      return result;
    }
    double r = 0.0;
    double slack = 0.0;
    for (;;) {
      y = (x - beta * fx).cwiseMax(lo).cwiseMin(hi);
      r = (y - x).norm();
      if (done(r, k) || k >= cfg.max_iter) {
        result.x = std::move(x);
        result.residual = r;
        result.step = beta;
        result.iters = k;
        result.converged = r <= cfg.tol;
        return result;
      }
      map.evaluate(y, fy);
      slack = beta * (fy - fx).norm() / (cfg.theta * r);
      if (slack <= 1.0) break;
      beta *= cfg.backtrack;
    }
    x = (x - beta * fy).cwiseMax(lo).cwiseMin(hi);
    map.evaluate(x, fx);
    // The local Lipschitz estimate can drop once iterates leave a region where
    // more penalty terms are active; let the step recover, capped by step0.
    if (slack <= 0.5) beta = std::min(cfg.step0, beta / cfg.backtrack);
  }
}

}  // namespace gnep

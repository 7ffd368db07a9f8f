#include "gnep/penalty.hpp"

#include <fmt/format.h>

#include "gnep/error.hpp"

namespace gnep {

namespace {

void require_share_row(const Game& game, const Vector& u_i, const char* what) {
  if (u_i.size() != game.num_joint()) {
    throw DimensionError(fmt::format("{}: expected {} share components, got {}",
                                     what, game.num_joint(), u_i.size()));
  }
}

void require_shares(const Game& game, const ShareMatrix& u, const char* what) {
  if (u.rows() != game.num_players() || u.cols() != game.num_joint()) {
    throw DimensionError(fmt::format("{}: expected {}x{} shares, got {}x{}",
                                     what, game.num_players(),
                                     game.num_joint(), u.rows(), u.cols()));
  }
}

}  // namespace

double phi_value(const Vector& v) { return 0.5 * v.cwiseMax(0.0).squaredNorm(); }

Vector phi_grad(const Vector& v) { return v.cwiseMax(0.0); }

double QuadraticPlusPenalty::value(const Vector& v) const { return phi_value(v); }

Vector QuadraticPlusPenalty::gradient(const Vector& v) const {
  return phi_grad(v);
}

std::unique_ptr<PenaltyFunction> make_penalty(std::string_view kind) {
  if (kind == "quadratic_plus") return std::make_unique<QuadraticPlusPenalty>();
  throw ConfigError(fmt::format("unknown penalty kind '{}'", kind));
}

double penalty_i(const Game& game, const PenaltyFunction& phi, int i,
                 const Vector& x_i, const Vector& u_i) {
  require_share_row(game, u_i, "penalty_i: u_i");
  return phi.value(eval_h_i(game, i, x_i) - u_i);
}

double penalty_total(const Game& game, const PenaltyFunction& phi,
                     const Vector& x, const ShareMatrix& u) {
  game.require_profile(x, "penalty_total: x");
  require_shares(game, u, "penalty_total: u");
  double total = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    total += penalty_i(game, phi, i, game.block(x, i), u.row(i).transpose());
  }
  return total;
}

Vector penalty_grad_x(const Game& game, const PenaltyFunction& phi, int i,
                      const Vector& x_i, const Vector& u_i) {
  require_share_row(game, u_i, "penalty_grad_x: u_i");
  const Vector dphi = phi.gradient(eval_h_i(game, i, x_i) - u_i);
  return jacobian_h_i(game, i, x_i).transpose() * dphi;
}

Matrix eval_g(const Game& game, const PenaltyFunction& phi,
              const ShareMatrix& u, const Vector& x_u) {
  game.require_profile(x_u, "eval_g: x_u");
  require_shares(game, u, "eval_g: u");
  Matrix g(game.num_players(), game.num_joint());
  for (int i = 0; i < game.num_players(); ++i) {
    const Vector v = eval_h_i(game, i, game.block(x_u, i)) - u.row(i).transpose();
    g.row(i) = -phi.gradient(v).transpose();
  }
  return g;
}

}  // namespace gnep

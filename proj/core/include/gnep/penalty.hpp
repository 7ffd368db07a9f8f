#pragma once

#include <memory>
#include <string_view>

#include "gnep/game.hpp"

namespace gnep {

/// Convex, differentiable, isotone penalty phi: R^m -> R_+ that vanishes
/// exactly on the nonpositive orthant. `cocoercivity()` is the constant
/// gamma of the gradient map phi'.
class PenaltyFunction {
 public:
  virtual ~PenaltyFunction() = default;
  virtual double value(const Vector& v) const = 0;
  virtual Vector gradient(const Vector& v) const = 0;
  /// Same as gradient() but writes into `out`, which is resized if needed.
  virtual void gradient_into(const Vector& v, Vector& out) const {
    out = gradient(v);
  }
  virtual double cocoercivity() const = 0;
  virtual std::string_view kind() const = 0;
};

/// phi(v) = 0.5 ||[v]_+||^2, phi'(v) = [v]_+. The gradient is 1-Lipschitz,
/// hence co-coercive with gamma = 1.
class QuadraticPlusPenalty final : public PenaltyFunction {
 public:
  double value(const Vector& v) const override;
  Vector gradient(const Vector& v) const override;
  void gradient_into(const Vector& v, Vector& out) const override {
    out = v.cwiseMax(0.0);
  }
  double cocoercivity() const override { return 1.0; }
  std::string_view kind() const override { return "quadratic_plus"; }
};

/// Throws ConfigError for unknown kinds.
std::unique_ptr<PenaltyFunction> make_penalty(std::string_view kind);

double phi_value(const Vector& v);
Vector phi_grad(const Vector& v);

/// P_i(x_i, u_i) = phi(h_i(x_i) - u_i).
double penalty_i(const Game& game, const PenaltyFunction& phi, int i,
                 const Vector& x_i, const Vector& u_i);

/// P(x, u) = sum_i P_i(x_i, u_i).
double penalty_total(const Game& game, const PenaltyFunction& phi,
                     const Vector& x, const ShareMatrix& u);

/// grad_{x_i} P_i = J_{h_i}(x_i)^T phi'(h_i(x_i) - u_i).
Vector penalty_grad_x(const Game& game, const PenaltyFunction& phi, int i,
                      const Vector& x_i, const Vector& u_i);

/// Master mapping value g_i(u) = -phi'(h_i(x_i(u)) - u_i), stacked as an
/// l x m matrix. `x_u` should solve the penalized Nash problem at u.
Matrix eval_g(const Game& game, const PenaltyFunction& phi,
              const ShareMatrix& u, const Vector& x_u);

}  // namespace gnep

#include "gnep/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gnep/error.hpp"

namespace gnep {

namespace {

double rel_err(double approx, double exact) {
  return std::abs(approx - exact) / std::max(1.0, std::abs(exact));
}

}  // namespace

BoxSampler::BoxSampler(const Game& game, std::uint64_t seed, double radius)
    : lo_(game.lower()),
      hi_(game.upper()),
      players_(game.num_players()),
      rng_(seed) {
  for (Eigen::Index k = 0; k < lo_.size(); ++k) {
    const bool lf = std::isfinite(lo_(k));
    const bool hf = std::isfinite(hi_(k));
    if (lf && !hf) hi_(k) = lo_(k) + 2.0 * radius;
    if (!lf && hf) lo_(k) = hi_(k) - 2.0 * radius;
    if (!lf && !hf) {
      lo_(k) = -radius;
      hi_(k) = radius;
    }
  }
}

Vector BoxSampler::sample() {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x(lo_.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x(k) = lo_(k) + unit(rng_) * (hi_(k) - lo_(k));
  }
  return x;
}

Vector BoxSampler::interior_sample(double margin) {
  std::uniform_real_distribution<double> unit(margin, 1.0 - margin);
  Vector x(lo_.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x(k) = lo_(k) + unit(rng_) * (hi_(k) - lo_(k));
  }
  return x;
}

ShareMatrix BoxSampler::sample_shares(const ShareSet& set, double spread) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ShareMatrix u(players_, set.b.size());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index t = 0; t < u.cols(); ++t) {
      u(i, t) = set.b(t) / players_ +
                spread * (1.0 + std::abs(set.b(t))) * unit(rng_);
    }
  }
  return project_U(u, set);
}

double check_phi_monotone(const Game& game, int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) throw ConfigError("check_phi_monotone: need N >= 1");
  BoxSampler sampler(game, seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_pairs; ++k) {
    const Vector x1 = sampler.sample();
    const Vector x2 = sampler.sample();
    worst = std::max(worst, eval_phi(game, x1, x2) + eval_phi(game, x2, x1));
  }
  return worst;
}

CocoercivityReport check_G_cocoercive(const Game& game,
                                      const PenaltyFunction& phi, double tau,
                                      const ShareSet& set, int n_pairs,
                                      std::uint64_t seed,
                                      const NepConfig& nep) {
  if (n_pairs < 1) throw ConfigError("check_G_cocoercive: need N >= 1");
  BoxSampler sampler(game, seed);
  const Vector x0 = project_X(game, Vector::Zero(game.dim()));
  auto g_at = [&](const ShareMatrix& u) {
    const NepResult r = solve_nep(game, phi, tau, u, x0, nep);
    if (!r.converged) {
      throw SolveError(fmt::format(
          "check_G_cocoercive: inner solve stopped at residual {:.3g}",
          r.residual));
    }
    return eval_g(game, phi, u, r.x);
  };

  const double gamma = phi.cocoercivity();
  CocoercivityReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_pairs; ++k) {
    const ShareMatrix u1 = sampler.sample_shares(set);
    const ShareMatrix u2 = sampler.sample_shares(set);
    const Matrix dg = g_at(u1) - g_at(u2);
    const double violation =
        gamma * dg.squaredNorm() - (dg.array() * (u1 - u2).array()).sum();
    report.max_violation = std::max(report.max_violation, violation);
    ++report.pairs;
  }
  return report;
}

double GradientCheckReport::max() const {
  return std::max({F_error, penalty_error, phi_error});
}

GradientCheckReport gradient_check(const Game& game,
                                   const PenaltyFunction& phi,
                                   const ShareMatrix& u, const Vector& x,
                                   double h_step) {
  if (!(h_step >= 1e-8 && h_step <= 1e-4)) {
    throw ConfigError("gradient_check: h_step must lie in [1e-8, 1e-4]");
  }
  game.require_profile(x, "gradient_check: x");
  GradientCheckReport report;

  const Vector F = eval_F(game, x);
  Vector y = x;
  for (int k = 0; k < game.dim(); ++k) {
    y(k) = x(k) + h_step;
    const double up = eval_phi(game, x, y);
    y(k) = x(k) - h_step;
    const double down = eval_phi(game, x, y);
    y(k) = x(k);
    report.F_error =
        std::max(report.F_error, rel_err((up - down) / (2 * h_step), F(k)));
  }

  for (int i = 0; i < game.num_players(); ++i) {
    const Vector xi = game.block(x, i);
    const Vector ui = u.row(i).transpose();
    const Vector grad = penalty_grad_x(game, phi, i, xi, ui);
    Vector z = xi;
    for (Eigen::Index k = 0; k < xi.size(); ++k) {
      z(k) = xi(k) + h_step;
      const double up = penalty_i(game, phi, i, z, ui);
      z(k) = xi(k) - h_step;
      const double down = penalty_i(game, phi, i, z, ui);
      z(k) = xi(k);
      report.penalty_error = std::max(
          report.penalty_error, rel_err((up - down) / (2 * h_step), grad(k)));
    }

    const Vector v = eval_h_i(game, i, xi) - ui;
    const Vector dphi = phi.gradient(v);
    Vector w = v;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      w(j) = v(j) + h_step;
      const double up = phi.value(w);
      w(j) = v(j) - h_step;
      const double down = phi.value(w);
      w(j) = v(j);
      report.phi_error = std::max(report.phi_error,
                                  rel_err((up - down) / (2 * h_step), dphi(j)));
    }
  }
  return report;
}

OneSided one_sided_penalty_slopes(const Game& game, const PenaltyFunction& phi,
                                  int i, const Vector& x_i, const Vector& u_i,
                                  double h_step) {
  OneSided out{Vector(x_i.size()), Vector(x_i.size())};
  const double base = penalty_i(game, phi, i, x_i, u_i);
  Vector z = x_i;
  for (Eigen::Index k = 0; k < x_i.size(); ++k) {
    z(k) = x_i(k) - h_step;
    out.left(k) = (base - penalty_i(game, phi, i, z, u_i)) / h_step;
    z(k) = x_i(k) + h_step;
    out.right(k) = (penalty_i(game, phi, i, z, u_i) - base) / h_step;
    z(k) = x_i(k);
  }
  return out;
}

double eval_phi_tau(const Game& game, const PenaltyFunction& phi, double tau,
                    const Vector& x, const ShareMatrix& u, const Vector& x2,
                    const ShareMatrix& u2) {
  return eval_phi(game, x, x2) +
         tau * (penalty_total(game, phi, x2, u2) -
                penalty_total(game, phi, x, u));
}

EquivalenceReport check_penalized_equivalence(
    const Game& game, const PenaltyFunction& phi, double tau,
    const ShareSet& set, const Vector& x, const ShareMatrix& u, double lambda,
    int n_samples, std::uint64_t seed) {
  EquivalenceReport report;
  report.x_residual = nep_residual(game, phi, tau, u, x, 1.0);
  report.u_residual = share_residual(u, eval_g(game, phi, u, x), lambda, set);

  BoxSampler sampler(game, seed);
  report.min_phi_tau = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    const Vector x2 = sampler.sample();
    const ShareMatrix u2 = sampler.sample_shares(set);
    report.min_phi_tau = std::min(
        report.min_phi_tau, eval_phi_tau(game, phi, tau, x, u, x2, u2));
  }
  return report;
}

}  // namespace gnep

#include "gnep/master_vi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "gnep/error.hpp"

namespace gnep {

namespace {

// Projection of one column onto {sum = b, u >= 0} by the sort-threshold rule.
void project_simplex(Eigen::Ref<Vector> col, double b) {
  std::vector<double> s(col.data(), col.data() + col.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = std::numeric_limits<double>::infinity();  // b == 0: all zero
  for (std::size_t j = 0; j < s.size(); ++j) {
    cumulative += s[j];
    const double candidate = (cumulative - b) / static_cast<double>(j + 1);
    if (s[j] - candidate > 0.0) shift = candidate;
  }
  col = (col.array() - shift).cwiseMax(0.0);
}

// Projection onto {sum = b, lo <= u <= hi} by bisection on the common shift.
void project_clipped(Eigen::Ref<Vector> col, double b, double lo, double hi) {
  const double l = static_cast<double>(col.size());
  auto clipped_sum = [&](double shift) {
    return (col.array() - shift).cwiseMax(lo).cwiseMin(hi).sum();
  };
  double left = col.minCoeff() - hi - std::abs(b) - 1.0;
  double right = std::max(col.maxCoeff() - lo, (col.sum() - b) / l);
  if (!std::isfinite(right)) right = (col.sum() - b) / l;
  right += 1.0;
  for (int it = 0; it < 200 && right - left > 0.0; ++it) {
    const double mid = 0.5 * (left + right);
    if (mid == left || mid == right) break;
    (clipped_sum(mid) > b ? left : right) = mid;
  }
  const double shift = 0.5 * (left + right);
  Vector out = (col.array() - shift).cwiseMax(lo).cwiseMin(hi);
  // Spread the leftover roundoff over the entries strictly inside the bounds.
  const double excess = out.sum() - b;
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) > lo && out(i) < hi) free.push_back(i);
  }
  if (!free.empty()) {
    for (Eigen::Index i : free) out(i) -= excess / free.size();
  }
  col = out.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

void MasterConfig::validate(double gamma) const {
  if (!(lambda > 0.0 && lambda < 2.0 * gamma)) {
    throw ConfigError(fmt::format(
        "master step lambda = {} must lie in (0, 2 gamma) = (0, {})", lambda,
        2.0 * gamma));
  }
  if (!(tol_u > 0.0)) throw ConfigError("master tol_u must be positive");
  if (max_iter < 1) throw ConfigError("master max_iter must be >= 1");
  nep.validate();
}

ShareMatrix project_U(const ShareMatrix& raw, const ShareSet& set) {
  if (raw.cols() != set.b.size() || raw.rows() < 1) {
    throw DimensionError(fmt::format(
        "project_U: shares are {}x{} but b has {} components", raw.rows(),
        raw.cols(), set.b.size()));
  }
  const double l = static_cast<double>(raw.rows());
  ShareMatrix u = raw;
  for (Eigen::Index t = 0; t < u.cols(); ++t) {
    const double b = set.b(t);
    if ((set.flags.nonneg || set.flags.cap) && b < 0.0) {
      throw InfeasibleSetError(fmt::format(
          "share restrictions with b[{}] = {} < 0 leave no feasible shares", t,
          b));
    }
    auto col = u.col(t);
    if (set.flags.cap) {
      const double lo =
          set.flags.nonneg ? 0.0 : -std::numeric_limits<double>::infinity();
      project_clipped(col, b, lo, b);
    } else if (set.flags.nonneg) {
      project_simplex(col, b);
    } else {
      col.array() -= (col.sum() - b) / l;
    }
  }
  return u;
}

double share_residual(const ShareMatrix& u, const Matrix& g, double lambda,
                      const ShareSet& set) {
  return (u - project_U(u - lambda * g, set)).norm();
}

MasterResult solve_master(const Game& game, const PenaltyFunction& phi,
                          double tau, const ShareSet& set,
                          const ShareMatrix& u0, const Vector& x0,
                          const MasterConfig& cfg) {
  cfg.validate(phi.cocoercivity());
  if (!(tau > 0.0)) throw ConfigError("solve_master: tau must be positive");
  if (u0.rows() != game.num_players() || u0.cols() != game.num_joint()) {
    throw DimensionError("solve_master: u0 has the wrong shape");
  }

  MasterResult result;
  result.u = project_U(u0, set);
  NepConfig nep_cfg = cfg.nep;

  auto inner = [&](const Vector& start) {
    NepResult nep = solve_nep(game, phi, tau, result.u, start, nep_cfg);
    result.total_nep_iters += nep.iters;
    // Reuse the accepted step as the next trial step; the map's Lipschitz
    // constant only changes with the active penalty pattern.
    nep_cfg.step0 = std::min(cfg.nep.step0, 2.0 * nep.step);
    return nep;
  };

  NepResult nep = inner(x0);
  for (int it = 0;; ++it) {
    result.x = nep.x;
    result.iters = it;
    if (!nep.converged) {
      result.status = MasterStatus::kInnerFailure;
      result.diagnostics = fmt::format(
          "inner Nash solve did not converge at master iteration {} (residual "
          "{:.3g} after {} iterations)",
          it, nep.residual, nep.iters);
      if (result.g.size() == 0) result.g = eval_g(game, phi, result.u, nep.x);
      result.residual_u = share_residual(result.u, result.g, cfg.lambda, set);
      return result;
    }
    result.g = eval_g(game, phi, result.u, nep.x);
    ShareMatrix next = project_U(result.u - cfg.lambda * result.g, set);
    result.residual_u = (next - result.u).norm();
    if (result.residual_u <= cfg.tol_u) {
      result.status = MasterStatus::kConverged;
      return result;
    }
    if (it >= cfg.max_iter) {
      result.status = MasterStatus::kMaxIter;
      result.diagnostics =
          fmt::format("master iteration budget {} exhausted (residual {:.3g})",
                      cfg.max_iter, result.residual_u);
      return result;
    }
    result.u = std::move(next);
    nep = inner(result.x);
  }
}

double master_residual(const Game& game, const PenaltyFunction& phi,
                       double tau, const ShareSet& set, const ShareMatrix& u,
                       const Vector& x0, const MasterConfig& cfg) {
  cfg.validate(phi.cocoercivity());
  const NepResult nep = solve_nep(game, phi, tau, u, x0, cfg.nep);
  if (!nep.converged) {
    throw SolveError(fmt::format(
        "master_residual: inner solve stopped at residual {:.3g}",
        nep.residual));
  }
  return share_residual(u, eval_g(game, phi, u, nep.x), cfg.lambda, set);
}

MultiplierEstimate recover_multipliers(double tau, const Matrix& g) {
  MultiplierEstimate est;
  est.per_player = -tau * g;
  est.shared = est.per_player.colwise().maxCoeff().transpose();
  est.spread = 0.0;
  for (Eigen::Index t = 0; t < g.cols(); ++t) {
    const auto col = est.per_player.col(t);
    est.spread = std::max(est.spread, col.maxCoeff() - col.minCoeff());
  }
  return est;
}

}  // namespace gnep

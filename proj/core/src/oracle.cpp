#include "gnep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace gnep {

namespace {

// Stationarity  M z + q + A^T lambda = mu_lower - mu_upper,
// with A z <= r, lambda >= 0 and lo <= z <= hi.
struct KktProblem {
  Matrix M;
  Vector q;
  Matrix A;
  Vector r;
  Vector lo;
  Vector hi;
};

enum CoordState : int { kFree = 0, kAtLower = 1, kAtUpper = 2 };

struct KktCandidate {
  Vector z;
  Vector lambda;
  std::vector<int> state;
  unsigned mask = 0;
  bool moves = false;  // a kernel direction keeps the candidate valid
  double certificate = 0.0;
};

double scale_of(const KktProblem& p, const Vector& z, const Vector& lambda) {
  double s = 1.0;
  if (z.size()) s = std::max(s, z.lpNorm<Eigen::Infinity>());
  if (lambda.size()) s = std::max(s, lambda.lpNorm<Eigen::Infinity>());
  if (p.r.size()) s = std::max(s, p.r.lpNorm<Eigen::Infinity>());
  if (p.q.size()) s = std::max(s, p.q.lpNorm<Eigen::Infinity>());
  return s;
}

// Largest violation of the KKT conditions for the given active pattern.
double kkt_violation(const KktProblem& p, const Vector& z,
                     const Vector& lambda, const std::vector<int>& state,
                     unsigned mask) {
  const Vector s = p.M * z + p.q + p.A.transpose() * lambda;
  const Vector az = p.A * z;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    switch (state[k]) {
      case kFree:
        worst = std::max({worst, std::abs(s(k)), p.lo(k) - z(k), z(k) - p.hi(k)});
        break;
      case kAtLower:
        worst = std::max({worst, std::abs(z(k) - p.lo(k)), -s(k)});
        break;
      case kAtUpper:
        worst = std::max({worst, std::abs(z(k) - p.hi(k)), s(k)});
        break;
    }
  }
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    if (mask & (1u << j)) {
      worst = std::max({worst, std::abs(az(j) - p.r(j)), -lambda(j)});
    } else {
      worst = std::max({worst, std::abs(lambda(j)), az(j) - p.r(j)});
    }
  }
  return worst;
}

// Visits every valid KKT point over all (joint mask, coordinate state)
// combinations in lexicographic order. Returns the number of combinations.
template <typename Visit>
long enumerate_kkt(const KktProblem& p, double eps, Visit&& visit) {
  const Eigen::Index n = p.q.size();
  const Eigen::Index m = p.r.size();
  const Eigen::Index size = n + m;

  std::vector<std::vector<int>> options(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    options[k].push_back(kFree);
    if (std::isfinite(p.lo(k))) options[k].push_back(kAtLower);
    if (std::isfinite(p.hi(k)) && p.hi(k) > p.lo(k)) {
      options[k].push_back(kAtUpper);
    }
  }

  long count = 0;
  Matrix K(size, size);
  Vector rhs(size);
  std::vector<int> pick(n, 0);
  std::vector<int> state(n, kFree);
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::fill(pick.begin(), pick.end(), 0);
    for (;;) {
      ++count;
      K.setZero();
      rhs.setZero();
      for (Eigen::Index k = 0; k < n; ++k) {
        state[k] = options[k][pick[k]];
        switch (state[k]) {
          case kFree:
            K.row(k).head(n) = p.M.row(k);
            K.row(k).tail(m) = p.A.col(k).transpose();
            rhs(k) = -p.q(k);
            break;
          case kAtLower:
            K(k, k) = 1.0;
            rhs(k) = p.lo(k);
            break;
          case kAtUpper:
            K(k, k) = 1.0;
            rhs(k) = p.hi(k);
            break;
        }
      }
      for (Eigen::Index j = 0; j < m; ++j) {
        if (mask & (1u << j)) {
          K.row(n + j).head(n) = p.A.row(j);
          rhs(n + j) = p.r(j);
        } else {
          K(n + j, n + j) = 1.0;
        }
      }

      Eigen::FullPivLU<Matrix> lu(K);
      const Vector sol = lu.solve(rhs);
      const double consistency =
          (K * sol - rhs).lpNorm<Eigen::Infinity>() /
          std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
      if (sol.allFinite() && consistency <= 1e-9) {
        const Vector z = sol.head(n);
        const Vector lambda = sol.tail(m);
        const double tol = eps * scale_of(p, z, lambda);
        const double viol = kkt_violation(p, z, lambda, state, mask);
        if (viol <= tol) {
          KktCandidate cand{z, lambda, state, mask, false, viol};
          if (!lu.isInvertible()) {
            const Matrix kernel = lu.kernel();
            const double delta = 1e-6 * scale_of(p, z, lambda);
            for (Eigen::Index c = 0; c < kernel.cols() && !cand.moves; ++c) {
              Vector d = kernel.col(c);
              d /= d.lpNorm<Eigen::Infinity>();
              for (double sign : {1.0, -1.0}) {
                const Vector moved = sol + sign * delta * d;
                if (kkt_violation(p, moved.head(n), moved.tail(m), state,
                                  mask) <= tol) {
                  cand.moves = true;
                }
              }
            }
          }
          visit(cand);
        }
      }

      Eigen::Index k = 0;
      for (; k < n; ++k) {
        if (++pick[k] < static_cast<int>(options[k].size())) break;
        pick[k] = 0;
      }
      if (k == n) break;
    }
  }
  return count;
}

bool same_point(const Vector& a, const Vector& b) {
  const double s = 1.0 + std::max(a.lpNorm<Eigen::Infinity>(),
                                  b.lpNorm<Eigen::Infinity>());
  return (a - b).lpNorm<Eigen::Infinity>() <= 1e-8 * s;
}

void check_budget(const Game& game, int dim, const OracleBudget& budget) {
  if (!game.affine_constraints()) {
    throw ConfigError("the KKT oracle requires affine joint constraints");
  }
  if (dim > budget.max_dim || game.num_joint() > budget.max_joint) {
    throw BudgetError(fmt::format(
        "enumeration budget exceeded: n = {} (max {}), m = {} (max {})", dim,
        budget.max_dim, game.num_joint(), budget.max_joint));
  }
}

}  // namespace

GroundTruth oracle_solve(const Game& game, double eps_kkt,
                         const OracleBudget& budget) {
  check_budget(game, game.dim(), budget);
  const int l = game.num_players();
  const int m = game.num_joint();

  KktProblem p;
  p.M = jacobian_F(game);
  p.q.resize(game.dim());
  p.A.resize(m, game.dim());
  p.r = game.joint().b;
  for (int i = 0; i < l; ++i) {
    game.block(p.q, i) = -game.player(i).c;
    p.A.middleCols(game.offset(i), game.player_dim(i)) = game.joint().A[i];
    p.r -= game.joint().a[i];
  }
  p.lo = game.lower();
  p.hi = game.upper();

  std::vector<KktCandidate> found;
  bool continuum = false;
  const long count = enumerate_kkt(p, eps_kkt, [&](const KktCandidate& c) {
    continuum = continuum || c.moves;
    for (const KktCandidate& f : found) {
      if (same_point(f.z, c.z) && same_point(f.lambda, c.lambda)) return;
    }
    found.push_back(c);
  });

  if (found.empty()) {
    throw OracleError(OracleError::Kind::kNoCandidate,
                      fmt::format("no KKT candidate among {} active sets; the "
                                  "feasible set may be empty",
                                  count));
  }
  if (found.size() > 1 || continuum) {
    throw OracleError(
        OracleError::Kind::kNonUnique,
        continuum ? "normalized equilibrium is not unique (singular KKT "
                    "system with a feasible direction)"
                  : fmt::format("{} distinct normalized equilibria found",
                                found.size()));
  }

  const KktCandidate& best = found.front();
  GroundTruth truth;
  truth.x_star = best.z;
  truth.lambda_star = best.lambda;
  truth.certificate_residual = best.certificate;
  truth.candidates = count;
  for (int j = 0; j < m; ++j) {
    if (best.mask & (1u << j)) truth.active_joint.push_back(j);
  }
  truth.active_lower.resize(l);
  truth.active_upper.resize(l);
  for (int i = 0; i < l; ++i) {
    for (int k = 0; k < game.player_dim(i); ++k) {
      const int s = best.state[game.offset(i) + k];
      if (s == kAtLower) truth.active_lower[i].push_back(k);
      if (s == kAtUpper) truth.active_upper[i].push_back(k);
    }
  }
  return truth;
}

GneCheck check_is_gne(const Game& game, const Vector& x, double tol,
                      const OracleBudget& budget) {
  game.require_profile(x, "check_is_gne: x");
  const int l = game.num_players();
  int widest = 0;
  for (int i = 0; i < l; ++i) widest = std::max(widest, game.player_dim(i));
  check_budget(game, widest, budget);

  const Matrix h = eval_h(game, x);
  const Vector total = h.colwise().sum().transpose();
  const Vector slack = joint_residual(game, x);

  GneCheck out;
  out.violation.resize(l);
  for (int i = 0; i < l; ++i) {
    const PlayerSpec& pl = game.player(i);
    KktProblem p;
    p.M = pl.Q;
    Vector linear = pl.c;
    for (const auto& [j, r] : pl.R) linear += r * game.block(x, j);
    p.q = -linear;
    p.A = game.joint().A[i];
    p.r = game.joint().b + slack - game.joint().a[i] -
          (total - h.row(i).transpose());
    p.lo = pl.lower;
    p.hi = pl.upper;

    double best = -std::numeric_limits<double>::infinity();
    enumerate_kkt(p, kEpsKkt, [&](const KktCandidate& c) {
      best = std::max(best, linear.dot(c.z) - 0.5 * c.z.dot(pl.Q * c.z));
    });
    const auto xi = game.block(x, i);
    const double current = linear.dot(xi) - 0.5 * xi.dot(pl.Q * xi);
    out.violation(i) = std::isfinite(best)
                           ? best - current
                           : std::numeric_limits<double>::infinity();
  }
  out.ok = (out.violation.array() <= tol).all();
  return out;
}

}  // namespace gnep

#include "gnep/instances.hpp"

#include <random>
#include <string>

#include <fmt/format.h>

namespace gnep::instances {

namespace {

PlayerSpec scalar_player(double c, double q, double lo, double hi) {
  PlayerSpec p;
  p.n = 1;
  p.c = Vector::Constant(1, c);
  p.Q = Matrix::Constant(1, 1, q);
  p.lower = Vector::Constant(1, lo);
  p.upper = Vector::Constant(1, hi);
  return p;
}

JointConstraintSpec sum_constraint(int players, double b) {
  JointConstraintSpec joint;
  joint.m = 1;
  joint.A.assign(players, Matrix::Ones(1, 1));
  joint.a.assign(players, Vector::Zero(1));
  joint.b = Vector::Constant(1, b);
  return joint;
}

}  // namespace

Game slack() {
  return Game("S0", {scalar_player(1, 1, 0, 10), scalar_player(1, 1, 0, 10)},
              sum_constraint(2, 4.0));
}

Game symmetric_binding() {
  return Game("S1", {scalar_player(1, 1, 0, 10), scalar_player(1, 1, 0, 10)},
              sum_constraint(2, 1.0));
}

Game asymmetric_binding() {
  return Game("S2", {scalar_player(2, 1, 0, 10), scalar_player(1, 1, 0, 10)},
              sum_constraint(2, 1.0));
}

Game adversarial_coupling() {
  PlayerSpec p1 = scalar_player(1, 1, 0, 10);
  PlayerSpec p2 = scalar_player(1, 1, 0, 10);
  p1.R[1] = Matrix::Constant(1, 1, 3.0);
  p2.R[0] = Matrix::Constant(1, 1, 3.0);
  return Game("adversarial", {p1, p2}, sum_constraint(2, 1.0));
}

Game random_game(std::uint64_t seed, const RandomGameOptions& opts) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  auto pick = [&](int a, int b) {
    return std::uniform_int_distribution<int>(a, b)(rng);
  };

  const int l = pick(opts.min_players, opts.max_players);
  const int m = pick(1, opts.max_joint);
  std::vector<PlayerSpec> players(l);
  int n = 0;
  for (PlayerSpec& p : players) {
    p.n = pick(1, opts.max_player_dim);
    n += p.n;
    Matrix B(p.n, p.n);
    for (int r = 0; r < p.n; ++r) {
      for (int c = 0; c < p.n; ++c) B(r, c) = uniform(-0.5, 0.5);
    }
    p.Q = B * B.transpose() + 0.5 * Matrix::Identity(p.n, p.n);
    p.c.resize(p.n);
    for (int k = 0; k < p.n; ++k) p.c(k) = uniform(1.0, 3.0);
    p.lower = Vector::Zero(p.n);
    p.upper = Vector::Constant(p.n, opts.box_upper);
  }

  // Weak coupling; resample until the symmetric part of the Jacobian of F
  // is comfortably positive definite.
  for (;;) {
    for (int i = 0; i < l; ++i) {
      players[i].R.clear();
      for (int j = 0; j < l; ++j) {
        if (j == i) continue;
        Matrix r(players[i].n, players[j].n);
        for (int a = 0; a < r.rows(); ++a) {
          for (int b = 0; b < r.cols(); ++b) r(a, b) = uniform(-0.15, 0.15);
        }
        players[i].R[j] = r;
      }
    }
    JointConstraintSpec dummy = sum_constraint(l, 1.0);
    for (int i = 0; i < l; ++i) dummy.A[i] = Matrix::Ones(1, players[i].n);
    const Matrix jac = jacobian_F(Game("probe", players, dummy));
    const Matrix sym = 0.5 * (jac + jac.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() > 0.1) break;
  }

  JointConstraintSpec joint;
  joint.m = m;
  for (int i = 0; i < l; ++i) {
    Matrix A(m, players[i].n);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < players[i].n; ++c) A(r, c) = uniform(0.2, 1.0);
    }
    joint.A.push_back(A);
    joint.a.push_back(Vector::Zero(m));
  }

  // Unconstrained equilibrium (clamped to the box) sets the scale of b.
  Matrix jac(n, n);
  Vector c(n);
  {
    JointConstraintSpec probe = joint;
    probe.b = Vector::Ones(m);
    const Game g("probe", players, probe);
    jac = jacobian_F(g);
    for (int i = 0; i < l; ++i) g.block(c, i) = players[i].c;
    const Vector x_free = project_X(g, jac.partialPivLu().solve(c));
    Vector load = Vector::Zero(m);
    for (int i = 0; i < l; ++i) load += joint.A[i] * g.block(x_free, i);
    joint.b.resize(m);
    for (int t = 0; t < m; ++t) joint.b(t) = uniform(0.4, 0.8) * load(t);
  }

  return Game(fmt::format("random-{}", seed), std::move(players),
              std::move(joint));
}

}  // namespace gnep::instances

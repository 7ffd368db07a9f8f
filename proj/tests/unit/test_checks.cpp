#include <doctest.h>

#include <cmath>

#include "gnep/checks.hpp"
#include "gnep/error.hpp"
#include "gnep/instances.hpp"
#include "helpers.hpp"

using namespace gnep;
using gnep::test::shares;
using gnep::test::vec;

TEST_CASE("bifunction monotonicity") {
  for (const Game& g : {instances::slack(), instances::symmetric_binding(),
                        instances::asymmetric_binding()}) {
    CAPTURE(g.name());
    CHECK(check_phi_monotone(g, 100, 42) <= kEpsNum);
  }
  // Skew coupling R_12 = -R_21^T keeps the bifunction monotone.
  PlayerSpec p1 = test::scalar_player(1, 1);
  PlayerSpec p2 = test::scalar_player(1, 1);
  p1.R[1] = Matrix::Constant(1, 1, 0.7);
  p2.R[0] = Matrix::Constant(1, 1, -0.7);
  const Game skew("skew", {p1, p2}, test::sum_constraint(2, 1));
  CHECK(check_phi_monotone(skew, 100, 42) <= kEpsNum);
  // Strong cross coupling breaks monotonicity.
  CHECK(check_phi_monotone(instances::adversarial_coupling(), 100, 42) > 0.0);
}

TEST_CASE("monotonicity gap is the symmetric cross-coupling form") {
  // Own quadratic and linear terms cancel in Phi(x, y) + Phi(y, x), leaving
  // sum over i != j of d_i^T R_ij d_j with d = x - y.
  const Game g = instances::random_game(1000);
  BoxSampler sampler(g, 4);
  for (int k = 0; k < 50; ++k) {
    const Vector x = sampler.sample();
    const Vector y = sampler.sample();
    const Vector d = x - y;
    double cross = 0.0;
    for (int i = 0; i < g.num_players(); ++i) {
      for (const auto& [j, r] : g.player(i).R) {
        cross += g.block(d, i).dot(r * g.block(d, j));
      }
    }
    const double gap = eval_phi(g, x, y) + eval_phi(g, y, x);
    CHECK(gap == doctest::Approx(cross).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("the master map is co-coercive") {
  const QuadraticPlusPenalty phi;
  const double eps_cc = 100 * NepConfig{}.tol;
  for (const Game& g : {instances::symmetric_binding(), instances::asymmetric_binding()}) {
    for (double tau : {1.0, 10.0}) {
      const CocoercivityReport r =
          check_G_cocoercive(g, phi, tau, {g.joint().b, {}}, 50, 42);
      CHECK(r.pairs == 50);
      CHECK(r.max_violation <= eps_cc);
    }
  }
  const Game g = instances::random_game(1002);
  const CocoercivityReport r = check_G_cocoercive(g, phi, 10.0, {g.joint().b, {}}, 20, 7);
  CHECK(r.max_violation <= eps_cc);
}

TEST_CASE("analytic gradients agree with finite differences") {
  const QuadraticPlusPenalty phi;
  for (const Game& g : {instances::asymmetric_binding(), instances::random_game(1005)}) {
    BoxSampler sampler(g, 42);
    const ShareSet set{g.joint().b, {}};
    for (int k = 0; k < 50; ++k) {
      const Vector x = sampler.interior_sample();
      const ShareMatrix u = sampler.sample_shares(set);
      CHECK(gradient_check(g, phi, u, x, 1e-6).max() <= 1e-6);
    }
  }
  const Game s1 = instances::symmetric_binding();
  CHECK_THROWS_AS(gradient_check(s1, phi, shares({0.5, 0.5}), vec({0.2, 0.2}), 0.0),
                  ConfigError);
}

TEST_CASE("penalty slopes at the share boundary") {
  const Game s1 = instances::symmetric_binding();
  const QuadraticPlusPenalty phi;
  // h_1(x_1) = u_1 exactly: the quadratic-plus penalty is differentiable there.
  const OneSided at = one_sided_penalty_slopes(s1, phi, 0, vec({0.5}), vec({0.5}), 1e-4);
  CHECK(at.left(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(at.right(0)) <= 1e-4);
  const OneSided past = one_sided_penalty_slopes(s1, phi, 0, vec({0.8}), vec({0.5}), 1e-5);
  CHECK(past.left(0) == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(past.right(0) == doctest::Approx(0.3).epsilon(1e-4));
}

TEST_CASE("penalized bifunction") {
  const Game s1 = instances::symmetric_binding();
  const QuadraticPlusPenalty phi;
  const Vector x = vec({0.75, 0.75});
  const ShareMatrix u = shares({0.5, 0.5});
  CHECK(eval_phi_tau(s1, phi, 1.0, x, u, x, u) == 0.0);
  // Moving to the feasible point removes the penalty 0.0625.
  const double v = eval_phi_tau(s1, phi, 2.0, x, u, vec({0.5, 0.5}), u);
  CHECK(v == doctest::Approx(eval_phi(s1, x, vec({0.5, 0.5})) - 2.0 * 0.0625));
}

TEST_CASE("equivalent forms of the penalized problem") {
  const Game s1 = instances::symmetric_binding();
  const QuadraticPlusPenalty phi;
  const ShareSet set{vec({1}), {}};
  const EquivalenceReport ok = check_penalized_equivalence(
      s1, phi, 1.0, set, vec({0.75, 0.75}), shares({0.5, 0.5}), 1.0, 1000, 42);
  CHECK(ok.x_residual <= 1e-12);
  CHECK(ok.u_residual <= 1e-12);
  CHECK(ok.min_phi_tau >= -1e-9);

  const EquivalenceReport bad = check_penalized_equivalence(
      s1, phi, 1.0, set, vec({0.2, 0.9}), shares({1, 0}), 1.0, 1000, 42);
  CHECK(bad.x_residual > 0.1);
  CHECK(bad.min_phi_tau < 0.0);
}

TEST_CASE("samplers are reproducible and stay in the box") {
  const Game g = instances::random_game(1010);
  BoxSampler a(g, 9);
  BoxSampler b(g, 9);
  for (int k = 0; k < 50; ++k) {
    const Vector x = a.sample();
    CHECK(x == b.sample());
    CHECK(in_X(g, x));
    const Vector y = a.interior_sample(0.1);
    b.interior_sample(0.1);
    CHECK(((y - g.lower()).array() > 0.0).all());
    CHECK(((g.upper() - y).array() > 0.0).all());
  }
}

#include <doctest.h>

#include <random>

#include "gnep/checks.hpp"
#include "gnep/error.hpp"
#include "gnep/instances.hpp"
#include "helpers.hpp"

using namespace gnep;
using gnep::test::vec;

TEST_CASE("payoffs of the canonical instances") {
  const Game s1 = instances::symmetric_binding();
  const Game s2 = instances::asymmetric_binding();
  CHECK(eval_payoff(s1, 0, vec({1, 0})) == doctest::Approx(0.5));
  CHECK(eval_payoff(s1, 1, vec({1, 0})) == doctest::Approx(0.0));
  CHECK(eval_payoff(s2, 0, vec({1, 1})) == doctest::Approx(1.5));
}

TEST_CASE("Nikaido-Isoda bifunction values") {
  const Game s1 = instances::symmetric_binding();
  const Game s2 = instances::asymmetric_binding();
  CHECK(eval_phi(s1, vec({1, 0}), vec({1, 0})) == 0.0);
  CHECK(eval_phi(s1, vec({1, 0}), vec({0.5, 0.5})) == doctest::Approx(-0.25));
  CHECK(eval_phi(s2, vec({1, 0}), vec({0, 1})) == doctest::Approx(1.0));
  CHECK(eval_psi(s1, vec({1, 0}), vec({0.5, 0.5})) == doctest::Approx(0.75));
}

TEST_CASE("pseudo-gradient") {
  const Game s1 = instances::symmetric_binding();
  const Game s2 = instances::asymmetric_binding();
  CHECK(eval_F(s1, vec({0, 0})).isApprox(vec({-1, -1})));
  CHECK(eval_F(s1, vec({1, 1})).norm() == 0.0);
  CHECK(eval_F(s2, vec({2, 1})).norm() == 0.0);

  // F(x) = J x - c with the assembled Jacobian, including cross terms.
  const Game adv = instances::adversarial_coupling();
  const Vector x = vec({0.3, 1.7});
  CHECK(eval_F(adv, x).isApprox(jacobian_F(adv) * x - vec({1, 1})));
  CHECK(eval_F(adv, x)(0) == doctest::Approx(-1 + 0.3 - 3 * 1.7));
}

TEST_CASE("joint constraint values and residual") {
  const Game s0 = instances::slack();
  const Game s1 = instances::symmetric_binding();
  const Matrix h = eval_h(s1, vec({0.5, 0.5}));
  CHECK(h.rows() == 2);
  CHECK(h.cols() == 1);
  CHECK(h(0, 0) == 0.5);
  CHECK(h(1, 0) == 0.5);
  CHECK(joint_residual(s1, vec({0.5, 0.5}))(0) == 0.0);
  CHECK(joint_residual(s1, vec({1, 1}))(0) == doctest::Approx(1.0));
  CHECK(joint_residual(s0, vec({1, 1}))(0) == 0.0);
}

TEST_CASE("box projection") {
  const Game s1 = instances::symmetric_binding();
  CHECK(project_X(s1, vec({-1, 11})) == vec({0, 10}));
  CHECK(project_X(s1, vec({0.3, 0.7})) == vec({0.3, 0.7}));
  CHECK(project_X(s1, vec({10, 10})) == vec({10, 10}));
  CHECK(in_X(s1, vec({0, 10})));
  CHECK_FALSE(in_X(s1, vec({-1e-3, 1})));
}

TEST_CASE("dimension mismatches are reported") {
  const Game s1 = instances::symmetric_binding();
  CHECK_THROWS_AS(eval_payoff(s1, 0, vec({1})), DimensionError);
  CHECK_THROWS_AS(eval_phi(s1, vec({1, 0}), vec({1, 0, 0})), DimensionError);
  CHECK_THROWS_AS(eval_F(s1, vec({1, 0, 2})), DimensionError);
  CHECK_THROWS_AS(eval_h(s1, vec({1})), DimensionError);
  CHECK_THROWS_AS(project_X(s1, vec({1})), DimensionError);
}

TEST_CASE("construction rejects malformed data") {
  using test::scalar_player;
  using test::sum_constraint;
  CHECK_THROWS_AS(Game("none", {}, sum_constraint(0, 1)), ConfigError);

  PlayerSpec wide = scalar_player(1, 1);
  wide.c = vec({1, 2});
  CHECK_THROWS_AS(Game("g", {wide, scalar_player(1, 1)}, sum_constraint(2, 1)),
                  DimensionError);

  JointConstraintSpec joint = sum_constraint(2, 1);
  joint.A[1] = Matrix::Ones(2, 1);
  CHECK_THROWS_AS(
      Game("g", {scalar_player(1, 1), scalar_player(1, 1)}, joint),
      DimensionError);

  PlayerSpec bad_r = scalar_player(1, 1);
  bad_r.R[5] = Matrix::Ones(1, 1);
  CHECK_THROWS(Game("g", {bad_r, scalar_player(1, 1)}, sum_constraint(2, 1)));
}

TEST_CASE("validation of the standing assumptions") {
  using test::scalar_player;
  using test::sum_constraint;
  CHECK(validate_game(instances::symmetric_binding()).empty());

  SUBCASE("negative curvature is a hard error") {
    const Game g("neg", {scalar_player(1, -1), scalar_player(1, 1)},
                 sum_constraint(2, 1));
    CHECK_THROWS_AS(validate_game(g), ConfigError);
  }
  SUBCASE("zero curvature only warns") {
    const Game g("flat", {scalar_player(1, 0), scalar_player(1, 1)},
                 sum_constraint(2, 1));
    const auto findings = validate_game(g);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].severity == Severity::kWarning);
    CHECK(findings[0].message.find("NEP solution may be non-unique") !=
          std::string::npos);
  }
  SUBCASE("lower above upper") {
    const Game g("box", {scalar_player(1, 1, 5, 1), scalar_player(1, 1)},
                 sum_constraint(2, 1));
    CHECK_THROWS_WITH_AS(validate_game(g), doctest::Contains("bad-box"),
                         ConfigError);
  }
  SUBCASE("asymmetric Q") {
    PlayerSpec p;
    p.n = 2;
    p.c = vec({1, 1});
    p.Q = Matrix{{1, 0.5}, {0, 1}};
    p.lower = vec({0, 0});
    p.upper = vec({1, 1});
    JointConstraintSpec joint = sum_constraint(2, 1);
    joint.A[0] = Matrix::Ones(1, 2);
    const Game g("asym", {p, scalar_player(1, 1)}, joint);
    CHECK_THROWS_WITH_AS(validate_game(g), doctest::Contains("asymmetric-Q"),
                         ConfigError);
  }
  SUBCASE("nonconvex quadratic constraint") {
    JointConstraintSpec joint = sum_constraint(2, 1);
    joint.C = {{Matrix::Constant(1, 1, -1.0)}, {Matrix::Zero(1, 1)}};
    const Game g("ncvx", {scalar_player(1, 1), scalar_player(1, 1)}, joint);
    CHECK_THROWS_WITH_AS(validate_game(g),
                         doctest::Contains("nonconvex-constraint"), ConfigError);
  }
  SUBCASE("empty common feasible set") {
    const Game g("empty", {scalar_player(1, 1, 1, 2), scalar_player(1, 1, 1, 2)},
                 sum_constraint(2, 1));
    CHECK_THROWS_WITH_AS(validate_game(g),
                         doctest::Contains("empty-feasible-set"), ConfigError);
  }
  SUBCASE("unbounded box without strict concavity warns") {
    const double inf = std::numeric_limits<double>::infinity();
    const Game g("open", {scalar_player(1, 0, -inf, inf), scalar_player(1, 1)},
                 sum_constraint(2, 1));
    const auto findings = validate_game(g);
    bool flagged = false;
    for (const auto& f : findings) {
      flagged = flagged || f.code == "existence-not-certified";
    }
    CHECK(flagged);
  }
}

TEST_CASE("quadratic joint constraints") {
  using test::scalar_player;
  JointConstraintSpec joint = test::sum_constraint(2, 2);
  joint.C = {{Matrix::Constant(1, 1, 1.0)}, {Matrix::Zero(1, 1)}};
  const Game g("quad", {scalar_player(1, 1), scalar_player(1, 1)}, joint);
  CHECK_FALSE(g.affine_constraints());
  CHECK(eval_h_i(g, 0, vec({2}))(0) == doctest::Approx(6.0));  // 2 + 4
  CHECK(jacobian_h_i(g, 0, vec({2}))(0, 0) == doctest::Approx(5.0));
  CHECK(validate_game(g).empty());
}

TEST_CASE("bifunction properties on sampled profiles") {
  for (const Game& g : {instances::symmetric_binding(),
                        instances::asymmetric_binding(),
                        instances::adversarial_coupling(),
                        instances::random_game(7)}) {
    CAPTURE(g.name());
    BoxSampler sampler(g, 11);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
      const Vector x = sampler.sample();
      const Vector y = sampler.sample();
      const Vector z = sampler.sample();
      CHECK(std::abs(eval_phi(g, x, x)) <= 1e-12);

      // Phi(x, .) is convex.
      const double t = unit(rng);
      const double lhs = eval_phi(g, x, t * y + (1 - t) * z);
      const double rhs = t * eval_phi(g, x, y) + (1 - t) * eval_phi(g, x, z);
      CHECK(lhs <= rhs + kEpsNum * (1 + std::abs(rhs)));

      // Projection is idempotent and nonexpansive.
      const Vector wide_y = (3.0 * y.array() - 5.0).matrix();
      const Vector wide_z = (-2.0 * z.array() + 4.0).matrix();
      const Vector py = project_X(g, wide_y);
      CHECK(project_X(g, py) == py);
      CHECK((project_X(g, wide_y) - project_X(g, wide_z)).norm() <=
            (wide_y - wide_z).norm() + 1e-15);
    }
  }
}

TEST_CASE("pseudo-gradient matches finite differences of the bifunction") {
  const Game g = instances::random_game(3);
  BoxSampler sampler(g, 5);
  for (int k = 0; k < 50; ++k) {
    const Vector x = sampler.interior_sample();
    const Vector F = eval_F(g, x);
    const double h = 1e-6;
    for (int c = 0; c < g.dim(); ++c) {
      Vector up = x, down = x;
      up(c) += h;
      down(c) -= h;
      const double fd = (eval_phi(g, x, up) - eval_phi(g, x, down)) / (2 * h);
      CHECK(std::abs(fd - F(c)) / std::max(1.0, std::abs(F(c))) <= 1e-6);
    }
  }
}

TEST_CASE("game equality") {
  CHECK(instances::symmetric_binding() == instances::symmetric_binding());
  CHECK_FALSE(instances::symmetric_binding() == instances::slack());
  CHECK(instances::random_game(4) == instances::random_game(4));
}

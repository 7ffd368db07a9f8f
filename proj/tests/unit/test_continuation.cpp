#include <doctest.h>

#include "gnep/continuation.hpp"
#include "gnep/error.hpp"
#include "gnep/instances.hpp"
#include "gnep/oracle.hpp"
#include "helpers.hpp"

using namespace gnep;
using gnep::test::shares;
using gnep::test::vec;

namespace {

ContinuationConfig schedule(int k_max) {
  ContinuationConfig cfg;
  cfg.schedule = {1.0, 10.0, k_max};
  return cfg;
}

}  // namespace

TEST_CASE("schedule") {
  const TauSchedule s{2.0, 10.0, 3};
  CHECK(s.tau(0) == 2.0);
  CHECK(s.tau(3) == doctest::Approx(2000.0));
  CHECK_NOTHROW(s.validate());
  CHECK_NOTHROW((TauSchedule{1.0, 10.0, 0}.validate()));
  CHECK_THROWS_AS((TauSchedule{0.0, 10.0, 3}.validate()), ConfigError);
  CHECK_THROWS_AS((TauSchedule{1.0, 1.0, 3}.validate()), ConfigError);
  CHECK_THROWS_AS((TauSchedule{1.0, 10.0, -1}.validate()), ConfigError);
}

TEST_CASE("penalty error decays like the closed form on the symmetric instance") {
  const auto& path = test::frozen()["S1_path"];
  const Game s1 = instances::symmetric_binding();
  const QuadraticPlusPenalty phi;
  const GnepReport r = solve_gnep(s1, phi, {vec({1}), {}}, schedule(3),
                                  shares({0.5, 0.5}));
  REQUIRE(r.stages.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const StageRecord& s = r.stages[k];
    CHECK(s.tau == path["tau"][k].get<double>());
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(std::abs(s.master.x(i) - 0.5) -
                     path["error"][k].get<double>()) <= 1e-6);
    }
    CHECK(s.penalty == doctest::Approx(path["P"][k].get<double>()).epsilon(1e-6));
  }
  CHECK((r.x - vec({0.5, 0.5})).lpNorm<Eigen::Infinity>() <= 1e-3);
  CHECK(r.status == GnepStatus::kConverged);
}

TEST_CASE("slack instance converges at the first stage") {
  const Game s0 = instances::slack();
  const QuadraticPlusPenalty phi;
  const GnepReport r = solve_gnep(s0, phi, {vec({4}), {}}, schedule(5));
  REQUIRE(r.stages.size() == 1);
  CHECK(r.status == GnepStatus::kConverged);
  CHECK((r.x - vec({1, 1})).norm() <= 1e-8);
  CHECK(r.stages[0].penalty == 0.0);
  CHECK(r.lambda_hat(0) == 0.0);
  for (const auto& [tau, p] : feasibility_trace(r)) CHECK(p == 0.0);
}

TEST_CASE("asymmetric instance reaches the oracle point") {
  const auto& ref = test::frozen()["S2"];
  const Game s2 = instances::asymmetric_binding();
  const QuadraticPlusPenalty phi;
  const GnepReport r = solve_gnep(s2, phi, {vec({1}), {}}, schedule(4));
  CHECK((r.x - test::to_vector(ref["x"])).lpNorm<Eigen::Infinity>() <= 1e-2);
  CHECK(std::abs(r.lambda_hat(0) - ref["lambda"][0].get<double>()) <= 1e-2);
  CHECK(r.stages.back().penalty <= 1e-6);
}

TEST_CASE("feasibility trace decreases and spreads shrink") {
  const QuadraticPlusPenalty phi;
  for (std::uint64_t seed : {1001, 1007}) {
    const Game g = instances::random_game(seed);
    const GnepReport r = solve_gnep(g, phi, {g.joint().b, {}}, schedule(4));
    const auto trace = feasibility_trace(r);
    REQUIRE(trace.size() == r.stages.size());
    for (std::size_t k = 1; k < trace.size(); ++k) {
      CHECK(trace[k].first > trace[k - 1].first);
      CHECK(trace[k].second <= trace[k - 1].second + 1e-12);
    }
    for (const StageRecord& s : r.stages) CHECK(in_X(g, s.master.x));
    CHECK(r.stages.back().multipliers.spread <= 1e-3);
  }
}

TEST_CASE("shares stay on the hyperplane at every stage") {
  const Game g = instances::random_game(1003);
  const QuadraticPlusPenalty phi;
  const GnepReport r = solve_gnep(g, phi, {g.joint().b, {}}, schedule(2));
  for (const StageRecord& s : r.stages) {
    CHECK((s.master.u.colwise().sum().transpose() - g.joint().b)
              .lpNorm<Eigen::Infinity>() <= kEpsAff);
  }
}

TEST_CASE("budget exhaustion keeps every stage") {
  const Game s1 = instances::symmetric_binding();
  const QuadraticPlusPenalty phi;
  const GnepReport r = solve_gnep(s1, phi, {vec({1}), {}}, schedule(1));
  CHECK(r.status == GnepStatus::kBudgetExhausted);
  CHECK(r.stages.size() == 2);
  CHECK(r.x == r.stages.back().master.x);
}

TEST_CASE("inner failure keeps the trace and reports the last good stage") {
  const Game g = instances::random_game(1000);
  const QuadraticPlusPenalty phi;
  ContinuationConfig cfg = schedule(4);
  cfg.master.nep.max_iter = 400;
  const GnepReport r = solve_gnep(g, phi, {g.joint().b, {}}, cfg);
  REQUIRE(r.status == GnepStatus::kInnerFailure);
  const StageRecord& failed = r.stages.back();
  CHECK(failed.master.status == MasterStatus::kInnerFailure);
  if (r.stages.size() > 1) {
    CHECK(r.x == r.stages[r.stages.size() - 2].master.x);
  }
}

TEST_CASE("status names") {
  CHECK(to_string(GnepStatus::kConverged) == "converged");
  CHECK(to_string(GnepStatus::kBudgetExhausted) == "budget-exhausted");
  CHECK(to_string(GnepStatus::kInnerFailure) == "inner-failure");
}

TEST_CASE("runs are deterministic") {
  const Game g = instances::random_game(1004);
  const QuadraticPlusPenalty phi;
  const GnepReport a = solve_gnep(g, phi, {g.joint().b, {}}, schedule(2));
  const GnepReport b = solve_gnep(g, phi, {g.joint().b, {}}, schedule(2));
  REQUIRE(a.stages.size() == b.stages.size());
  for (std::size_t k = 0; k < a.stages.size(); ++k) {
    CHECK(a.stages[k].master.x == b.stages[k].master.x);
    CHECK(a.stages[k].master.u == b.stages[k].master.u);
    CHECK(a.stages[k].master.total_nep_iters == b.stages[k].master.total_nep_iters);
  }
}

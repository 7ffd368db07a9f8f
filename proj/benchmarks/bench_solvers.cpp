#include <benchmark/benchmark.h>

#include <cmath>

#include "gnep/continuation.hpp"
#include "gnep/instances.hpp"
#include "gnep/master_vi.hpp"
#include "gnep/nep_solver.hpp"
#include "gnep/oracle.hpp"

namespace {

using namespace gnep;

ShareMatrix even_split(const Game& g) {
  return project_U(ShareMatrix::Zero(g.num_players(), g.num_joint()),
                   {g.joint().b, {}});
}

// Inner Nash solve from the lower corner; argument is log10(tau).
void BM_NashSolve(benchmark::State& state) {
  const Game g = instances::random_game(1000);
  const QuadraticPlusPenalty phi;
  const double tau = std::pow(10.0, static_cast<double>(state.range(0)));
  const ShareMatrix u = even_split(g);
  int iters = 0;
  for (auto _ : state) {
    const NepResult r = solve_nep(g, phi, tau, u, g.lower(), {});
    iters = r.iters;
    benchmark::DoNotOptimize(r.x.data());
  }
  state.counters["iters"] = iters;
}
BENCHMARK(BM_NashSolve)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_MasterSolve(benchmark::State& state) {
  const Game g = instances::random_game(1000);
  const QuadraticPlusPenalty phi;
  const double tau = std::pow(10.0, static_cast<double>(state.range(0)));
  const ShareMatrix u = even_split(g);
  for (auto _ : state) {
    const MasterResult r =
        solve_master(g, phi, tau, {g.joint().b, {}}, u, g.lower(), {});
    benchmark::DoNotOptimize(r.u.data());
  }
}
BENCHMARK(BM_MasterSolve)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Continuation(benchmark::State& state) {
  const Game g = instances::random_game(1000 + state.range(0));
  const QuadraticPlusPenalty phi;
  ContinuationConfig cfg;
  cfg.schedule = {1.0, 10.0, 4};
  for (auto _ : state) {
    const GnepReport r = solve_gnep(g, phi, {g.joint().b, {}}, cfg);
    benchmark::DoNotOptimize(r.x.data());
  }
}
BENCHMARK(BM_Continuation)->Arg(0)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const Game g = instances::random_game(1000 + state.range(0));
  for (auto _ : state) {
    const GroundTruth t = oracle_solve(g);
    benchmark::DoNotOptimize(t.x_star.data());
  }
}
BENCHMARK(BM_Oracle)->Arg(0)->Arg(7)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

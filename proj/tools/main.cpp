#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "app.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Generalized Nash equilibrium solver (penalty decomposition)"};
  cli.require_subcommand(1);

  std::vector<std::string> overrides;
  auto add_set = [&](CLI::App* sub) {
    sub->add_option("--set", overrides,
                    "Override a document field, e.g. schedule.k_max=3")
        ->type_name("KEY=VALUE");
  };

  gnep::app::SolveOptions solve;
  auto* solve_cmd = cli.add_subcommand("solve", "Run the penalty continuation");
  solve_cmd->add_option("path", solve.path, "Problem document")->required();
  solve_cmd->add_option("--out-dir", solve.out_dir, "Directory for outputs");
  add_set(solve_cmd);

  std::filesystem::path oracle_path;
  auto* oracle_cmd =
      cli.add_subcommand("oracle", "Exact normalized equilibrium by KKT enumeration");
  oracle_cmd->add_option("path", oracle_path, "Problem document")->required();
  add_set(oracle_cmd);

  gnep::app::CheckOptions check;
  double tau = 0.0;
  auto* check_cmd = cli.add_subcommand("check", "Run a property battery");
  check_cmd->add_option("path", check.path, "Problem document")->required();
  check_cmd->add_option("kind", check.kind, "monotone | cocoercive | gradients | gne")
      ->required()
      ->check(CLI::IsMember({"monotone", "cocoercive", "gradients", "gne"}));
  check_cmd->add_option("N", check.samples, "Number of samples")->required();
  check_cmd->add_option("seed", check.seed, "Sampler seed")->required();
  auto* tau_opt =
      check_cmd->add_option("--tau", tau, "Penalty parameter for cocoercive");
  add_set(check_cmd);

  std::vector<std::filesystem::path> bench_paths;
  std::filesystem::path bench_out = ".";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* bench_cmd = cli.add_subcommand("bench", "Solve several documents concurrently");
  bench_cmd->add_option("paths", bench_paths, "Problem documents")->required();
  bench_cmd->add_option("--out-dir", bench_out, "Directory for outputs");
  bench_cmd->add_option("--jobs", jobs, "Worker threads");
  add_set(bench_cmd);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : gnep::app::kConfigError;
  }

  gnep::app::configure_logging(std::getenv("GNEP_LOG"));

  if (*solve_cmd) {
    solve.overrides = overrides;
    return gnep::app::run_solve(solve, std::cout, std::cerr);
  }
  if (*oracle_cmd) {
    return gnep::app::run_oracle(oracle_path, overrides, std::cout, std::cerr);
  }
  if (*check_cmd) {
    check.overrides = overrides;
    if (*tau_opt) check.tau = tau;
    return gnep::app::run_check(check, std::cout, std::cerr);
  }
  return gnep::app::run_bench(bench_paths, overrides, bench_out, jobs,
                              std::cout, std::cerr);
}

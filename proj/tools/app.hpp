#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gnep::app {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kBudgetExhausted = 2,
  kInnerFailure = 3,
  kOracleBudget = 4,
  kCheckFailed = 5,
};

/// Sets the spdlog default logger to stderr with the level named by
/// GNEP_LOG (quiet, info or debug). Unknown values fall back to info.
void configure_logging(const char* level);

struct SolveOptions {
  std::filesystem::path path;
  std::vector<std::string> overrides;
  std::filesystem::path out_dir = ".";
};

/// Writes <out_dir>/<name>.trace.csv and <out_dir>/<name>.summary.json and
/// prints the summary to `out`.
int run_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);

int run_oracle(const std::filesystem::path& path,
               const std::vector<std::string>& overrides, std::ostream& out,
               std::ostream& err);

struct CheckOptions {
  std::filesystem::path path;
  std::vector<std::string> overrides;
  std::string kind;  // monotone | cocoercive | gradients | gne
  int samples = 100;
  std::uint64_t seed = 42;
  std::optional<double> tau;  // cocoercive only; defaults to schedule.tau0
};

int run_check(const CheckOptions& opts, std::ostream& out, std::ostream& err);

/// Solves several documents concurrently; returns the largest exit code.
int run_bench(const std::vector<std::filesystem::path>& paths,
              const std::vector<std::string>& overrides,
              const std::filesystem::path& out_dir, unsigned jobs,
              std::ostream& out, std::ostream& err);

}  // namespace gnep::app

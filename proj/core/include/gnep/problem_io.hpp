#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gnep/continuation.hpp"

namespace gnep {

struct SolverSettings {
  double tol_u = 1e-8;
  double eps_nep = 1e-9;
  double lambda = 1.0;
  double eps_feas = 1e-6;
  double eps_eq = 1e-4;
  int max_iter_master = 500000;
  int max_iter_nep = 50000;
  std::uint64_t seed = 42;
};

/// A parsed and validated problem document.
struct ProblemDocument {
  Game game;
  ShareFlags shares;
  std::string penalty_kind = "quadratic_plus";
  TauSchedule schedule;
  SolverSettings solver;
  std::vector<Finding> warnings;  // from validation; never hard errors

  ShareSet share_set() const;
  ContinuationConfig continuation() const;
};

/// Builds a document from JSON. Unknown keys, wrong types and invalid game
/// data raise ConfigError naming the offending field.
ProblemDocument parse_problem(const nlohmann::json& doc);

nlohmann::json to_json(const ProblemDocument& doc);

/// Applies a dotted-path assignment such as "schedule.k_max=0". The value
/// is read as JSON when it parses, otherwise as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

nlohmann::json read_json_file(const std::filesystem::path& path);

ProblemDocument load_problem(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// CSV trace: one row per continuation stage.
void write_trace_csv(std::ostream& out, const Game& game,
                     const GnepReport& report);

nlohmann::json summary_json(const GnepReport& report, const Game& game,
                            const PenaltyFunction& phi);

/// Shortest representation with 17 significant digits.
std::string format_real(double value);

}  // namespace gnep

#include "app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gnep/checks.hpp"
#include "gnep/oracle.hpp"
#include "gnep/problem_io.hpp"

namespace gnep::app {

using nlohmann::json;

namespace {

constexpr double kGradientTol = 1e-6;
constexpr double kGradientStep = 1e-6;
constexpr double kGneTol = 1e-4;

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::string file_stem(const std::string& name) {
  std::string out = name.empty() ? std::string("problem") : name;
  for (char& c : out) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                      c == '.';
    if (!keep) c = '_';
  }
  return out;
}

int exit_for(GnepStatus status) {
  switch (status) {
    case GnepStatus::kConverged:
      return kOk;
    case GnepStatus::kBudgetExhausted:
      return kBudgetExhausted;
    case GnepStatus::kInnerFailure:
      return kInnerFailure;
  }
  return kInnerFailure;
}

// Maps library exceptions onto exit codes; anything else propagates.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kOracleBudget;
  } catch (const SolveError& e) {
    err << "error: " << e.what() << '\n';
    return kInnerFailure;
  } catch (const OracleError& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

ProblemDocument load(const std::filesystem::path& path,
                     const std::vector<std::string>& overrides) {
  ProblemDocument doc = load_problem(path, overrides);
  for (const Finding& f : doc.warnings) {
    spdlog::warn("{}: {} ({})", doc.game.name(), f.message, f.code);
  }
  return doc;
}

GnepReport solve_document(const ProblemDocument& doc) {
  const auto phi = make_penalty(doc.penalty_kind);
  return solve_gnep(doc.game, *phi, doc.share_set(), doc.continuation());
}

json check_monotone(const ProblemDocument& doc, const CheckOptions& opts,
                    bool& ok) {
  const double worst = check_phi_monotone(doc.game, opts.samples, opts.seed);
  ok = worst <= kEpsNum;
  return {{"max_violation", worst}, {"tolerance", kEpsNum}};
}

json check_cocoercive(const ProblemDocument& doc, const CheckOptions& opts,
                      bool& ok) {
  const auto phi = make_penalty(doc.penalty_kind);
  const double tau = opts.tau.value_or(doc.schedule.tau0);
  NepConfig nep;
  nep.tol = doc.solver.eps_nep;
  nep.max_iter = doc.solver.max_iter_nep;
  const CocoercivityReport r = check_G_cocoercive(
      doc.game, *phi, tau, doc.share_set(), opts.samples, opts.seed, nep);
  const double tol = 100.0 * doc.solver.eps_nep;
  ok = r.max_violation <= tol;
  return {{"tau", tau},
          {"pairs", r.pairs},
          {"max_violation", r.max_violation},
          {"tolerance", tol}};
}

json check_gradients(const ProblemDocument& doc, const CheckOptions& opts,
                     bool& ok) {
  const auto phi = make_penalty(doc.penalty_kind);
  BoxSampler sampler(doc.game, opts.seed);
  GradientCheckReport worst;
  for (int k = 0; k < opts.samples; ++k) {
    const Vector x = sampler.interior_sample();
    const ShareMatrix u = sampler.sample_shares(doc.share_set());
    const GradientCheckReport r =
        gradient_check(doc.game, *phi, u, x, kGradientStep);
    worst.F_error = std::max(worst.F_error, r.F_error);
    worst.penalty_error = std::max(worst.penalty_error, r.penalty_error);
    worst.phi_error = std::max(worst.phi_error, r.phi_error);
  }
  ok = worst.max() <= kGradientTol;
  return {{"F", worst.F_error},
          {"penalty_grad_x", worst.penalty_error},
          {"phi_grad", worst.phi_error},
          {"tolerance", kGradientTol}};
}

json check_gne(const ProblemDocument& doc, bool& ok) {
  const GnepReport report = solve_document(doc);
  const GneCheck r = check_is_gne(doc.game, report.x, kGneTol);
  ok = r.ok;
  return {{"status", std::string(to_string(report.status))},
          {"x", to_std(report.x)},
          {"violation", to_std(r.violation)},
          {"multiplier_spread", report.stages.back().multipliers.spread},
          {"tolerance", kGneTol}};
}

}  // namespace

void configure_logging(const char* level) {
  auto logger = spdlog::stderr_color_mt("gnep");
  spdlog::set_default_logger(logger);
  const std::string_view name = level ? level : "info";
  if (name == "quiet") {
    spdlog::set_level(spdlog::level::err);
  } else if (name == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    if (name != "info") {
      spdlog::warn("GNEP_LOG='{}' not recognised; using info", name);
    }
    spdlog::set_level(spdlog::level::info);
  }
}

int run_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemDocument doc = load(opts.path, opts.overrides);
    const auto phi = make_penalty(doc.penalty_kind);
    const GnepReport report =
        solve_gnep(doc.game, *phi, doc.share_set(), doc.continuation());

    std::filesystem::create_directories(opts.out_dir);
    const std::string stem = file_stem(doc.game.name());
    const auto trace_path = opts.out_dir / (stem + ".trace.csv");
    const auto summary_path = opts.out_dir / (stem + ".summary.json");
    json summary = summary_json(report, doc.game, *phi);
    {
      std::ofstream trace(trace_path, std::ios::binary);
      write_trace_csv(trace, doc.game, report);
      if (!trace) throw Error("cannot write " + trace_path.string());
    }
    {
      std::ofstream s(summary_path, std::ios::binary);
      s << summary.dump(2) << '\n';
      if (!s) throw Error("cannot write " + summary_path.string());
    }
    summary["trace"] = trace_path.string();
    out << summary.dump(2) << '\n';
    return exit_for(report.status);
  });
}

int run_oracle(const std::filesystem::path& path,
               const std::vector<std::string>& overrides, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    const ProblemDocument doc = load(path, overrides);
    const GroundTruth truth = oracle_solve(doc.game);
    out << json{{"name", doc.game.name()},
                {"x", to_std(truth.x_star)},
                {"lambda", to_std(truth.lambda_star)},
                {"active_joint", truth.active_joint},
                {"active_lower", truth.active_lower},
                {"active_upper", truth.active_upper},
                {"certificate_residual", truth.certificate_residual},
                {"candidates", truth.candidates}}
               .dump(2)
        << '\n';
    return kOk;
  });
}

int run_check(const CheckOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.samples < 1) throw ConfigError("check: N must be >= 1");
    const ProblemDocument doc = load(opts.path, opts.overrides);
    bool ok = false;
    json result;
    if (opts.kind == "monotone") {
      result = check_monotone(doc, opts, ok);
    } else if (opts.kind == "cocoercive") {
      result = check_cocoercive(doc, opts, ok);
    } else if (opts.kind == "gradients") {
      result = check_gradients(doc, opts, ok);
    } else if (opts.kind == "gne") {
      result = check_gne(doc, ok);
    } else {
      throw ConfigError(fmt::format(
          "unknown check '{}' (expected monotone, cocoercive, gradients or gne)",
          opts.kind));
    }
    result["check"] = opts.kind;
    result["name"] = doc.game.name();
    result["pass"] = ok;
    out << result.dump(2) << '\n';
    return ok ? kOk : kCheckFailed;
  });
}

int run_bench(const std::vector<std::filesystem::path>& paths,
              const std::vector<std::string>& overrides,
              const std::filesystem::path& out_dir, unsigned jobs,
              std::ostream& out, std::ostream& err) {
  struct Outcome {
    int code = 0;
    double seconds = 0.0;
    std::string log;
  };
  std::vector<Outcome> outcomes(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < paths.size(); k = next++) {
      std::ostringstream sink, diag;
      const auto t0 = std::chrono::steady_clock::now();
      outcomes[k].code = run_solve({paths[k], overrides, out_dir}, sink, diag);
      outcomes[k].seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
      outcomes[k].log = diag.str();
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, paths.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  int worst = kOk;
  out << "document,exit,seconds\n";
  for (std::size_t k = 0; k < paths.size(); ++k) {
    out << paths[k].string() << ',' << outcomes[k].code << ','
        << fmt::format("{:.3f}", outcomes[k].seconds) << '\n';
    err << outcomes[k].log;
    worst = std::max(worst, outcomes[k].code);
  }
  return worst;
}

}  // namespace gnep::app

#include "gnep/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "gnep/error.hpp"

namespace gnep {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(fmt::format("{}: {}", path.empty() ? "<root>" : path, msg));
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

std::string index(const std::string& path, std::size_t i) {
  return fmt::format("{}[{}]", path, i);
}

const json& require_object(const json& j, const std::string& path,
                           std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string_view> keys(allowed);
  for (const auto& [key, _] : j.items()) {
    if (!keys.count(key)) fail(join(path, key), "unknown key");
  }
  return j;
}

const json& member(const json& j, const std::string& path,
                   std::string_view key) {
  auto it = j.find(key);
  if (it == j.end()) fail(join(path, key), "missing required key");
  return *it;
}

double read_real(const json& j, const std::string& path, double inf_null) {
  if (j.is_number()) return j.get<double>();
  if (j.is_null() && inf_null != 0.0) return inf_null;
  if (j.is_string() && inf_null != 0.0) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
  }
  fail(path, inf_null != 0.0 ? "expected a number, null or \"inf\"/\"-inf\""
                             : "expected a number");
}

double read_real(const json& j, const std::string& path) {
  return read_real(j, path, 0.0);
}

long long read_int(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::floor(v) == v) return static_cast<long long>(v);
  }
  fail(path, "expected an integer");
}

bool read_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

Vector read_vector(const json& j, const std::string& path,
                   double inf_null = 0.0) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v(k) = read_real(j[k], index(path, k), inf_null);
  }
  return v;
}

Matrix read_matrix(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a row-major array of arrays");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  if (rows > 0) {
    if (!j[0].is_array()) fail(index(path, 0), "expected an array");
    cols = j[0].size();
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = index(path, r);
    if (!j[r].is_array() || j[r].size() != cols) {
      fail(rp, fmt::format("expected a row of length {}", cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = read_real(j[r][c], index(rp, c));
    }
  }
  return m;
}

json write_vector(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::isinf(v(k))) {
      out.push_back(v(k) > 0 ? "inf" : "-inf");
    } else {
      out.push_back(v(k));
    }
  }
  return out;
}

json write_matrix(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out.push_back(write_vector(m.row(r).transpose()));
  }
  return out;
}

PlayerSpec parse_player(const json& j, const std::string& path) {
  require_object(j, path, {"n", "c", "Q", "R", "lower", "upper"});
  PlayerSpec p;
  p.n = static_cast<int>(read_int(member(j, path, "n"), join(path, "n")));
  p.c = read_vector(member(j, path, "c"), join(path, "c"));
  p.Q = read_matrix(member(j, path, "Q"), join(path, "Q"));
  p.lower = read_vector(member(j, path, "lower"), join(path, "lower"), -kInf);
  p.upper = read_vector(member(j, path, "upper"), join(path, "upper"), kInf);
  if (auto it = j.find("R"); it != j.end()) {
    const std::string rp = join(path, "R");
    if (!it->is_object()) fail(rp, "expected an object keyed by player index");
    for (const auto& [key, value] : it->items()) {
      int opponent = -1;
      try {
        std::size_t used = 0;
        opponent = std::stoi(key, &used);
        if (used != key.size()) opponent = -1;
      } catch (const std::exception&) {
        opponent = -1;
      }
      if (opponent < 0) fail(join(rp, key), "key must be a player index");
      p.R[opponent] = read_matrix(value, join(rp, key));
    }
  }
  return p;
}

JointConstraintSpec parse_joint(const json& j, const std::string& path,
                                int players) {
  require_object(j, path, {"m", "A", "a", "C", "b"});
  JointConstraintSpec joint;
  joint.m = static_cast<int>(read_int(member(j, path, "m"), join(path, "m")));
  joint.b = read_vector(member(j, path, "b"), join(path, "b"));

  const std::string ap = join(path, "A");
  const json& a_mats = member(j, path, "A");
  if (!a_mats.is_array()) fail(ap, "expected one matrix per player");
  for (std::size_t i = 0; i < a_mats.size(); ++i) {
    joint.A.push_back(read_matrix(a_mats[i], index(ap, i)));
  }

  if (auto it = j.find("a"); it != j.end()) {
    const std::string op = join(path, "a");
    if (!it->is_array()) fail(op, "expected one vector per player");
    for (std::size_t i = 0; i < it->size(); ++i) {
      joint.a.push_back(read_vector((*it)[i], index(op, i)));
    }
  } else {
    joint.a.assign(players, Vector::Zero(std::max(joint.m, 0)));
  }

  if (auto it = j.find("C"); it != j.end() && !it->is_null()) {
    const std::string cp = join(path, "C");
    if (!it->is_array()) fail(cp, "expected per-player lists of matrices");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& rows = (*it)[i];
      const std::string pp = index(cp, i);
      if (!rows.is_array()) fail(pp, "expected one matrix per constraint");
      std::vector<Matrix> mats;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        mats.push_back(read_matrix(rows[r], index(pp, r)));
      }
      joint.C.push_back(std::move(mats));
    }
  }
  return joint;
}

json* walk(json& doc, std::string_view path) {
  json* node = &doc;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string key(
        path.substr(start, dot == std::string_view::npos ? path.npos
                                                         : dot - start));
    if (key.empty()) throw ConfigError(fmt::format("bad override path '{}'", path));
    if (node->is_array()) {
      std::size_t used = 0;
      std::size_t idx = 0;
      try {
        idx = std::stoul(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || idx >= node->size()) {
        throw ConfigError(
            fmt::format("override path '{}': bad array index '{}'", path, key));
      }
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) {
        throw ConfigError(fmt::format(
            "override path '{}': '{}' is not an object", path, key));
      }
      node = &(*node)[key];
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return node;
}

// With nonneg or cap shares, U must still hold a share vector covering every
// x in D. For affine h on a box this is certified when the largest value of
// each h_it over X_i, clipped at zero, sums to at most b_t (and, with cap,
// each such value is at most b_t). Otherwise only a warning is issued.
std::optional<Finding> share_restriction_finding(const Game& game,
                                                 const ShareFlags& flags) {
  if (!game.affine_constraints()) {
    return Finding{Severity::kWarning, "share-restriction-not-checked",
                   "share restrictions with nonlinear joint constraints are not "
                   "checked against D"};
  }
  const JointConstraintSpec& joint = game.joint();
  for (int t = 0; t < joint.m; ++t) {
    double total = 0.0;
    bool capped = true;
    for (int i = 0; i < game.num_players(); ++i) {
      const PlayerSpec& p = game.player(i);
      double peak = joint.a[i](t);
      for (int k = 0; k < p.n; ++k) {
        const double coef = joint.A[i](t, k);
        if (coef > 0.0) peak += coef * p.upper(k);
        if (coef < 0.0) peak += coef * p.lower(k);
      }
      total += std::max(peak, 0.0);
      if (peak > joint.b(t)) capped = false;
    }
    if (total > joint.b(t) || (flags.cap && !capped)) {
      return Finding{
          Severity::kWarning, "share-restriction-not-certified",
          fmt::format("constraint {}: the restricted share set may not cover "
                      "every jointly feasible profile",
                      t)};
    }
  }
  return std::nullopt;
}

}  // namespace

ShareSet ProblemDocument::share_set() const { return {game.joint().b, shares}; }

ContinuationConfig ProblemDocument::continuation() const {
  ContinuationConfig cfg;
  cfg.schedule = schedule;
  cfg.master.lambda = solver.lambda;
  cfg.master.tol_u = solver.tol_u;
  cfg.master.max_iter = solver.max_iter_master;
  cfg.master.nep.tol = solver.eps_nep;
  cfg.master.nep.max_iter = solver.max_iter_nep;
  cfg.eps_feas = solver.eps_feas;
  cfg.eps_eq = solver.eps_eq;
  return cfg;
}

ProblemDocument parse_problem(const json& doc) {
  require_object(doc, "", {"name", "players", "joint", "shares", "penalty",
                           "schedule", "solver"});
  const json& name = member(doc, "", "name");
  if (!name.is_string()) fail("name", "expected a string");

  const json& players_json = member(doc, "", "players");
  if (!players_json.is_array() || players_json.empty()) {
    fail("players", "expected a non-empty array");
  }
  std::vector<PlayerSpec> players;
  for (std::size_t i = 0; i < players_json.size(); ++i) {
    players.push_back(parse_player(players_json[i], index("players", i)));
  }
  JointConstraintSpec joint = parse_joint(member(doc, "", "joint"), "joint",
                                          static_cast<int>(players.size()));

  ShareFlags shares;
  if (auto it = doc.find("shares"); it != doc.end()) {
    require_object(*it, "shares", {"nonneg", "cap"});
    if (it->contains("nonneg")) {
      shares.nonneg = read_bool((*it)["nonneg"], "shares.nonneg");
    }
    if (it->contains("cap")) shares.cap = read_bool((*it)["cap"], "shares.cap");
  }

  std::string penalty_kind = "quadratic_plus";
  if (auto it = doc.find("penalty"); it != doc.end()) {
    require_object(*it, "penalty", {"kind"});
    if (it->contains("kind")) {
      if (!(*it)["kind"].is_string()) fail("penalty.kind", "expected a string");
      penalty_kind = (*it)["kind"].get<std::string>();
    }
  }

  TauSchedule schedule;
  if (auto it = doc.find("schedule"); it != doc.end()) {
    require_object(*it, "schedule", {"tau0", "rho", "k_max"});
    if (it->contains("tau0")) {
      schedule.tau0 = read_real((*it)["tau0"], "schedule.tau0");
    }
    if (it->contains("rho")) schedule.rho = read_real((*it)["rho"], "schedule.rho");
    if (it->contains("k_max")) {
      schedule.k_max = static_cast<int>(read_int((*it)["k_max"], "schedule.k_max"));
    }
  }

  SolverSettings solver;
  if (auto it = doc.find("solver"); it != doc.end()) {
    require_object(*it, "solver",
                   {"tol_u", "eps_nep", "lambda", "eps_feas", "eps_eq",
                    "max_iter_master", "max_iter_nep", "seed"});
    const json& s = *it;
    auto real = [&](const char* key, double& field) {
      if (s.contains(key)) field = read_real(s[key], join("solver", key));
    };
    auto integer = [&](const char* key, auto& field) {
      if (s.contains(key)) {
        const long long v = read_int(s[key], join("solver", key));
        if (v < 0) fail(join("solver", key), "must be nonnegative");
        field = static_cast<std::remove_reference_t<decltype(field)>>(v);
      }
    };
    real("tol_u", solver.tol_u);
    real("eps_nep", solver.eps_nep);
    real("lambda", solver.lambda);
    real("eps_feas", solver.eps_feas);
    real("eps_eq", solver.eps_eq);
    integer("max_iter_master", solver.max_iter_master);
    integer("max_iter_nep", solver.max_iter_nep);
    integer("seed", solver.seed);
  }

  ProblemDocument out{Game(name.get<std::string>(), std::move(players),
                           std::move(joint)),
                      shares, penalty_kind, schedule, solver, {}};

  // Semantic checks after the structural ones.
  out.warnings = validate_game(out.game);
  const auto phi = make_penalty(out.penalty_kind);
  out.schedule.validate();
  out.continuation().master.validate(phi->cocoercivity());
  if (!(out.solver.eps_feas > 0.0)) fail("solver.eps_feas", "must be positive");
  if (!(out.solver.eps_eq > 0.0)) fail("solver.eps_eq", "must be positive");
  if (out.shares.nonneg || out.shares.cap) {
    for (Eigen::Index t = 0; t < out.game.joint().b.size(); ++t) {
      if (out.game.joint().b(t) < 0.0) {
        fail(fmt::format("joint.b[{}]", t),
             "share restrictions require a nonnegative right-hand side");
      }
    }
    if (auto f = share_restriction_finding(out.game, out.shares)) {
      out.warnings.push_back(*f);
    }
  }
  return out;
}

json to_json(const ProblemDocument& doc) {
  const Game& game = doc.game;
  json players = json::array();
  for (const PlayerSpec& p : game.players()) {
    json pj = {{"n", p.n},
               {"c", write_vector(p.c)},
               {"Q", write_matrix(p.Q)},
               {"lower", write_vector(p.lower)},
               {"upper", write_vector(p.upper)}};
    if (!p.R.empty()) {
      json r = json::object();
      for (const auto& [j, mat] : p.R) r[std::to_string(j)] = write_matrix(mat);
      pj["R"] = r;
    }
    players.push_back(pj);
  }

  const JointConstraintSpec& jc = game.joint();
  json joint = {{"m", jc.m}, {"b", write_vector(jc.b)}};
  joint["A"] = json::array();
  joint["a"] = json::array();
  for (std::size_t i = 0; i < jc.A.size(); ++i) {
    joint["A"].push_back(write_matrix(jc.A[i]));
    joint["a"].push_back(write_vector(jc.a[i]));
  }
  if (!jc.C.empty()) {
    joint["C"] = json::array();
    for (const auto& mats : jc.C) {
      json row = json::array();
      for (const Matrix& c : mats) row.push_back(write_matrix(c));
      joint["C"].push_back(row);
    }
  }

  const SolverSettings& s = doc.solver;
  return {{"name", game.name()},
          {"players", players},
          {"joint", joint},
          {"shares", {{"nonneg", doc.shares.nonneg}, {"cap", doc.shares.cap}}},
          {"penalty", {{"kind", doc.penalty_kind}}},
          {"schedule",
           {{"tau0", doc.schedule.tau0},
            {"rho", doc.schedule.rho},
            {"k_max", doc.schedule.k_max}}},
          {"solver",
           {{"tol_u", s.tol_u},
            {"eps_nep", s.eps_nep},
            {"lambda", s.lambda},
            {"eps_feas", s.eps_feas},
            {"eps_eq", s.eps_eq},
            {"max_iter_master", s.max_iter_master},
            {"max_iter_nep", s.max_iter_nep},
            {"seed", s.seed}}}};
}

void apply_override(json& doc, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(fmt::format(
        "override '{}' must have the form key.path=value", assignment));
  }
  const std::string_view path = assignment.substr(0, eq);
  const std::string value(assignment.substr(eq + 1));
  json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) parsed = value;
  *walk(doc, path) = std::move(parsed);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line/column pair.
    std::ifstream again(path);
    std::string text((std::istreambuf_iterator<char>(again)),
                     std::istreambuf_iterator<char>());
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(fmt::format("{}:{}:{}: JSON syntax error: {}",
                                  path.string(), line, col, e.what()));
  }
}

ProblemDocument load_problem(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  json doc = read_json_file(path);
  for (const std::string& o : overrides) apply_override(doc, o);
  try {
    return parse_problem(doc);
  } catch (const DimensionError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

void write_trace_csv(std::ostream& out, const Game& game,
                     const GnepReport& report) {
  const int n = game.dim();
  const int l = game.num_players();
  const int m = game.num_joint();
  out << "k,tau,master_iters,nep_iters_total,feas_P,joint_residual_inf,"
         "master_residual,multiplier_spread";
  for (int k = 1; k <= n; ++k) out << ",x_" << k;
  for (int i = 1; i <= l; ++i) {
    for (int t = 1; t <= m; ++t) out << ",u_" << i << t;
  }
  for (int t = 1; t <= m; ++t) out << ",lambda_" << t;
  out << '\n';

  for (const StageRecord& s : report.stages) {
    const MasterResult& mr = s.master;
    out << s.k << ',' << format_real(s.tau) << ',' << mr.iters << ','
        << mr.total_nep_iters << ',' << format_real(s.penalty) << ','
        << format_real(s.joint_residual.size()
                           ? s.joint_residual.lpNorm<Eigen::Infinity>()
                           : 0.0)
        << ',' << format_real(mr.residual_u) << ','
        << format_real(s.multipliers.spread);
    for (int k = 0; k < n; ++k) out << ',' << format_real(mr.x(k));
    for (int i = 0; i < l; ++i) {
      for (int t = 0; t < m; ++t) out << ',' << format_real(mr.u(i, t));
    }
    for (int t = 0; t < m; ++t) out << ',' << format_real(s.multipliers.shared(t));
    out << '\n';
  }
}

json summary_json(const GnepReport& report, const Game& game,
                  const PenaltyFunction& phi) {
  auto vec = [](const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  json u = json::array();
  for (Eigen::Index i = 0; i < report.u.rows(); ++i) {
    u.push_back(vec(report.u.row(i).transpose()));
  }
  return {{"name", game.name()},
          {"status", std::string(to_string(report.status))},
          {"stages", report.stages.size()},
          {"x", vec(report.x)},
          {"u", u},
          {"lambda_hat", vec(report.lambda_hat)},
          {"final_P", penalty_total(game, phi, report.x, report.u)}};
}

}  // namespace gnep

#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "cpinterp/choi_kraus.hpp"
#include "cpinterp/interpolation.hpp"
#include "cpinterp/problem_io.hpp"
#include "cpinterp/single_pair.hpp"

namespace cpinterp::cli {

namespace {

constexpr double kDefaultTol = 1e-8;
constexpr int kDefaultMaxIter = 20000;

struct Common {
  std::string path;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  bool trace_preserving = false;
  bool unital = false;
  std::string format = "json";
  std::string out_path;
  std::string direction;
};

void add_format(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "text"}));
}

void add_tol(CLI::App* cmd, Common& c) {
  cmd->add_option("--tol", c.tol, "Tolerance (flag > file > CPINTERP_TOL > 1e-8)")
      ->check(CLI::PositiveNumber);
}

void add_solver_options(CLI::App* cmd, Common& c) {
  cmd->add_option("file", c.path, "Problem file (JSON)")->required();
  add_tol(cmd, c);
  cmd->add_option("--max-iter", c.max_iter, "Iteration budget")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Seed recorded with the run");
  cmd->add_flag("--trace-preserving", c.trace_preserving, "Require a trace-preserving map");
  cmd->add_flag("--unital", c.unital, "Require a unital map");
  add_format(cmd, c);
}

std::optional<double> env_tol() {
  const char* v = std::getenv("CPINTERP_TOL");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const double t = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(t > 0) || !std::isfinite(t))
    throw SchemaError("CPINTERP_TOL", std::string("expected a positive number, got '") + v + "'");
  return t;
}

/// Explicit tolerance by precedence, or nullopt when none was given anywhere.
std::optional<double> explicit_tol(const Common& c, std::optional<double> from_file) {
  if (c.tol) return c.tol;
  if (from_file) return from_file;
  return env_tol();
}

void emit(const Json& j, const std::string& format, std::ostream& out) {
  if (format == "text") {
    for (const auto& [key, value] : j.items())
      out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  } else {
    out << j.dump(2) << "\n";
  }
}

Json precheck_json(const std::vector<PrecheckViolation>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) {
    Json e;
    e["kind"] = to_string(v.kind);
    if (v.kind == PrecheckViolation::Kind::SemidefiniteType) {
      e["pair"] = v.index;
      e["orthonormalized"] = v.canonical;
    }
    e["value"] = v.value;
    e["message"] = v.message;
    out.push_back(std::move(e));
  }
  return out;
}

Json feasibility_json(const std::optional<FeasibilityResult>& f) {
  Json out;
  if (f) {
    out["lambda_min"] = f->lambda_min;
    out["gap"] = f->gap;
    out["iterations"] = f->iterations;
  } else {
    out["lambda_min"] = nullptr;
    out["gap"] = nullptr;
    out["iterations"] = nullptr;
  }
  return out;
}

SolveOptions solve_options(const Common& c, const ProblemFile& file) {
  SolveOptions o;
  o.tol = explicit_tol(c, file.tol).value_or(kDefaultTol);
  o.max_iter = c.max_iter ? *c.max_iter : file.max_iter.value_or(kDefaultMaxIter);
  o.seed = c.seed ? *c.seed : file.seed.value_or(0);
  return o;
}

ProblemFile load_problem(const Common& c) {
  ProblemFile f = parse_problem(load_json(c.path));
  f.problem.trace_preserving = f.problem.trace_preserving || c.trace_preserving;
  f.problem.unital = f.problem.unital || c.unital;
  return f;
}

void write_file(const std::string& path, const Json& j) {
  std::ofstream o(path);
  if (!o) throw SchemaError("--out", "cannot write '" + path + "'");
  o << j.dump(2) << "\n";
  if (!o) throw SchemaError("--out", "write to '" + path + "' failed");
}

int cmd_check(const Common& c, std::ostream& out) {
  const ProblemFile file = load_problem(c);
  const SolveOptions opts = solve_options(c, file);
  const CheckReport rep = check(file.problem, opts);
  Json j;
  j["status"] = rep.diagnosis ? to_string(rep.diagnosis->stage) : "feasible";
  j.update(feasibility_json(rep.feasibility));
  j["prechecks"] = precheck_json(rep.violations);
  j["tol"] = opts.tol;
  if (rep.diagnosis) j["message"] = rep.diagnosis->message;
  emit(j, c.format, out);
  return rep.diagnosis ? kNotFound : kOk;
}

int cmd_solve(const Common& c, std::ostream& out) {
  const ProblemFile file = load_problem(c);
  const SolveOptions opts = solve_options(c, file);
  const SolveOutcome outcome = solve(file.problem, opts);
  if (const auto* d = std::get_if<Diagnosis>(&outcome)) {
    Json j;
    j["status"] = to_string(d->stage);
    j.update(feasibility_json(d->feasibility));
    j["prechecks"] = precheck_json(d->violations);
    if (!d->residuals.empty()) j["residuals"] = d->residuals;
    j["message"] = d->message;
    emit(j, c.format, out);
    return d->stage == DiagnosisStage::ResidualExceeded ? kResidualExceeded : kNotFound;
  }
  const Solution& s = std::get<Solution>(outcome);
  Json sol = solution_to_json(s);
  if (c.out_path.empty()) {
    sol["status"] = "solved";
    emit(sol, c.format, out);
    return kOk;
  }
  write_file(c.out_path, sol);
  Json summary;
  summary["status"] = "solved";
  summary["out"] = c.out_path;
  summary["kraus_count"] = s.kraus.size();
  summary["max_residual"] = s.max_residual();
  if (s.trace_residual) summary["trace_residual"] = *s.trace_residual;
  summary["iterations"] = s.iterations;
  emit(summary, c.format, out);
  return kOk;
}

int cmd_single(const Common& c, std::ostream& out) {
  const ProblemFile file = parse_problem(load_json(c.path));
  if (file.problem.size() != 1)
    throw SchemaError("A", "single expects exactly one pair, got " +
                               std::to_string(file.problem.size()));
  const Hermitian a(file.problem.a[0]);
  const Hermitian b(file.problem.b[0]);
  const auto tol = explicit_tol(c, file.tol);
  Json j;
  const auto r = tol ? minimal_rank(a, b, *tol) : minimal_rank(a, b);
  if (!r) {
    j["status"] = "infeasible";
    j["message"] = "no CP map exists: input is semidefinite and output is not of the same type";
    emit(j, c.format, out);
    return kNotFound;
  }
  const KrausSet k = tol ? solve_single(a, b, *tol) : solve_single(a, b);
  j["status"] = "solved";
  j["rank"] = *r;
  j["kraus"] = kraus_to_json(k);
  j["residual"] = (apply_kraus(k, a.matrix()) - b.matrix()).norm();
  if (!c.out_path.empty()) write_file(c.out_path, j);
  emit(j, c.format, out);
  return kOk;
}

int cmd_inertia(const Common& c, std::ostream& out) {
  const Json in = load_json(c.path);
  if (!in.is_object() || !in.contains("matrices"))
    throw SchemaError("matrices", "missing required field");
  const Json& ms = in["matrices"];
  if (!ms.is_array()) throw SchemaError("matrices", "expected a list of matrices");
  std::optional<double> file_tol;
  if (in.contains("tol")) {
    if (!in["tol"].is_number() || !(in["tol"].get<double>() > 0))
      throw SchemaError("tol", "expected a positive number");
    file_tol = in["tol"].get<double>();
  }
  const auto tol = explicit_tol(c, file_tol);
  Json list = Json::array();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string field = "matrices[" + std::to_string(i) + "]";
    const ComplexMatrix m = parse_matrix(ms[i], -1, field);
    std::optional<Hermitian> h;
    try {
      h.emplace(m);
    } catch (const NotHermitianError& e) {
      throw SchemaError(field, e.what());
    }
    const Inertia r = tol ? inertia(*h, *tol) : inertia(*h);
    list.push_back(Json::array({r.minus, r.zero, r.plus}));
  }
  Json j;
  j["inertia"] = list;
  emit(j, c.format, out);
  return kOk;
}

int cmd_choi(const Common& c, std::ostream& out) {
  const Json in = load_json(c.path);
  if (!in.is_object()) throw SchemaError("$", "expected a JSON object");
  auto dimension = [&](const char* key) {
    if (!in.contains(key)) throw SchemaError(key, "missing required field");
    if (!in[key].is_number_integer() || in[key].get<long long>() < 1)
      throw SchemaError(key, "expected a positive integer");
    return static_cast<Index>(in[key].get<long long>());
  };
  const Index n = dimension("n"), k = dimension("k");
  if (!in.contains("matrix")) throw SchemaError("matrix", "missing required field");
  const ComplexMatrix m = parse_matrix(in["matrix"], n * k, "matrix");
  Json j;
  j["n"] = n;
  j["k"] = k;
  if (c.direction == "to-density")
    j["matrix"] = matrix_to_json(choi_to_density(ChoiMatrix(n, k, m)));
  else
    j["matrix"] = matrix_to_json(density_to_choi(m, n, k).matrix());
  if (!c.out_path.empty()) write_file(c.out_path, j);
  emit(j, c.format, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Completely positive interpolation: decide and construct CP maps A_v -> B_v"};
  app.name(args.empty() ? "cpinterp" : args.front());
  app.require_subcommand(1);
  Common c;

  auto* check_cmd = app.add_subcommand("check", "Decide whether a CP interpolating map exists");
  add_solver_options(check_cmd, c);

  auto* solve_cmd = app.add_subcommand("solve", "Construct a CP interpolating map");
  add_solver_options(solve_cmd, c);
  solve_cmd->add_option("--out", c.out_path, "Write the solution JSON here");

  auto* single_cmd = app.add_subcommand("single", "Single-pair minimal Kraus rank and construction");
  single_cmd->add_option("file", c.path, "Problem file with one pair")->required();
  add_tol(single_cmd, c);
  single_cmd->add_option("--out", c.out_path, "Write the result JSON here");
  add_format(single_cmd, c);

  auto* inertia_cmd = app.add_subcommand("inertia", "Inertia (minus, zero, plus) of each matrix");
  inertia_cmd->add_option("file", c.path, "JSON file {\"matrices\": [...]}")->required();
  add_tol(inertia_cmd, c);
  add_format(inertia_cmd, c);

  auto* choi_cmd = app.add_subcommand("choi", "Convert between Choi and density layouts");
  choi_cmd->add_option("file", c.path, "JSON file {n, k, matrix}")->required();
  choi_cmd->add_option("--direction", c.direction, "Conversion direction")
      ->required()
      ->check(CLI::IsMember({"to-density", "to-choi"}));
  choi_cmd->add_option("--out", c.out_path, "Write the converted JSON here");
  add_format(choi_cmd, c);

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (check_cmd->parsed()) return cmd_check(c, out);
    if (solve_cmd->parsed()) return cmd_solve(c, out);
    if (single_cmd->parsed()) return cmd_single(c, out);
    if (inertia_cmd->parsed()) return cmd_inertia(c, out);
    if (choi_cmd->parsed()) return cmd_choi(c, out);
  } catch (const SchemaError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const DimensionError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const NotHermitianError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const InertiaConditionError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kNotFound;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace cpinterp::cli

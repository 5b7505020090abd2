#include "cpinterp/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cpinterp {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw SchemaError("$", "expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(key, "missing required field");
  return *it;
}

Index parse_dimension(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw SchemaError(key, "expected a positive integer");
  return static_cast<Index>(v.get<long long>());
}

bool parse_flag(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) return false;
  if (!it->is_boolean()) throw SchemaError(key, "expected true or false");
  return it->get<bool>();
}

double parse_real(const Json& j, const std::string& field) {
  if (!j.is_number()) throw SchemaError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(field, "expected a finite number");
  return v;
}

Complex parse_entry(const Json& j, const std::string& field) {
  if (j.is_number()) return {parse_real(j, field), 0.0};
  if (!j.is_array() || j.size() != 2) throw SchemaError(field, "expected an [re, im] pair");
  return {parse_real(j[0], field + "[0]"), parse_real(j[1], field + "[1]")};
}

std::vector<ComplexMatrix> parse_list(const Json& j, const char* key, Index dim) {
  const Json& v = require(j, key);
  if (!v.is_array()) throw SchemaError(key, "expected a list of matrices");
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_matrix(v[i], dim, std::string(key) + "[" + std::to_string(i) + "]"));
  return out;
}

Json vector_to_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("$", "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
}

ComplexMatrix parse_matrix(const Json& j, Index rows, Index cols, const std::string& field) {
  if (!j.is_array()) throw SchemaError(field, "expected a row-major list of entries");
  const auto count = static_cast<Index>(j.size());
  if (count != rows * cols) {
    std::ostringstream msg;
    msg << "expected " << rows * cols << " entries (" << rows << "x" << cols << "), got " << count;
    throw SchemaError(field, msg.str());
  }
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const auto idx = static_cast<std::size_t>(r * cols + c);
      m(r, c) = parse_entry(j[idx], field + "[" + std::to_string(idx) + "]");
    }
  return m;
}

ComplexMatrix parse_matrix(const Json& j, Index dim, const std::string& field) {
  if (!j.is_array()) throw SchemaError(field, "expected a row-major list of entries");
  if (dim < 0) {
    const auto count = static_cast<Index>(j.size());
    dim = static_cast<Index>(std::llround(std::sqrt(double(count))));
    if (dim < 1 || dim * dim != count)
      throw SchemaError(field, "entry count " + std::to_string(count) + " is not a square");
  }
  return parse_matrix(j, dim, dim, field);
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) out.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
  return out;
}

ProblemFile parse_problem(const Json& j) {
  ProblemFile f;
  f.problem.n = parse_dimension(j, "n");
  f.problem.k = parse_dimension(j, "k");
  f.problem.a = parse_list(j, "A", f.problem.n);
  f.problem.b = parse_list(j, "B", f.problem.k);
  if (f.problem.a.empty()) throw SchemaError("A", "at least one input matrix is required");
  if (f.problem.a.size() != f.problem.b.size()) {
    std::ostringstream msg;
    msg << "has " << f.problem.b.size() << " matrices but A has " << f.problem.a.size();
    throw SchemaError("B", msg.str());
  }
  f.problem.trace_preserving = parse_flag(j, "trace_preserving");
  f.problem.unital = parse_flag(j, "unital");
  if (const auto it = j.find("tol"); it != j.end()) {
    f.tol = parse_real(*it, "tol");
    if (*f.tol <= 0) throw SchemaError("tol", "must be positive");
  }
  if (const auto it = j.find("max_iter"); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1)
      throw SchemaError("max_iter", "expected a positive integer");
    f.max_iter = static_cast<int>(it->get<long long>());
  }
  if (const auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) throw SchemaError("seed", "expected a non-negative integer");
    f.seed = it->get<std::uint64_t>();
  }
  return f;
}

Json problem_to_json(const ProblemFile& file) {
  const Problem& p = file.problem;
  Json out;
  out["n"] = p.n;
  out["k"] = p.k;
  out["A"] = Json::array();
  for (const auto& m : p.a) out["A"].push_back(matrix_to_json(m));
  out["B"] = Json::array();
  for (const auto& m : p.b) out["B"].push_back(matrix_to_json(m));
  out["trace_preserving"] = p.trace_preserving;
  out["unital"] = p.unital;
  if (file.tol) out["tol"] = *file.tol;
  if (file.max_iter) out["max_iter"] = *file.max_iter;
  if (file.seed) out["seed"] = *file.seed;
  return out;
}

Json kraus_to_json(const KrausSet& kraus) {
  Json out = Json::array();
  for (const auto& v : kraus.ops) {
    Json op;
    op["rows"] = v.rows();
    op["cols"] = v.cols();
    op["entries"] = matrix_to_json(v);
    out.push_back(std::move(op));
  }
  return out;
}

KrausSet parse_kraus(const Json& j, const std::string& field) {
  if (!j.is_array()) throw SchemaError(field, "expected a list of operation elements");
  std::vector<ComplexMatrix> ops;
  Index rows = 0, cols = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_object()) throw SchemaError(f, "expected {rows, cols, entries}");
    const auto r = j[i].find("rows"), c = j[i].find("cols"), e = j[i].find("entries");
    if (r == j[i].end() || !r->is_number_integer()) throw SchemaError(f + ".rows", "expected an integer");
    if (c == j[i].end() || !c->is_number_integer()) throw SchemaError(f + ".cols", "expected an integer");
    if (e == j[i].end()) throw SchemaError(f + ".entries", "missing required field");
    rows = r->get<Index>();
    cols = c->get<Index>();
    ops.push_back(parse_matrix(*e, rows, cols, f + ".entries"));
  }
  return KrausSet(rows, cols, std::move(ops));
}

Json solution_to_json(const Solution& s) {
  Json out;
  out["n"] = s.choi.n();
  out["k"] = s.choi.k();
  out["choi"] = matrix_to_json(s.choi.matrix());
  out["kraus"] = kraus_to_json(s.kraus);
  out["p_coords"] = vector_to_json(std::vector<double>(s.p.data(), s.p.data() + s.p.size()));
  out["residuals"] = vector_to_json(s.residuals);
  if (s.trace_residual) out["trace_residual"] = *s.trace_residual;
  if (s.unital_residual) out["unital_residual"] = *s.unital_residual;
  out["iterations"] = s.iterations;
  return out;
}

}  // namespace cpinterp

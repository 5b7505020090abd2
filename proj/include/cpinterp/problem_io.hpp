#pragma once

// JSON files for problems, solutions and standalone matrices. A matrix is a
// row-major list of [re, im] pairs (a bare number is read as a real entry).

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "cpinterp/errors.hpp"
#include "cpinterp/interpolation.hpp"

namespace cpinterp {

using Json = nlohmann::json;

/// Malformed input; field() names the offending JSON path, e.g. "A[1][3]".
class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : Error("field '" + field + "': " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ProblemFile {
  Problem problem;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
};

/// Reads and parses a JSON document; failures raise SchemaError on field "$".
Json load_json(const std::string& path);

/// dim < 0 infers a square size from the entry count.
ComplexMatrix parse_matrix(const Json& j, Index dim, const std::string& field);
ComplexMatrix parse_matrix(const Json& j, Index rows, Index cols, const std::string& field);
/// Inverse of kraus_to_json.
KrausSet parse_kraus(const Json& j, const std::string& field);
Json matrix_to_json(const ComplexMatrix& m);

ProblemFile parse_problem(const Json& j);
Json problem_to_json(const ProblemFile& file);

Json kraus_to_json(const KrausSet& kraus);
Json solution_to_json(const Solution& solution);

}  // namespace cpinterp

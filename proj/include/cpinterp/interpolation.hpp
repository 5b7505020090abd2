#pragma once

// Completely positive interpolation: given pairs (A_v, B_v) in M_n x M_k,
// find a CP map phi with phi(A_v) = B_v (optionally trace preserving and/or
// unital).
//
// The pipeline is canonicalize -> density_matrix -> prechecks ->
// feasibility -> extract_solution. A map exists iff the affine set
//
//     D + M_k (x) complement(span A)
//
// contains a PSD matrix X; phi is then read off X via phi(A)_ij =
// tr(X (E_ij (x) A)), i.e. Phi = density_to_choi(X).

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpinterp/choi_kraus.hpp"
#include "cpinterp/feasibility.hpp"
#include "cpinterp/hermlinalg.hpp"
#include "cpinterp/subspace.hpp"

namespace cpinterp {

struct Problem {
  Index n = 0;
  Index k = 0;
  std::vector<ComplexMatrix> a;  ///< inputs, n x n
  std::vector<ComplexMatrix> b;  ///< outputs, k x k
  bool trace_preserving = false;
  bool unital = false;

  std::size_t size() const noexcept { return a.size(); }
  /// Throws DimensionError naming the offending pair.
  void validate() const;
};

struct CanonicalReport {
  /// Pairs that were not Hermitian and were replaced by real/imaginary parts.
  std::vector<std::size_t> split;
  bool unital_pair_added = false;
  /// Whether I_n was already in the span of the inputs before any unital pair.
  bool identity_in_input_span = false;
  /// Indices into CanonicalProblem::inputs found linearly dependent (and
  /// verified consistent on the outputs).
  std::vector<std::size_t> dependent;
};

struct CanonicalProblem {
  Problem original;
  /// Hermitian pairs after splitting and the optional unital pair.
  std::vector<Hermitian> inputs;
  std::vector<Hermitian> outputs;
  SpanBasis basis;
  /// Orthonormal inputs (== basis.span) and the outputs transformed alike.
  std::vector<Hermitian> a;
  std::vector<Hermitian> b;
  CanonicalReport report;

  Index n() const noexcept { return original.n; }
  Index k() const noexcept { return original.k; }
};

/// Dependence among inputs is detected with residual tolerance
/// tol * max(1, max ||A||); the same relation must hold on the outputs within
/// tol * max(1, max ||B||) or InconsistentDependenceError is thrown.
CanonicalProblem canonicalize(const Problem& problem, double tol = 1e-8);

struct DensityData {
  Index n = 0;
  Index k = 0;
  /// kn x kn, density layout (M_k (x) M_n).
  Hermitian d;
  SpanBasis basis;
  std::vector<Hermitian> tensor_complement;
};

/// Sum_v B_v^T (x) A_v for orthonormal A.
Hermitian density_orthonormal(const std::vector<Hermitian>& a, const std::vector<Hermitian>& b);
/// Sum_mu C_mu^T (x) A_mu where sum_mu tr(A_v A_mu) C_mu = B_v; A only needs to
/// be linearly independent.
Hermitian density_gram(const std::vector<Hermitian>& a, const std::vector<Hermitian>& b);

DensityData density_matrix(const CanonicalProblem& problem);

struct PrecheckViolation {
  enum class Kind { SemidefiniteType, NegativeTrace };
  Kind kind;
  /// Pair index for SemidefiniteType (into the original pairs when
  /// `canonical` is false, into the canonical pairs otherwise).
  std::size_t index = 0;
  bool canonical = false;
  double value = 0.0;
  std::string message;
};

const char* to_string(PrecheckViolation::Kind kind);

/// Necessary conditions for solvability; an empty result is not sufficient.
std::vector<PrecheckViolation> prechecks(const CanonicalProblem& problem,
                                         const DensityData& density, double tol = 1e-8);

/// tr(X (I_k (x) H_a)) = tr(H_a) over the Hermitian unit basis H_a of M_n,
/// i.e. the partial trace of X over M_k equals I_n.
AffineConstraints trace_preserving_constraints(const CanonicalProblem& problem,
                                               const DensityData& density);

FeasibilityResult feasibility(const DensityData& density, const AffineConstraints* constraints,
                              const FeasibilityOptions& opts);

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 20000;
  double stall_eps = 1e-12;
  int stall_window = 200;
  std::uint64_t seed = 0;
  /// Residual bound on the original pairs, relative to max(1, max ||B||).
  double solution_tol = 1e-7;
  bool record_gaps = false;

  FeasibilityOptions feasibility_options() const;
};

struct Solution {
  ChoiMatrix choi = ChoiMatrix::zero(1, 1);
  KrausSet kraus;
  /// ||phi(A_v) - B_v||_HS over the original pairs.
  std::vector<double> residuals;
  /// ||sum V V* - I_n||_HS when trace preserving was requested.
  std::optional<double> trace_residual;
  /// ||phi(I_n) - I_k||_HS when unital was requested.
  std::optional<double> unital_residual;
  /// Coordinates of X - D in the tensor complement basis.
  RealVector p;
  Hermitian x;
  int iterations = 0;

  double max_residual() const;
};

/// Builds the map from a Feasible result. Throws ResidualError when a
/// residual exceeds opts.solution_tol * max(1, max ||B||).
Solution extract_solution(const DensityData& density, const FeasibilityResult& result,
                          const CanonicalProblem& problem, const SolveOptions& opts = {});

enum class DiagnosisStage {
  InconsistentDependence,
  PrecheckViolation,
  GapStalled,
  IterationLimit,
  ResidualExceeded
};

const char* to_string(DiagnosisStage stage);

struct Diagnosis {
  DiagnosisStage stage;
  std::string message;
  std::vector<PrecheckViolation> violations;
  std::optional<FeasibilityResult> feasibility;
  std::vector<double> residuals;
};

/// Everything up to and including the feasibility search. `diagnosis` is set
/// when the pipeline stopped short of a Feasible result.
struct CheckReport {
  std::optional<CanonicalProblem> canonical;
  std::optional<DensityData> density;
  std::vector<PrecheckViolation> violations;
  std::optional<FeasibilityResult> feasibility;
  std::optional<Diagnosis> diagnosis;
};

/// Throws DimensionError on malformed input.
CheckReport check(const Problem& problem, const SolveOptions& opts = {});

using SolveOutcome = std::variant<Solution, Diagnosis>;

SolveOutcome solve(const Problem& problem, const SolveOptions& opts = {});

}  // namespace cpinterp

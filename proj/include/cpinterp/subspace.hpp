#pragma once

// *-subspaces of M_n spanned by Hermitian matrices, their Hilbert-Schmidt
// complements, and subspaces spanned by matrix units E_ij over a relation on
// {0..m-1}.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "cpinterp/hermlinalg.hpp"

namespace cpinterp {

/// Orthonormal Hermitian bases of span(A) and of its orthogonal complement.
/// span.size() + complement.size() == n^2.
struct SpanBasis {
  Index n = 0;
  std::vector<Hermitian> span;
  std::vector<Hermitian> complement;
  /// inputs x span: A_v = sum_j coefficients(v, j) span_j.
  RealMatrix coefficients;
  /// span x inputs: span_j = sum_v transform(j, v) A_v.
  RealMatrix transform;
  /// Inputs found to lie in the span of the earlier ones.
  std::vector<std::size_t> dependent;

  /// Orthogonal projection of h onto the span.
  Hermitian project(const Hermitian& h) const;
};

/// `tol` is the absolute residual bound below which an input (or a candidate
/// complement element) counts as dependent.
SpanBasis build_span(const std::vector<Hermitian>& a, double tol);

/// {H_a (x) F_mu}: H_a over hermitian_unit_basis(k) (outer loop), F_mu over
/// the complement. Orthonormal basis of M_k (x) complement.
std::vector<Hermitian> tensor_complement(Index k, const SpanBasis& basis);

/// ||I - proj(I)||_HS <= tol.
bool contains_identity(const SpanBasis& basis, double tol);

struct DefiniteSearchOptions {
  /// Required margin: the witness satisfies X - delta*I >= 0 (up to tol).
  double delta = 1e-6;
  double tol = 1e-9;
  int max_iter = 5000;
  double stall_eps = 1e-12;
  int stall_window = 200;
};

/// Some X in the span with lambda_min(X) > 0, found by a PSD feasibility
/// search; nullopt means none was found within the budget, not that none
/// exists.
std::optional<Hermitian> positive_definite_element(const SpanBasis& basis,
                                                   const DefiniteSearchOptions& opts = {});

/// A relation on {0, .., m-1}, pairs sorted and unique.
class UnitRelation {
 public:
  UnitRelation(Index m, std::vector<std::pair<Index, Index>> pairs);

  static UnitRelation equality(Index m);

  Index m() const noexcept { return m_; }
  const std::vector<std::pair<Index, Index>>& pairs() const noexcept { return pairs_; }

  bool contains(Index i, Index j) const;
  bool reflexive() const;
  bool symmetric() const;
  bool transitive() const;

  /// Orthonormal Hermitian basis of span{E_ij : (i,j) in R}; requires R
  /// symmetric.
  std::vector<Hermitian> hermitian_basis() const;

 private:
  Index m_;
  std::vector<std::pair<Index, Index>> pairs_;
};

enum class RelationClass { NotStarClosed, OperatorSystem, Algebra };

const char* to_string(RelationClass c);

/// Algebra: reflexive, symmetric and transitive. OperatorSystem: reflexive
/// and symmetric only.
RelationClass classify_relation(const UnitRelation& r);

/// The indices (i, j, l), distinct, with (i,j), (j,l) in R and (i,l) not in R;
/// nullopt when R is transitive.
std::optional<std::array<Index, 3>> intransitive_triple(const UnitRelation& r);

/// For an operator-system relation and 1/sqrt2 < rho <= 1: the m x m matrix
/// with ones on the diagonal at i, j, l, rho at (i,j), (j,i), (j,l), (l,j) and
/// zeros elsewhere. It lies in span(R), is indefinite, and tr(D C) >= 0 for
/// every PSD C in span(R).
Hermitian counterexample_functional(const UnitRelation& r, double rho);

}  // namespace cpinterp

#pragma once

// Completely positive interpolation of a single Hermitian pair A -> B, decided
// by inertia alone: a CP map with r operation elements exists iff
// kappa_+(B) <= r kappa_+(A) and kappa_-(B) <= r kappa_-(A).

#include <optional>
#include <vector>

#include "cpinterp/choi_kraus.hpp"
#include "cpinterp/hermlinalg.hpp"

namespace cpinterp {

struct EigenPair {
  double value = 0.0;  ///< always > 0; the sign is given by the list it is in
  ComplexVector vector;
};

/// H = sum_plus value v v* - sum_minus value w w*. Both lists ordered by
/// value descending.
struct SpectralSplit {
  Index dim = 0;
  std::vector<EigenPair> plus;
  std::vector<EigenPair> minus;
  Index kernel_dim = 0;

  Inertia inertia() const {
    return {static_cast<Index>(minus.size()), kernel_dim, static_cast<Index>(plus.size())};
  }
  Hermitian reconstruct() const;
};

SpectralSplit spectral_split(const Hermitian& h, double tol);
/// Uses the default inertia tolerance of h.
SpectralSplit spectral_split(const Hermitian& h);

/// n x k matrix V with V* A V = B. Each eigenpair (b_i, u_i) of B is paired
/// with the eigenpair (a_i, w_i) of A of the same sign and rank in descending
/// order, and V = sum_i sqrt(b_i / a_i) w_i u_i*. Throws InertiaConditionError
/// when kappa_+(B) > kappa_+(A) or kappa_-(B) > kappa_-(A).
ComplexMatrix rank_one_map(const Hermitian& a, const Hermitian& b, double tol);
ComplexMatrix rank_one_map(const Hermitian& a, const Hermitian& b);

/// Smallest r with kappa_+(B) <= r kappa_+(A) and kappa_-(B) <= r kappa_-(A);
/// nullopt when no r works.
std::optional<std::size_t> minimal_rank(const Inertia& a, const Inertia& b);
std::optional<std::size_t> minimal_rank(const Hermitian& a, const Hermitian& b, double tol);
std::optional<std::size_t> minimal_rank(const Hermitian& a, const Hermitian& b);

/// Kraus set of exactly minimal_rank(A, B) elements with sum V* A V = B. The
/// spectral terms of B, ordered by |eigenvalue| descending, are dealt
/// round-robin into r groups, each solved by rank_one_map. Throws
/// InertiaConditionError when no CP map exists.
KrausSet solve_single(const Hermitian& a, const Hermitian& b, double tol);
KrausSet solve_single(const Hermitian& a, const Hermitian& b);

}  // namespace cpinterp

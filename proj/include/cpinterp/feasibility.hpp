#pragma once

// Search for a positive semidefinite point in an affine set of Hermitian
// matrices
//
//     { base + sum_mu p_mu F_mu }  intersected with  { X : tr(X G_c) = r_c }
//
// by Dykstra's alternating projections. F_mu must be orthonormal under the
// Hilbert-Schmidt inner product; p_mu are real.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpinterp/hermlinalg.hpp"

namespace cpinterp {

/// tr(X * functional) = rhs.
struct AffineConstraint {
  Hermitian functional;
  double rhs = 0.0;
};
using AffineConstraints = std::vector<AffineConstraint>;

enum class FeasibilityStatus { Feasible, GapStalled, IterationLimit };

const char* to_string(FeasibilityStatus s);

struct FeasibilityOptions {
  double tol = 1e-8;
  int max_iter = 20000;
  double stall_eps = 1e-12;
  int stall_window = 200;
  /// Carried for reproducibility records; the iteration itself is
  /// deterministic and starts from the base point.
  std::uint64_t seed = 0;
  bool record_gaps = false;
};

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::IterationLimit;
  /// Last affine iterate; when Feasible, lambda_min(x) >= -tol.
  std::optional<Hermitian> x;
  /// Coordinates of x - base in the direction basis.
  RealVector p;
  double lambda_min = 0.0;
  /// Hilbert-Schmidt distance between the last cone iterate and its
  /// projection onto the affine set.
  double gap = 0.0;
  int iterations = 0;
  std::vector<double> gap_history;
  std::string note;

  bool feasible() const { return status == FeasibilityStatus::Feasible; }
};

FeasibilityResult find_psd_point(const Hermitian& base, std::span<const Hermitian> directions,
                                 const AffineConstraints& constraints,
                                 const FeasibilityOptions& opts);

}  // namespace cpinterp

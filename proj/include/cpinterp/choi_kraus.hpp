#pragma once

// Representations of linear maps M_n -> M_k.
//
// Two orderings of C^n (x) C^k appear below and are easy to confuse:
//   * Choi layout, index r = l*k + i (l in [0,n), i in [0,k)). The Choi matrix
//     is the n x n block matrix whose (l, m) block is phi(E_lm) (k x k).
//   * Density layout, index a = i*n + l, i.e. M_k (x) M_n with the output
//     factor on the left. Density matrices live here.
// The canonical shuffle U moves the density layout onto the Choi layout:
// U e_{i*n+l} = e_{l*k+i}.

#include <vector>

#include "cpinterp/hermlinalg.hpp"

namespace cpinterp {

/// Choi matrix of a linear map M_n -> M_k, Choi layout.
class ChoiMatrix {
 public:
  ChoiMatrix(Index n, Index k, ComplexMatrix matrix);

  static ChoiMatrix zero(Index n, Index k);

  Index n() const noexcept { return n_; }
  Index k() const noexcept { return k_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }

  /// phi(E_lm) as a k x k matrix.
  ComplexMatrix block(Index l, Index m) const { return matrix_.block(l * k_, m * k_, k_, k_); }

 private:
  Index n_;
  Index k_;
  ComplexMatrix matrix_;
};

/// Operation elements V_j (each n x k) of phi(A) = sum_j V_j* A V_j.
struct KrausSet {
  Index n = 0;
  Index k = 0;
  std::vector<ComplexMatrix> ops;

  KrausSet() = default;
  KrausSet(Index n, Index k, std::vector<ComplexMatrix> ops);

  std::size_t size() const noexcept { return ops.size(); }
};

/// kn x kn permutation with U e_{i*n+l} = e_{l*k+i}.
ComplexMatrix shuffle_matrix(Index n, Index k);

/// D = U* conj(Phi) U (density layout).
ComplexMatrix choi_to_density(const ChoiMatrix& choi);
/// Phi = U conj(D) U* (Choi layout). Inverse of choi_to_density.
ChoiMatrix density_to_choi(const ComplexMatrix& density, Index n, Index k);

Hermitian choi_to_density(const Hermitian& choi, Index n, Index k);
Hermitian density_to_choi(const Hermitian& density, Index n, Index k);

/// Choi matrix assembled from the n^2 blocks phi(E_lm), given row-major in
/// (l, m).
ChoiMatrix choi_from_blocks(Index n, Index k, const std::vector<ComplexMatrix>& blocks);

/// phi(C)_ij = sum_{l,m} Phi(l*k+i, m*k+j) C(l,m).
ComplexMatrix apply_choi(const ChoiMatrix& choi, const ComplexMatrix& c);

/// phi(A) = sum_j V_j* A V_j.
ComplexMatrix apply_kraus(const KrausSet& kraus, const ComplexMatrix& a);

/// Sum_j conj(vec V_j) conj(vec V_j)*, where vec is the row-major flattening
/// r = l*k + i. Always PSD with rank at most |ops|.
ChoiMatrix choi_of_kraus(const KrausSet& kraus);

/// Minimal Kraus set from a PSD Choi matrix: one operation element per
/// eigenvalue above `tol`, V_j(l, i) = sqrt(lambda_j) * conj(f_j(l*k+i)).
/// Throws NotPositiveSemidefiniteError when lambda_min < -tol.
KrausSet kraus_from_choi(const ChoiMatrix& choi, double tol);
/// Same, with the default rank tolerance 1e-9 * kn * max|lambda|.
KrausSet kraus_from_choi(const ChoiMatrix& choi);

/// Sum_j V_j V_j* (n x n); equals I_n exactly when the map is trace preserving.
ComplexMatrix kraus_trace_operator(const KrausSet& kraus);

}  // namespace cpinterp

#pragma once

// Reference computations that share no code with the library: Eigen's own
// self-adjoint solver, entry-by-entry formulas, and explicit descriptions of
// the positive cones of a few small *-subspaces.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "support/generators.hpp"

namespace testsupport {

inline Eigen::VectorXd eigenvalues_oracle(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double lambda_min_oracle(const ComplexMatrix& h) { return eigenvalues_oracle(h)(0); }

inline Index rank_oracle(const ComplexMatrix& h, double tol) {
  const auto ev = eigenvalues_oracle(h);
  Index r = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > tol) ++r;
  return r;
}

/// (X (x) Y)((i*ny + l), (j*my + m)) = X(i,j) Y(l,m), entry by entry.
inline ComplexMatrix kron_oracle(const ComplexMatrix& x, const ComplexMatrix& y) {
  ComplexMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j)
      for (Index l = 0; l < y.rows(); ++l)
        for (Index m = 0; m < y.cols(); ++m)
          out(i * y.rows() + l, j * y.cols() + m) = x(i, j) * y(l, m);
  return out;
}

inline ComplexMatrix unit(Index n, Index l, Index m) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(l, m) = 1.0;
  return e;
}

/// phi(E_lm) = sum_j V_j* E_lm V_j, row-major in (l, m).
inline std::vector<ComplexMatrix> kraus_blocks(const KrausSet& kraus) {
  std::vector<ComplexMatrix> blocks;
  for (Index l = 0; l < kraus.n; ++l)
    for (Index m = 0; m < kraus.n; ++m) {
      ComplexMatrix b = ComplexMatrix::Zero(kraus.k, kraus.k);
      for (const auto& v : kraus.ops) b += v.adjoint() * unit(kraus.n, l, m) * v;
      blocks.push_back(b);
    }
  return blocks;
}

/// phi(C) = sum_{l,m} C(l,m) phi(E_lm).
inline ComplexMatrix apply_blocks(const std::vector<ComplexMatrix>& blocks, Index n,
                                  const ComplexMatrix& c) {
  ComplexMatrix out = ComplexMatrix::Zero(blocks.front().rows(), blocks.front().cols());
  for (Index l = 0; l < n; ++l)
    for (Index m = 0; m < n; ++m) out += c(l, m) * blocks[static_cast<std::size_t>(l * n + m)];
  return out;
}

/// Density matrix of the functional attached to the map, entrywise:
/// conj(d(i*n+l, j*n+m)) = phi(E_lm)(i, j).
inline ComplexMatrix density_oracle(const KrausSet& kraus) {
  const Index n = kraus.n, k = kraus.k;
  const auto blocks = kraus_blocks(kraus);
  ComplexMatrix d(k * n, k * n);
  for (Index i = 0; i < k; ++i)
    for (Index l = 0; l < n; ++l)
      for (Index j = 0; j < k; ++j)
        for (Index m = 0; m < n; ++m)
          d(i * n + l, j * n + m) = std::conj(blocks[static_cast<std::size_t>(l * n + m)](i, j));
  return d;
}

/// Sum of the k diagonal n x n blocks.
inline ComplexMatrix partial_trace_oracle(const ComplexMatrix& x, Index k, Index n) {
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Index l = 0; l < n; ++l)
    for (Index m = 0; m < n; ++m)
      for (Index i = 0; i < k; ++i) out(l, m) += x(i * n + l, i * n + m);
  return out;
}

// Pauli matrices in the order sigma0 = I, sigma1 = [[0,-i],[i,0]],
// sigma2 = [[0,1],[1,0]], sigma3 = diag(1,-1).
inline ComplexMatrix pauli(int which) {
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  switch (which) {
    case 0:
      s(0, 0) = s(1, 1) = 1.0;
      break;
    case 1:
      s(0, 1) = Complex(0, -1);
      s(1, 0) = Complex(0, 1);
      break;
    case 2:
      s(0, 1) = s(1, 0) = 1.0;
      break;
    default:
      s(0, 0) = 1.0;
      s(1, 1) = -1.0;
  }
  return s;
}

inline Complex unit_phase(Rng& rng) {
  const double t = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
  return {std::cos(t), std::sin(t)};
}

/// Positive elements [[alpha, beta], [conj(beta), alpha]] of span{sigma0,
/// sigma1, sigma2}: alpha >= 0, |beta| <= alpha. Half the samples sit on the
/// extreme rays |beta| = alpha.
inline ComplexMatrix sample_pauli_span_positive(Rng& rng) {
  const double alpha = uniform(rng);
  const double r = uniform(rng) < 0.5 ? 1.0 : std::sqrt(uniform(rng));
  const Complex beta = alpha * r * unit_phase(rng);
  ComplexMatrix c(2, 2);
  c << alpha, beta, std::conj(beta), alpha;
  return c;
}

/// Positive elements of span{E_11, E_22, E_33, E_12, E_21, E_13, E_31} (the
/// center index 0 is linked to 1 and 2, but 1 and 2 are not linked):
/// [[a, b, c], [conj b, d, 0], [conj c, 0, e]] with a, d, e >= 0,
/// |b|^2 <= a d, |c|^2 <= a e, |b|^2 e + |c|^2 d <= a d e.
/// Written as b = sqrt(a d) s1 u1, c = sqrt(a e) s2 u2 with s1^2 + s2^2 <= 1;
/// half the samples take s1^2 + s2^2 = 1.
inline ComplexMatrix sample_star_positive(Rng& rng) {
  const double a = uniform(rng), d = uniform(rng), e = uniform(rng);
  const double t = uniform(rng, 0.0, 3.14159265358979323846 / 2);
  const double rad = uniform(rng) < 0.5 ? 1.0 : std::sqrt(uniform(rng));
  const Complex b = std::sqrt(a * d) * rad * std::cos(t) * unit_phase(rng);
  const Complex c = std::sqrt(a * e) * rad * std::sin(t) * unit_phase(rng);
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = d;
  m(2, 2) = e;
  m(0, 1) = b;
  m(1, 0) = std::conj(b);
  m(0, 2) = c;
  m(2, 0) = std::conj(c);
  return m;
}

/// Relabels a 3 x 3 matrix so index 0 -> order[0], 1 -> order[1], 2 -> order[2].
inline ComplexMatrix relabel(const ComplexMatrix& m, const std::array<Index, 3>& order) {
  ComplexMatrix out = ComplexMatrix::Zero(3, 3);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) out(order[i], order[j]) = m(i, j);
  return out;
}

/// Positive elements of a block-diagonal *-algebra given by its blocks
/// (partition of {0..m-1}): each block an arbitrary PSD matrix. Half the
/// samples are rank one.
inline ComplexMatrix sample_algebra_positive(Rng& rng, Index m,
                                             const std::vector<std::vector<Index>>& blocks) {
  ComplexMatrix out = ComplexMatrix::Zero(m, m);
  const bool rank_one = uniform(rng) < 0.5;
  for (const auto& blk : blocks) {
    const Index s = static_cast<Index>(blk.size());
    const ComplexMatrix g = random_matrix(rng, s, rank_one ? 1 : s);
    const ComplexMatrix p = g * g.adjoint() * uniform(rng);
    for (Index i = 0; i < s; ++i)
      for (Index j = 0; j < s; ++j) out(blk[i], blk[j]) = p(i, j);
  }
  return out;
}

/// Real part of tr(D C), the pairing of a Hermitian density with C.
inline double pairing(const ComplexMatrix& d, const ComplexMatrix& c) {
  return (d * c).trace().real();
}

}  // namespace testsupport

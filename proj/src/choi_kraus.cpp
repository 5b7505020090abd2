#include "cpinterp/choi_kraus.hpp"

#include <sstream>

namespace cpinterp {

namespace {

void require_square(const ComplexMatrix& m, Index dim, const char* who) {
  if (m.rows() != dim || m.cols() != dim) {
    std::ostringstream msg;
    msg << who << ": expected " << dim << "x" << dim << ", got " << m.rows() << "x" << m.cols();
    throw DimensionError(msg.str());
  }
}

// Density-layout index a = i*n + l  ->  Choi-layout index l*k + i.
inline Index density_to_choi_index(Index a, Index n, Index k) {
  const Index i = a / n;
  const Index l = a % n;
  return l * k + i;
}

}  // namespace

ChoiMatrix::ChoiMatrix(Index n, Index k, ComplexMatrix matrix)
    : n_(n), k_(k), matrix_(std::move(matrix)) {
  if (n < 1 || k < 1) throw DimensionError("ChoiMatrix: dimensions must be positive");
  require_square(matrix_, n * k, "ChoiMatrix");
}

ChoiMatrix ChoiMatrix::zero(Index n, Index k) {
  return ChoiMatrix(n, k, ComplexMatrix::Zero(n * k, n * k));
}

KrausSet::KrausSet(Index n_, Index k_, std::vector<ComplexMatrix> ops_)
    : n(n_), k(k_), ops(std::move(ops_)) {
  for (const auto& v : ops) {
    if (v.rows() != n || v.cols() != k) {
      std::ostringstream msg;
      msg << "KrausSet: operation element is " << v.rows() << "x" << v.cols() << ", expected "
          << n << "x" << k;
      throw DimensionError(msg.str());
    }
  }
}

ComplexMatrix shuffle_matrix(Index n, Index k) {
  if (n < 1 || k < 1) throw DimensionError("shuffle_matrix: dimensions must be positive");
  ComplexMatrix u = ComplexMatrix::Zero(n * k, n * k);
  for (Index a = 0; a < n * k; ++a) u(density_to_choi_index(a, n, k), a) = 1.0;
  return u;
}

// Both conversions are index permutations plus conjugation; applying them
// entrywise avoids forming U and keeps the result bit-exact.
ComplexMatrix choi_to_density(const ChoiMatrix& choi) {
  const Index n = choi.n(), k = choi.k(), d = n * k;
  ComplexMatrix dens(d, d);
  for (Index b = 0; b < d; ++b) {
    const Index cb = density_to_choi_index(b, n, k);
    for (Index a = 0; a < d; ++a)
      dens(a, b) = std::conj(choi.matrix()(density_to_choi_index(a, n, k), cb));
  }
  return dens;
}

ChoiMatrix density_to_choi(const ComplexMatrix& density, Index n, Index k) {
  if (n < 1 || k < 1) throw DimensionError("density_to_choi: dimensions must be positive");
  const Index d = n * k;
  require_square(density, d, "density_to_choi");
  ComplexMatrix phi(d, d);
  for (Index b = 0; b < d; ++b) {
    const Index cb = density_to_choi_index(b, n, k);
    for (Index a = 0; a < d; ++a) phi(density_to_choi_index(a, n, k), cb) = std::conj(density(a, b));
  }
  return ChoiMatrix(n, k, std::move(phi));
}

Hermitian choi_to_density(const Hermitian& choi, Index n, Index k) {
  return Hermitian::hermitian_part(choi_to_density(ChoiMatrix(n, k, choi.matrix())));
}

Hermitian density_to_choi(const Hermitian& density, Index n, Index k) {
  return Hermitian::hermitian_part(density_to_choi(density.matrix(), n, k).matrix());
}

ChoiMatrix choi_from_blocks(Index n, Index k, const std::vector<ComplexMatrix>& blocks) {
  if (static_cast<Index>(blocks.size()) != n * n)
    throw DimensionError("choi_from_blocks: need n^2 blocks");
  ComplexMatrix phi(n * k, n * k);
  for (Index l = 0; l < n; ++l)
    for (Index m = 0; m < n; ++m) {
      const auto& b = blocks[static_cast<std::size_t>(l * n + m)];
      require_square(b, k, "choi_from_blocks");
      phi.block(l * k, m * k, k, k) = b;
    }
  return ChoiMatrix(n, k, std::move(phi));
}

ComplexMatrix apply_choi(const ChoiMatrix& choi, const ComplexMatrix& c) {
  const Index n = choi.n(), k = choi.k();
  require_square(c, n, "apply_choi");
  ComplexMatrix out = ComplexMatrix::Zero(k, k);
  for (Index l = 0; l < n; ++l)
    for (Index m = 0; m < n; ++m)
      if (c(l, m) != Complex(0)) out += c(l, m) * choi.matrix().block(l * k, m * k, k, k);
  return out;
}

ComplexMatrix apply_kraus(const KrausSet& kraus, const ComplexMatrix& a) {
  require_square(a, kraus.n, "apply_kraus");
  ComplexMatrix out = ComplexMatrix::Zero(kraus.k, kraus.k);
  for (const auto& v : kraus.ops) out.noalias() += v.adjoint() * a * v;
  return out;
}

ChoiMatrix choi_of_kraus(const KrausSet& kraus) {
  const Index n = kraus.n, k = kraus.k;
  ComplexMatrix phi = ComplexMatrix::Zero(n * k, n * k);
  ComplexVector g(n * k);
  for (const auto& v : kraus.ops) {
    for (Index l = 0; l < n; ++l)
      for (Index i = 0; i < k; ++i) g(l * k + i) = std::conj(v(l, i));
    phi.noalias() += g * g.adjoint();
  }
  return ChoiMatrix(n, k, std::move(phi));
}

KrausSet kraus_from_choi(const ChoiMatrix& choi, double tol) {
  const Index n = choi.n(), k = choi.k();
  const auto e = eigh(Hermitian::hermitian_part(choi.matrix()));
  if (e.min() < -tol) {
    std::ostringstream msg;
    msg << "kraus_from_choi: Choi matrix is not PSD (lambda_min = " << e.min() << ", tol " << tol
        << ")";
    throw NotPositiveSemidefiniteError(msg.str(), e.min());
  }
  std::vector<ComplexMatrix> ops;
  // Largest eigenvalue first.
  for (Index j = e.dim() - 1; j >= 0; --j) {
    const double lambda = e.values(j);
    if (lambda <= tol) break;
    const double s = std::sqrt(lambda);
    ComplexMatrix v(n, k);
    for (Index l = 0; l < n; ++l)
      for (Index i = 0; i < k; ++i) v(l, i) = s * std::conj(e.vectors(l * k + i, j));
    ops.push_back(std::move(v));
  }
  return KrausSet(n, k, std::move(ops));
}

KrausSet kraus_from_choi(const ChoiMatrix& choi) {
  const auto e = eigh(Hermitian::hermitian_part(choi.matrix()));
  return kraus_from_choi(choi, default_tolerance(e));
}

ComplexMatrix kraus_trace_operator(const KrausSet& kraus) {
  ComplexMatrix s = ComplexMatrix::Zero(kraus.n, kraus.n);
  for (const auto& v : kraus.ops) s.noalias() += v * v.adjoint();
  return s;
}

}  // namespace cpinterp

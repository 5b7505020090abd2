#pragma once

// Dense complex matrix kernel: Hilbert-Schmidt geometry, Hermitian
// eigendecomposition by cyclic Jacobi rotations, inertia, PSD projection,
// Gram-Schmidt over Hermitian matrices, Kronecker products and PSD roots.
//
// Everything is templated on the real type; the rest of the library uses the
// double-precision aliases at the bottom of this file.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <type_traits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "cpinterp/errors.hpp"

namespace cpinterp {

using Index = Eigen::Index;

template <typename Real>
using ComplexMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using RealMatrixT = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// ---------------------------------------------------------------------------
// Hilbert-Schmidt geometry
// ---------------------------------------------------------------------------

/// <X, Y>_HS = tr(Y* X). Linear in X, conjugate-linear in Y.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar hs_inner(const Eigen::MatrixBase<DerivedX>& x,
                                   const Eigen::MatrixBase<DerivedY>& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    std::ostringstream msg;
    msg << "hs_inner: dimension mismatch " << x.rows() << "x" << x.cols() << " vs " << y.rows()
        << "x" << y.cols();
    throw DimensionError(msg.str());
  }
  return y.conjugate().cwiseProduct(x).sum();
}

template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real hs_norm(
    const Eigen::MatrixBase<Derived>& x) {
  return x.norm();
}

// ---------------------------------------------------------------------------
// HermitianMatrix
// ---------------------------------------------------------------------------

/// Default relative tolerance for accepting a numerically Hermitian input.
inline constexpr double kHermitianRelTol = 1e-9;

/// Square complex matrix with entry(i,j) == conj(entry(j,i)) exactly.
///
/// Inputs within `rel_tol` of Hermitian (in Hilbert-Schmidt norm) are
/// symmetrized to (M + M*)/2; anything further off is rejected.
template <typename Real>
class HermitianMatrix {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = ComplexMatrixT<Real>;

  HermitianMatrix() = default;

  explicit HermitianMatrix(Index dim) : m_(Matrix::Zero(dim, dim)) {}

  template <typename Derived>
  explicit HermitianMatrix(const Eigen::MatrixBase<Derived>& m, Real rel_tol = Real(kHermitianRelTol)) {
    if (m.rows() != m.cols()) {
      std::ostringstream msg;
      msg << "HermitianMatrix: matrix is " << m.rows() << "x" << m.cols() << ", not square";
      throw DimensionError(msg.str());
    }
    Matrix full = m.template cast<Scalar>();
    const Real skew = (full - full.adjoint()).norm();
    const Real scale = full.norm();
    if (skew > rel_tol * scale) {
      std::ostringstream msg;
      msg << "HermitianMatrix: ||M - M*|| = " << skew << " exceeds " << rel_tol << " * ||M|| = "
          << rel_tol * scale;
      throw NotHermitianError(msg.str());
    }
    m_ = symmetrized(full);
  }

  /// (M + M*)/2 with no tolerance check.
  template <typename Derived>
  static HermitianMatrix hermitian_part(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) throw DimensionError("hermitian_part: matrix not square");
    HermitianMatrix h;
    h.m_ = symmetrized(m.template cast<Scalar>());
    return h;
  }

  static HermitianMatrix identity(Index dim) {
    HermitianMatrix h;
    h.m_ = Matrix::Identity(dim, dim);
    return h;
  }

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  Real trace() const { return m_.diagonal().real().sum(); }
  Real norm() const { return m_.norm(); }

  // Real-linear operations keep exact symmetry (conjugation commutes with
  // rounded addition and real scaling).
  HermitianMatrix operator+(const HermitianMatrix& o) const { return trusted(m_ + o.m_); }
  HermitianMatrix operator-(const HermitianMatrix& o) const { return trusted(m_ - o.m_); }
  HermitianMatrix operator-() const { return trusted(-m_); }
  HermitianMatrix operator*(Real s) const { return trusted(m_ * s); }
  friend HermitianMatrix operator*(Real s, const HermitianMatrix& h) { return h * s; }
  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    m_ += o.m_;
    return *this;
  }
  HermitianMatrix& operator-=(const HermitianMatrix& o) {
    m_ -= o.m_;
    return *this;
  }

 private:
  static HermitianMatrix trusted(Matrix m) {
    HermitianMatrix h;
    h.m_ = std::move(m);
    return h;
  }

  static Matrix symmetrized(const Matrix& m) {
    Matrix s = m;
    const Index n = m.rows();
    for (Index i = 0; i < n; ++i) {
      s(i, i) = Scalar(m(i, i).real(), Real(0));
      for (Index j = i + 1; j < n; ++j) {
        const Scalar v = (m(i, j) + std::conj(m(j, i))) / Real(2);
        s(i, j) = v;
        s(j, i) = std::conj(v);
      }
    }
    return s;
  }

  Matrix m_;
};

// ---------------------------------------------------------------------------
// Eigendecomposition (cyclic complex Jacobi)
// ---------------------------------------------------------------------------

template <typename Real>
struct EigenDecomposition {
  RealVectorT<Real> values;      ///< ascending
  ComplexMatrixT<Real> vectors;  ///< unitary, columns are eigenvectors

  Index dim() const { return values.size(); }
  Real min() const { return values.size() ? values(0) : Real(0); }
  Real max() const { return values.size() ? values(values.size() - 1) : Real(0); }
  Real max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : Real(0); }

  /// V f(Λ) V* for a real function f applied to the eigenvalues.
  template <typename F>
  ComplexMatrixT<Real> apply(F&& f) const {
    ComplexMatrixT<Real> scaled = vectors;
    for (Index j = 0; j < values.size(); ++j) scaled.col(j) *= f(values(j));
    return scaled * vectors.adjoint();
  }
};

struct JacobiOptions {
  int max_sweeps = 100;
  double off_diagonal_rel_tol = 1e-13;
};

namespace detail {

template <typename Real>
Real off_diagonal_norm(const ComplexMatrixT<Real>& a) {
  Real s = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

/// Rotates column phases so the first entry of non-negligible magnitude is
/// real and positive.
template <typename Real>
void normalize_phases(ComplexMatrixT<Real>& v) {
  const Real cut = std::sqrt(std::numeric_limits<Real>::epsilon());
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      const Real mag = std::abs(v(i, j));
      if (mag > cut) {
        v.col(j) *= std::conj(v(i, j)) / mag;
        v(i, j) = std::complex<Real>(mag, Real(0));
        break;
      }
    }
  }
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in ascending order.
template <typename Real>
EigenDecomposition<Real> eigh(const HermitianMatrix<Real>& h, const JacobiOptions& opts = {}) {
  using Scalar = std::complex<Real>;
  const Index n = h.dim();
  ComplexMatrixT<Real> a = h.matrix();
  ComplexMatrixT<Real> v = ComplexMatrixT<Real>::Identity(n, n);

  const Real scale = a.norm();
  const Real rel = std::max(Real(opts.off_diagonal_rel_tol),
                            Real(8) * std::numeric_limits<Real>::epsilon());
  const Real threshold = rel * scale;

  Real off = detail::off_diagonal_norm(a);
  int sweep = 0;
  while (off > threshold) {
    if (sweep == opts.max_sweeps) {
      std::ostringstream msg;
      msg << "eigh: no convergence after " << opts.max_sweeps
          << " Jacobi sweeps (off-diagonal norm " << off << ", threshold " << threshold << ")";
      throw ConvergenceError(msg.str(), static_cast<double>(off));
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        const Real g = std::abs(apq);
        if (g == Real(0)) continue;
        const Real app = a(p, p).real();
        const Real aqq = a(q, q).real();
        const Real tau = (aqq - app) / (Real(2) * g);
        Real t;
        if (std::abs(tau) > Real(1e150)) {
          t = Real(1) / (Real(2) * tau);
        } else {
          t = (tau >= 0 ? Real(1) : Real(-1)) / (std::abs(tau) + std::sqrt(Real(1) + tau * tau));
        }
        const Real c = Real(1) / std::sqrt(Real(1) + t * t);
        const Real s = t * c;
        const Scalar phase = apq / g;  // e^{i phi}
        const Scalar phase_c = std::conj(phase);

        // A <- A G with G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
        for (Index r = 0; r < n; ++r) {
          const Scalar arp = a(r, p);
          const Scalar arq = a(r, q);
          a(r, p) = c * arp - s * phase_c * arq;
          a(r, q) = s * arp + c * phase_c * arq;
        }
        // A <- G* A.
        for (Index r = 0; r < n; ++r) {
          const Scalar apr = a(p, r);
          const Scalar aqr = a(q, r);
          a(p, r) = c * apr - s * phase * aqr;
          a(q, r) = s * apr + c * phase * aqr;
        }
        a(p, p) = Scalar(app - t * g, 0);
        a(q, q) = Scalar(aqq + t * g, 0);
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);

        for (Index r = 0; r < n; ++r) {
          const Scalar vrp = v(r, p);
          const Scalar vrq = v(r, q);
          v(r, p) = c * vrp - s * phase_c * vrq;
          v(r, q) = s * vrp + c * phase_c * vrq;
        }
      }
    }
    ++sweep;
    off = detail::off_diagonal_norm(a);
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition<Real> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    out.values(j) = a(order[j], order[j]).real();
    out.vectors.col(j) = v.col(order[j]);
  }
  detail::normalize_phases(out.vectors);
  return out;
}

// ---------------------------------------------------------------------------
// Inertia
// ---------------------------------------------------------------------------

struct Inertia {
  Index minus = 0;
  Index zero = 0;
  Index plus = 0;

  Index dim() const { return minus + zero + plus; }
  bool positive_semidefinite() const { return minus == 0; }
  bool negative_semidefinite() const { return plus == 0; }
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// 1e-9 * dim * max|eigenvalue|: the rank/inertia cut used whenever the caller
/// does not supply one.
template <typename Real>
Real default_tolerance(const EigenDecomposition<Real>& e) {
  return Real(1e-9) * static_cast<Real>(e.dim()) * e.max_abs();
}

template <typename Real>
Inertia inertia(const EigenDecomposition<Real>& e, std::type_identity_t<Real> tol) {
  Inertia in;
  for (Index i = 0; i < e.values.size(); ++i) {
    const Real l = e.values(i);
    if (l < -tol)
      ++in.minus;
    else if (l > tol)
      ++in.plus;
    else
      ++in.zero;
  }
  return in;
}

template <typename Real>
Inertia inertia(const HermitianMatrix<Real>& h, std::type_identity_t<Real> tol) {
  if (tol < 0) throw std::invalid_argument("inertia: tolerance must be non-negative");
  return inertia(eigh(h), tol);
}

template <typename Real>
Inertia inertia(const HermitianMatrix<Real>& h) {
  const auto e = eigh(h);
  return inertia(e, default_tolerance(e));
}

// ---------------------------------------------------------------------------
// PSD projection and roots
// ---------------------------------------------------------------------------

/// Nearest positive semidefinite matrix in Hilbert-Schmidt norm.
template <typename Real>
HermitianMatrix<Real> psd_project(const EigenDecomposition<Real>& e) {
  return HermitianMatrix<Real>::hermitian_part(
      e.apply([](Real l) { return std::max(l, Real(0)); }));
}

template <typename Real>
HermitianMatrix<Real> psd_project(const HermitianMatrix<Real>& h) {
  return psd_project(eigh(h));
}

namespace detail {
template <typename Real>
void require_psd(const EigenDecomposition<Real>& e, Real tol, const char* who) {
  if (e.min() < -tol) {
    std::ostringstream msg;
    msg << who << ": matrix is not positive semidefinite (lambda_min = " << e.min()
        << " < -" << tol << ")";
    throw NotPositiveSemidefiniteError(msg.str(), static_cast<double>(e.min()));
  }
}
}  // namespace detail

template <typename Real>
HermitianMatrix<Real> sqrt_psd(const HermitianMatrix<Real>& h, std::type_identity_t<Real> tol) {
  const auto e = eigh(h);
  detail::require_psd(e, tol, "sqrt_psd");
  return HermitianMatrix<Real>::hermitian_part(
      e.apply([](Real l) { return l > 0 ? std::sqrt(l) : Real(0); }));
}

template <typename Real>
HermitianMatrix<Real> sqrt_psd(const HermitianMatrix<Real>& h) {
  const auto e = eigh(h);
  return sqrt_psd(h, default_tolerance(e));
}

/// Moore-Penrose inverse of sqrt_psd(h): eigenvalues at or below tol map to 0.
template <typename Real>
HermitianMatrix<Real> pinv_sqrt(const HermitianMatrix<Real>& h, std::type_identity_t<Real> tol) {
  const auto e = eigh(h);
  detail::require_psd(e, tol, "pinv_sqrt");
  return HermitianMatrix<Real>::hermitian_part(
      e.apply([tol](Real l) { return l > tol ? Real(1) / std::sqrt(l) : Real(0); }));
}

template <typename Real>
HermitianMatrix<Real> pinv_sqrt(const HermitianMatrix<Real>& h) {
  const auto e = eigh(h);
  return pinv_sqrt(h, default_tolerance(e));
}

// ---------------------------------------------------------------------------
// Gram-Schmidt over Hermitian matrices
// ---------------------------------------------------------------------------

template <typename Real>
struct GramSchmidtResult {
  /// Orthonormal Hermitian outputs.
  std::vector<HermitianMatrix<Real>> basis;
  /// inputs.size() x basis.size(): input_i = sum_j coefficients(i, j) basis_j
  /// (up to the residual tolerance for dependent inputs).
  RealMatrixT<Real> coefficients;
  /// basis.size() x inputs.size(): basis_j = sum_i transform(j, i) input_i.
  RealMatrixT<Real> transform;
  /// Inputs whose residual norm fell to tol or below; skipped.
  std::vector<std::size_t> dependent;
};

/// Classical Gram-Schmidt with one re-orthogonalization pass. Coefficients are
/// real because tr(GH) is real for Hermitian G, H, so outputs stay Hermitian.
/// `tol` is an absolute bound on the residual Hilbert-Schmidt norm.
template <typename Real>
GramSchmidtResult<Real> gram_schmidt_herm(std::span<const HermitianMatrix<Real>> inputs,
                                          std::type_identity_t<Real> tol) {
  GramSchmidtResult<Real> out;
  const std::size_t count = inputs.size();
  if (count == 0) return out;
  const Index dim = inputs[0].dim();
  for (const auto& h : inputs)
    if (h.dim() != dim) throw DimensionError("gram_schmidt_herm: inputs differ in dimension");

  out.coefficients = RealMatrixT<Real>::Zero(static_cast<Index>(count), static_cast<Index>(count));
  RealMatrixT<Real> transform =
      RealMatrixT<Real>::Zero(static_cast<Index>(count), static_cast<Index>(count));

  for (std::size_t i = 0; i < count; ++i) {
    ComplexMatrixT<Real> v = inputs[i].matrix();
    RealVectorT<Real> t = RealVectorT<Real>::Zero(static_cast<Index>(count));
    t(static_cast<Index>(i)) = 1;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < out.basis.size(); ++j) {
        const Real c = std::real(hs_inner(v, out.basis[j].matrix()));
        v -= c * out.basis[j].matrix();
        t -= c * transform.row(static_cast<Index>(j)).transpose();
        out.coefficients(static_cast<Index>(i), static_cast<Index>(j)) += c;
      }
    }
    const Real r = v.norm();
    if (r <= tol) {
      out.dependent.push_back(i);
      continue;
    }
    const Index j = static_cast<Index>(out.basis.size());
    out.coefficients(static_cast<Index>(i), j) = r;
    transform.row(j) = (t / r).transpose();
    out.basis.push_back(HermitianMatrix<Real>::hermitian_part(v / r));
  }
  const Index kept = static_cast<Index>(out.basis.size());
  out.coefficients.conservativeResize(Eigen::NoChange, kept);
  out.transform = transform.topRows(kept);
  return out;
}

template <typename Real>
GramSchmidtResult<Real> gram_schmidt_herm(const std::vector<HermitianMatrix<Real>>& inputs,
                                          std::type_identity_t<Real> tol) {
  return gram_schmidt_herm(std::span<const HermitianMatrix<Real>>(inputs), tol);
}

// ---------------------------------------------------------------------------
// Kronecker products, bases, coordinates
// ---------------------------------------------------------------------------

/// X (x) Y with X in the left factor: block (i, j) of the result is X(i,j) * Y,
/// so entry (i*ny + l, j*my + m) = X(i,j) Y(l,m).
template <typename DerivedX, typename DerivedY>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const Index yr = y.rows(), yc = y.cols();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(x.rows() * yr, x.cols() * yc);
  const auto yy = y.template cast<Scalar>().eval();
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) out.block(i * yr, j * yc, yr, yc) = x(i, j) * yy;
  return out;
}

template <typename Real>
HermitianMatrix<Real> kron(const HermitianMatrix<Real>& x, const HermitianMatrix<Real>& y) {
  return HermitianMatrix<Real>::hermitian_part(kron(x.matrix(), y.matrix()));
}

/// Orthonormal Hermitian basis of M_n: diagonal units E_ll, then for each
/// l < m the pair (E_lm + E_ml)/sqrt2, i(E_lm - E_ml)/sqrt2.
template <typename Real>
std::vector<HermitianMatrix<Real>> hermitian_unit_basis(Index n) {
  using Scalar = std::complex<Real>;
  std::vector<HermitianMatrix<Real>> basis;
  basis.reserve(static_cast<std::size_t>(n * n));
  for (Index l = 0; l < n; ++l) {
    ComplexMatrixT<Real> e = ComplexMatrixT<Real>::Zero(n, n);
    e(l, l) = 1;
    basis.push_back(HermitianMatrix<Real>::hermitian_part(e));
  }
  const Real r = Real(1) / std::sqrt(Real(2));
  for (Index l = 0; l < n; ++l) {
    for (Index m = l + 1; m < n; ++m) {
      ComplexMatrixT<Real> s = ComplexMatrixT<Real>::Zero(n, n);
      s(l, m) = r;
      s(m, l) = r;
      basis.push_back(HermitianMatrix<Real>::hermitian_part(s));
      ComplexMatrixT<Real> a = ComplexMatrixT<Real>::Zero(n, n);
      a(l, m) = Scalar(0, r);
      a(m, l) = Scalar(0, -r);
      basis.push_back(HermitianMatrix<Real>::hermitian_part(a));
    }
  }
  return basis;
}

/// Real isometric coordinates of a Hermitian matrix: diagonal, then
/// sqrt2*Re and sqrt2*Im of each strictly upper entry. hvec(X).dot(hvec(Y))
/// equals tr(XY).
template <typename Real>
RealVectorT<Real> hvec(const HermitianMatrix<Real>& h) {
  const Index n = h.dim();
  RealVectorT<Real> v(n * n);
  const Real s2 = std::sqrt(Real(2));
  Index k = 0;
  for (Index i = 0; i < n; ++i) v(k++) = h(i, i).real();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      v(k++) = s2 * h(i, j).real();
      v(k++) = s2 * h(i, j).imag();
    }
  return v;
}

template <typename Real, typename Derived>
HermitianMatrix<Real> unhvec(const Eigen::MatrixBase<Derived>& v, Index n) {
  if (v.size() != n * n) throw DimensionError("unhvec: coordinate vector has wrong length");
  ComplexMatrixT<Real> m(n, n);
  const Real r = Real(1) / std::sqrt(Real(2));
  Index k = 0;
  for (Index i = 0; i < n; ++i) m(i, i) = Real(v(k++));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const Real re = Real(v(k++)) * r;
      const Real im = Real(v(k++)) * r;
      m(i, j) = std::complex<Real>(re, im);
      m(j, i) = std::complex<Real>(re, -im);
    }
  return HermitianMatrix<Real>::hermitian_part(m);
}

/// Trace over the left factor of M_k (x) M_n: sum of the k diagonal n x n blocks.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> partial_trace_left(
    const Eigen::MatrixBase<Derived>& x, Index k, Index n) {
  if (x.rows() != k * n || x.cols() != k * n)
    throw DimensionError("partial_trace_left: matrix is not kn x kn");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Index i = 0; i < k; ++i) out += x.block(i * n, i * n, n, n);
  return out;
}

// ---------------------------------------------------------------------------
// double-precision aliases
// ---------------------------------------------------------------------------

using Complex = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using RealVector = RealVectorT<double>;
using RealMatrix = RealMatrixT<double>;
using Hermitian = HermitianMatrix<double>;
using Eigensystem = EigenDecomposition<double>;

}  // namespace cpinterp

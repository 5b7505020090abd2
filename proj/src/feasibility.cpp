#include "cpinterp/feasibility.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace cpinterp {

const char* to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::Feasible:
      return "feasible";
    case FeasibilityStatus::GapStalled:
      return "gap_stalled";
    case FeasibilityStatus::IterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

namespace {

// Dykstra iteration at which an unfinished search hands over to the barrier
// refinement (once).
constexpr int kRefineAt = 500;

// Orthogonal projection onto {d + F p : G (d + F p) = r} in hvec coordinates.
// With F orthonormal the unconstrained coordinates are p0 = F^T (y - d); the
// constraint rows then act on p through M = G F, and the minimal correction
// is M^+ (M p0 - h) with h = r - G d.
class AffineProjector {
 public:
  AffineProjector(RealVector d, RealMatrix f, const RealMatrix& g, const RealVector& r)
      : d_(std::move(d)), f_(std::move(f)) {
    if (g.rows() > 0) {
      m_ = g * f_;
      h_ = r - g * d_;
      if (m_.cols() == 0) {
        m_pinv_ = RealMatrix::Zero(0, m_.rows());
      } else {
        Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(m_);
        m_pinv_ = cod.pseudoInverse();
      }
      const RealVector p_ls = m_pinv_ * h_;
      consistency_residual_ = (m_ * p_ls - h_).norm();
      constraint_scale_ = h_.norm();
    }
  }

  bool has_constraints() const { return m_.rows() > 0; }
  double consistency_residual() const { return consistency_residual_; }
  double constraint_scale() const { return constraint_scale_; }
  /// ||G d - r||: how far the base point itself is from the constraints.
  double base_violation() const { return has_constraints() ? h_.norm() : 0.0; }

  RealVector coordinates(const RealVector& y) const {
    RealVector p = f_.transpose() * (y - d_);
    if (has_constraints()) p -= m_pinv_ * (m_ * p - h_);
    return p;
  }

  RealVector point(const RealVector& p) const { return d_ + f_ * p; }

  /// Minimum-norm coordinates meeting the constraints.
  RealVector particular() const {
    return has_constraints() ? RealVector(m_pinv_ * h_) : RealVector::Zero(f_.cols());
  }

  /// Orthonormal basis of {p : M p = 0}.
  RealMatrix nullspace() const {
    const Index count = f_.cols();
    if (!has_constraints() || count == 0) return RealMatrix::Identity(count, count);
    Eigen::JacobiSVD<RealMatrix> svd(m_, Eigen::ComputeFullV);
    const RealVector& sv = svd.singularValues();
    const double cut = 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    return svd.matrixV().rightCols(count - rank);
  }

 private:
  RealVector d_;
  RealMatrix f_;
  RealMatrix m_;
  RealMatrix m_pinv_;
  RealVector h_;
  double consistency_residual_ = 0.0;
  double constraint_scale_ = 0.0;
};

RealVector psd_project_coords(const RealVector& z, Index dim, double* lambda_min) {
  const auto e = eigh(unhvec<double>(z, dim));
  if (lambda_min) *lambda_min = e.min();
  return hvec(psd_project(e));
}

// Log-barrier path for
//
//     maximize t  subject to  S(z, t) = B + sum_j z_j E_j - t I >= 0,
//                             t <= t_cap,  ||z|| <= radius,
//
// where B is the constrained base point and E_j span the admissible
// directions. Along the path X = S + t I stays exactly on the affine set and
// lambda_min(X) >= t, so the path reaches PSD points even when none is
// strictly positive, a case where alternating projections decay sublinearly.
// Returns z once lambda_min(X) >= -tol / 2, or nothing when the duality bound
// t + nu * mu already rules that out, or the Newton budget runs out.
class BarrierPath {
 public:
  BarrierPath(Hermitian base, std::vector<ComplexMatrix> directions, double tol)
      : base_(std::move(base)), dirs_(std::move(directions)), tol_(tol) {
    dim_ = base_.dim();
    nz_ = static_cast<Index>(dirs_.size());
    scale_ = 1.0 + base_.norm();
    radius_ = 1e3 * scale_;
    t_cap_ = scale_;
  }

  std::optional<RealVector> run() {
    RealVector y = RealVector::Zero(nz_ + 1);
    y(nz_) = eigh(base_).min() - scale_;
    // nu: barrier parameter of log det S plus the two scalar bounds.
    const double nu = static_cast<double>(dim_) + 2.0;
    double mu = scale_;
    int newton = 0;
    for (int outer = 0; outer < kMaxOuter; ++outer) {
      for (int inner = 0; inner < kMaxInner && newton < kMaxNewton; ++inner, ++newton)
        if (!newton_step(y, mu)) break;
      const double t = y(nz_);
      const double lmin = eigh(Hermitian::hermitian_part(slack(y))).min() + t;
      if (lmin >= -tol_ / 2) return RealVector(y.head(nz_));
      if (t + nu * mu < -tol_ || newton >= kMaxNewton) return std::nullopt;
      mu *= 0.2;
    }
    return std::nullopt;
  }

 private:
  static constexpr int kMaxOuter = 60;
  static constexpr int kMaxInner = 50;
  static constexpr int kMaxNewton = 600;

  ComplexMatrix slack(const RealVector& y) const {
    ComplexMatrix s = base_.matrix();
    for (Index j = 0; j < nz_; ++j) s += y(j) * dirs_[static_cast<std::size_t>(j)];
    s.diagonal().array() -= y(nz_);
    return s;
  }

  double objective(const RealVector& y, double mu) const {
    const double cap_slack = t_cap_ - y(nz_);
    const double ball_slack = radius_ * radius_ - y.head(nz_).squaredNorm();
    if (!(cap_slack > 0) || !(ball_slack > 0)) return std::numeric_limits<double>::infinity();
    Eigen::LLT<ComplexMatrix> llt(slack(y));
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (Index i = 0; i < dim_; ++i) {
      const double diag = llt.matrixLLT()(i, i).real();
      if (!(diag > 0)) return std::numeric_limits<double>::infinity();
      logdet += 2.0 * std::log(diag);
    }
    return -y(nz_) / mu - logdet - std::log(cap_slack) - std::log(ball_slack);
  }

  // One damped Newton step on the barrier objective; false once the Newton
  // decrement is negligible or no descent is possible.
  bool newton_step(RealVector& y, double mu) const {
    Eigen::LLT<ComplexMatrix> llt(slack(y));
    if (llt.info() != Eigen::Success) return false;
    const Index nv = nz_ + 1;
    const Index len = dim_ * dim_;
    // Columns hvec(L^-1 E_j L^-*): gradient entries are their traces and the
    // Hessian of -log det S is their Gram matrix.
    RealMatrix scaled(len, nv);
    RealVector grad(nv);
    for (Index j = 0; j < nv; ++j) {
      const ComplexMatrix e = j < nz_ ? dirs_[static_cast<std::size_t>(j)]
                                      : ComplexMatrix(-ComplexMatrix::Identity(dim_, dim_));
      const ComplexMatrix half = llt.matrixL().solve(e);
      const ComplexMatrix w = llt.matrixL().solve(ComplexMatrix(half.adjoint())).adjoint();
      const Hermitian wh = Hermitian::hermitian_part(w);
      scaled.col(j) = hvec(wh);
      grad(j) = -wh.trace();
    }
    RealMatrix hess = scaled.transpose() * scaled;
    const double cap_slack = t_cap_ - y(nz_);
    grad(nz_) += -1.0 / mu + 1.0 / cap_slack;
    hess(nz_, nz_) += 1.0 / (cap_slack * cap_slack);
    const double ball_slack = radius_ * radius_ - y.head(nz_).squaredNorm();
    grad.head(nz_) += 2.0 * y.head(nz_) / ball_slack;
    hess.topLeftCorner(nz_, nz_) += (2.0 / ball_slack) * RealMatrix::Identity(nz_, nz_) +
                                    (4.0 / (ball_slack * ball_slack)) * y.head(nz_) *
                                        y.head(nz_).transpose();

    Eigen::LDLT<RealMatrix> ldlt(hess);
    const RealVector step = -ldlt.solve(grad);
    const double decrement = -grad.dot(step);
    if (!(decrement > 1e-14)) return false;

    const double f0 = objective(y, mu);
    for (double alpha = 1.0; alpha > 1e-12; alpha *= 0.5) {
      const RealVector next = y + alpha * step;
      if (objective(next, mu) <= f0 - 0.25 * alpha * decrement) {
        y = next;
        return decrement > 1e-12;
      }
    }
    return false;
  }

  Hermitian base_;
  std::vector<ComplexMatrix> dirs_;
  double tol_;
  Index dim_ = 0;
  Index nz_ = 0;
  double scale_ = 1.0;
  double radius_ = 1.0;
  double t_cap_ = 1.0;
};

}  // namespace

FeasibilityResult find_psd_point(const Hermitian& base, std::span<const Hermitian> directions,
                                 const AffineConstraints& constraints,
                                 const FeasibilityOptions& opts) {
  const Index dim = base.dim();
  const Index len = dim * dim;
  const Index count = static_cast<Index>(directions.size());

  RealMatrix f(len, count);
  for (Index mu = 0; mu < count; ++mu) {
    if (directions[static_cast<std::size_t>(mu)].dim() != dim)
      throw DimensionError("find_psd_point: direction dimension differs from base");
    f.col(mu) = hvec(directions[static_cast<std::size_t>(mu)]);
  }
  RealMatrix g(static_cast<Index>(constraints.size()), len);
  RealVector r(static_cast<Index>(constraints.size()));
  for (std::size_t c = 0; c < constraints.size(); ++c) {
    if (constraints[c].functional.dim() != dim)
      throw DimensionError("find_psd_point: constraint dimension differs from base");
    g.row(static_cast<Index>(c)) = hvec(constraints[c].functional).transpose();
    r(static_cast<Index>(c)) = constraints[c].rhs;
  }

  const RealVector d = hvec(base);
  AffineProjector proj(d, f, g, r);

  FeasibilityResult out;
  out.p = RealVector::Zero(count);

  auto finish = [&](FeasibilityStatus status, const RealVector& p, double gap, int iterations) {
    out.status = status;
    out.p = p;
    out.gap = gap;
    out.iterations = iterations;
    Hermitian x = unhvec<double>(proj.point(p), dim);
    out.lambda_min = eigh(x).min();
    out.x = std::move(x);
    return out;
  };

  if (proj.has_constraints() &&
      proj.consistency_residual() > opts.tol * std::max(1.0, proj.constraint_scale())) {
    out.note = "affine constraints are inconsistent on the search directions";
    return finish(FeasibilityStatus::GapStalled, proj.coordinates(d), proj.consistency_residual(),
                  0);
  }

  // Base point already PSD and on the constraints.
  {
    const double lmin = eigh(base).min();
    if (lmin >= -opts.tol && proj.base_violation() <= opts.tol) {
      out.status = FeasibilityStatus::Feasible;
      out.x = base;
      out.lambda_min = lmin;
      return out;
    }
  }

  // Barrier refinement from the constrained base point; accepted only when
  // the resulting point passes both membership tests.
  auto refine = [&]() -> std::optional<RealVector> {
    const RealVector p0 = proj.particular();
    const RealMatrix null = proj.nullspace();
    std::vector<ComplexMatrix> dirs;
    dirs.reserve(static_cast<std::size_t>(null.cols()));
    for (Index j = 0; j < null.cols(); ++j)
      dirs.push_back(unhvec<double>(RealVector(f * null.col(j)), dim).matrix());
    BarrierPath path(unhvec<double>(proj.point(p0), dim), std::move(dirs), opts.tol);
    const auto z = path.run();
    if (!z) return std::nullopt;
    const RealVector p = p0 + null * *z;
    const RealVector x = proj.point(p);
    if ((proj.point(proj.coordinates(x)) - x).norm() > opts.tol) return std::nullopt;
    if (eigh(unhvec<double>(x, dim)).min() < -opts.tol) return std::nullopt;
    return p;
  };

  // Dykstra: only the cone step carries a correction term, since the increment
  // of an affine projection is normal to the affine set and is absorbed by the
  // next projection onto it.
  RealVector p = proj.coordinates(d);
  RealVector x = proj.point(p);
  RealVector q = RealVector::Zero(len);
  const double stall_eps = opts.stall_eps;
  double prev_gap = std::numeric_limits<double>::infinity();
  int flat = 0;
  double gap = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= opts.max_iter; ++it) {
    const RealVector z = x + q;
    const RealVector c = psd_project_coords(z, dim, nullptr);
    q = z - c;
    p = proj.coordinates(c);
    x = proj.point(p);
    gap = (c - x).norm();
    if (opts.record_gaps) out.gap_history.push_back(gap);

    if (gap <= opts.tol) return finish(FeasibilityStatus::Feasible, p, gap, it);

    // Without a strictly positive point in the affine set the gap decays
    // sublinearly; the barrier path handles that case directly.
    if (it == kRefineAt) {
      if (auto refined = refine()) {
        out.note = "refined by interior-point path";
        return finish(FeasibilityStatus::Feasible, *refined, 0.0, it);
      }
    }

    if (std::abs(prev_gap - gap) < stall_eps) {
      if (++flat >= opts.stall_window) return finish(FeasibilityStatus::GapStalled, p, gap, it);
    } else {
      flat = 0;
    }
    prev_gap = gap;
  }
  return finish(FeasibilityStatus::IterationLimit, p, gap, opts.max_iter);
}

}  // namespace cpinterp

#include "cpinterp/subspace.hpp"

#include <algorithm>
#include <sstream>

#include "cpinterp/feasibility.hpp"

namespace cpinterp {

Hermitian SpanBasis::project(const Hermitian& h) const {
  Hermitian out(h.dim());
  for (const auto& g : span) out += std::real(hs_inner(h.matrix(), g.matrix())) * g;
  return out;
}

SpanBasis build_span(const std::vector<Hermitian>& a, double tol) {
  if (a.empty()) throw DimensionError("build_span: no input matrices");
  SpanBasis out;
  out.n = a.front().dim();
  auto gs = gram_schmidt_herm(a, tol);
  out.span = std::move(gs.basis);
  out.coefficients = std::move(gs.coefficients);
  out.transform = std::move(gs.transform);
  out.dependent = std::move(gs.dependent);

  // In hvec coordinates the Hermitian unit basis is the standard basis, so the
  // complement is grown by pivoted Gram-Schmidt over unit vectors: each step
  // takes the unit vector with the largest residual against everything kept.
  const Index len = out.n * out.n;
  const Index want = len - static_cast<Index>(out.span.size());
  RealMatrix q(len, len);
  Index kept = 0;
  for (const auto& g : out.span) q.col(kept++) = hvec(g);

  std::vector<bool> used(static_cast<std::size_t>(len), false);
  for (Index step = 0; step < want; ++step) {
    // residual of e_a is e_a - Q Q^T e_a; its squared norm is 1 - |row a of Q|^2.
    Index best = -1;
    double best_norm = -1.0;
    for (Index a = 0; a < len; ++a) {
      if (used[static_cast<std::size_t>(a)]) continue;
      const double r2 = 1.0 - q.topLeftCorner(len, kept).row(a).squaredNorm();
      if (r2 > best_norm) {
        best_norm = r2;
        best = a;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    RealVector v = RealVector::Unit(len, best);
    for (int pass = 0; pass < 2; ++pass) {
      const auto qk = q.topLeftCorner(len, kept);
      v -= qk * (qk.transpose() * v);
    }
    v.normalize();
    q.col(kept++) = v;
    out.complement.push_back(unhvec<double>(v, out.n));
  }
  return out;
}

std::vector<Hermitian> tensor_complement(Index k, const SpanBasis& basis) {
  std::vector<Hermitian> out;
  if (basis.complement.empty()) return out;
  const auto units = hermitian_unit_basis<double>(k);
  out.reserve(units.size() * basis.complement.size());
  for (const auto& h : units)
    for (const auto& f : basis.complement) out.push_back(kron(h, f));
  return out;
}

bool contains_identity(const SpanBasis& basis, double tol) {
  const auto id = Hermitian::identity(basis.n);
  return (id - basis.project(id)).norm() <= tol;
}

std::optional<Hermitian> positive_definite_element(const SpanBasis& basis,
                                                   const DefiniteSearchOptions& opts) {
  if (basis.span.empty()) return std::nullopt;
  // PSD points of -delta*I + span are exactly X - delta*I with X in the span
  // and X >= delta*I.
  FeasibilityOptions fo;
  fo.tol = opts.tol;
  fo.max_iter = opts.max_iter;
  fo.stall_eps = opts.stall_eps;
  fo.stall_window = opts.stall_window;
  const auto res =
      find_psd_point(Hermitian::identity(basis.n) * (-opts.delta), basis.span, {}, fo);
  if (!res.feasible()) return std::nullopt;
  Hermitian x(basis.n);
  for (std::size_t j = 0; j < basis.span.size(); ++j)
    x += res.p(static_cast<Index>(j)) * basis.span[j];
  if (eigh(x).min() <= 0.0) return std::nullopt;
  return x;
}

// ---------------------------------------------------------------------------

UnitRelation::UnitRelation(Index m, std::vector<std::pair<Index, Index>> pairs)
    : m_(m), pairs_(std::move(pairs)) {
  if (m < 1) throw RelationError("UnitRelation: ground set must be non-empty");
  for (const auto& [i, j] : pairs_) {
    if (i < 0 || i >= m || j < 0 || j >= m) {
      std::ostringstream msg;
      msg << "UnitRelation: pair (" << i << ", " << j << ") outside {0.." << m - 1 << "}";
      throw RelationError(msg.str());
    }
  }
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

UnitRelation UnitRelation::equality(Index m) {
  std::vector<std::pair<Index, Index>> p;
  for (Index i = 0; i < m; ++i) p.emplace_back(i, i);
  return UnitRelation(m, std::move(p));
}

bool UnitRelation::contains(Index i, Index j) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), std::make_pair(i, j));
}

bool UnitRelation::reflexive() const {
  for (Index i = 0; i < m_; ++i)
    if (!contains(i, i)) return false;
  return true;
}

bool UnitRelation::symmetric() const {
  return std::all_of(pairs_.begin(), pairs_.end(),
                     [this](const auto& p) { return contains(p.second, p.first); });
}

bool UnitRelation::transitive() const {
  for (const auto& [i, j] : pairs_)
    for (Index l = 0; l < m_; ++l)
      if (contains(j, l) && !contains(i, l)) return false;
  return true;
}

std::vector<Hermitian> UnitRelation::hermitian_basis() const {
  if (!symmetric()) throw RelationError("hermitian_basis: relation is not symmetric");
  std::vector<Hermitian> out;
  const double r = 1.0 / std::sqrt(2.0);
  for (const auto& [i, j] : pairs_) {
    if (i > j) continue;
    if (i == j) {
      ComplexMatrix e = ComplexMatrix::Zero(m_, m_);
      e(i, i) = 1.0;
      out.push_back(Hermitian::hermitian_part(e));
      continue;
    }
    ComplexMatrix s = ComplexMatrix::Zero(m_, m_);
    s(i, j) = r;
    s(j, i) = r;
    out.push_back(Hermitian::hermitian_part(s));
    ComplexMatrix a = ComplexMatrix::Zero(m_, m_);
    a(i, j) = Complex(0, r);
    a(j, i) = Complex(0, -r);
    out.push_back(Hermitian::hermitian_part(a));
  }
  return out;
}

const char* to_string(RelationClass c) {
  switch (c) {
    case RelationClass::NotStarClosed:
      return "not_star_closed";
    case RelationClass::OperatorSystem:
      return "operator_system";
    case RelationClass::Algebra:
      return "algebra";
  }
  return "unknown";
}

RelationClass classify_relation(const UnitRelation& r) {
  if (!r.reflexive() || !r.symmetric()) return RelationClass::NotStarClosed;
  return r.transitive() ? RelationClass::Algebra : RelationClass::OperatorSystem;
}

std::optional<std::array<Index, 3>> intransitive_triple(const UnitRelation& r) {
  for (const auto& [i, j] : r.pairs()) {
    if (i == j) continue;
    for (Index l = 0; l < r.m(); ++l)
      if (l != i && l != j && r.contains(j, l) && !r.contains(i, l))
        return std::array<Index, 3>{i, j, l};
  }
  return std::nullopt;
}

Hermitian counterexample_functional(const UnitRelation& r, double rho) {
  switch (classify_relation(r)) {
    case RelationClass::NotStarClosed:
      throw RelationError("counterexample_functional: relation is not reflexive and symmetric");
    case RelationClass::Algebra:
      throw RelationError(
          "counterexample_functional: relation is an equivalence relation; every positive "
          "functional on its span has a PSD density");
    case RelationClass::OperatorSystem:
      break;
  }
  if (!(rho > 1.0 / std::sqrt(2.0) && rho <= 1.0)) {
    std::ostringstream msg;
    msg << "counterexample_functional: rho = " << rho << " outside (1/sqrt2, 1]";
    throw std::invalid_argument(msg.str());
  }
  // In a reflexive symmetric relation an intransitive triple is automatically
  // made of distinct indices.
  const auto t = *intransitive_triple(r);
  const Index i = t[0], j = t[1], l = t[2];
  ComplexMatrix d = ComplexMatrix::Zero(r.m(), r.m());
  d(i, i) = d(j, j) = d(l, l) = 1.0;
  d(i, j) = d(j, i) = rho;
  d(j, l) = d(l, j) = rho;
  return Hermitian::hermitian_part(d);
}

}  // namespace cpinterp

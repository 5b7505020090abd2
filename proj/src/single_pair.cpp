#include "cpinterp/single_pair.hpp"

#include <sstream>

namespace cpinterp {

namespace {

SpectralSplit split_from(const Eigensystem& e, double tol) {
  SpectralSplit s;
  s.dim = e.dim();
  // Ascending eigenvalues: walk down for the positive list and up for the
  // negative list so both come out by magnitude descending.
  for (Index j = e.dim() - 1; j >= 0 && e.values(j) > tol; --j)
    s.plus.push_back({e.values(j), e.vectors.col(j)});
  for (Index j = 0; j < e.dim() && e.values(j) < -tol; ++j)
    s.minus.push_back({-e.values(j), e.vectors.col(j)});
  s.kernel_dim = s.dim - static_cast<Index>(s.plus.size() + s.minus.size());
  return s;
}

std::string inertia_text(const Inertia& in) {
  std::ostringstream o;
  o << "(" << in.minus << ", " << in.zero << ", " << in.plus << ")";
  return o.str();
}

// V = sum sqrt(b_i / a_i) w_i u_i* over same-sign pairings by rank.
ComplexMatrix assemble(const SpectralSplit& a, const std::vector<const EigenPair*>& b_plus,
                       const std::vector<const EigenPair*>& b_minus, Index k) {
  ComplexMatrix v = ComplexMatrix::Zero(a.dim, k);
  for (std::size_t i = 0; i < b_plus.size(); ++i)
    v += std::sqrt(b_plus[i]->value / a.plus[i].value) * a.plus[i].vector *
         b_plus[i]->vector.adjoint();
  for (std::size_t i = 0; i < b_minus.size(); ++i)
    v += std::sqrt(b_minus[i]->value / a.minus[i].value) * a.minus[i].vector *
         b_minus[i]->vector.adjoint();
  return v;
}

std::vector<const EigenPair*> pointers(const std::vector<EigenPair>& ps) {
  std::vector<const EigenPair*> out;
  for (const auto& p : ps) out.push_back(&p);
  return out;
}

KrausSet solve_split(const SpectralSplit& a, const SpectralSplit& b) {
  const auto r = minimal_rank(a.inertia(), b.inertia());
  if (!r) {
    throw InertiaConditionError("no CP map takes A to B: input inertia " +
                                inertia_text(a.inertia()) + ", output inertia " +
                                inertia_text(b.inertia()));
  }
  std::vector<std::vector<const EigenPair*>> plus(*r), minus(*r);
  for (std::size_t i = 0; i < b.plus.size(); ++i) plus[i % *r].push_back(&b.plus[i]);
  for (std::size_t i = 0; i < b.minus.size(); ++i) minus[i % *r].push_back(&b.minus[i]);
  std::vector<ComplexMatrix> ops;
  for (std::size_t g = 0; g < *r; ++g) ops.push_back(assemble(a, plus[g], minus[g], b.dim));
  return KrausSet(a.dim, b.dim, std::move(ops));
}

}  // namespace

Hermitian SpectralSplit::reconstruct() const {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (const auto& p : plus) m += p.value * p.vector * p.vector.adjoint();
  for (const auto& p : minus) m -= p.value * p.vector * p.vector.adjoint();
  return Hermitian::hermitian_part(m);
}

SpectralSplit spectral_split(const Hermitian& h, double tol) {
  if (tol < 0) throw std::invalid_argument("spectral_split: tolerance must be non-negative");
  return split_from(eigh(h), tol);
}

SpectralSplit spectral_split(const Hermitian& h) {
  const auto e = eigh(h);
  return split_from(e, default_tolerance(e));
}

ComplexMatrix rank_one_map(const Hermitian& a, const Hermitian& b, double tol) {
  const auto sa = spectral_split(a, tol);
  const auto sb = spectral_split(b, tol);
  if (sb.plus.size() > sa.plus.size() || sb.minus.size() > sa.minus.size())
    throw InertiaConditionError("rank_one_map: output inertia " + inertia_text(sb.inertia()) +
                                " exceeds input inertia " + inertia_text(sa.inertia()));
  return assemble(sa, pointers(sb.plus), pointers(sb.minus), b.dim());
}

ComplexMatrix rank_one_map(const Hermitian& a, const Hermitian& b) {
  const auto sa = spectral_split(a);
  const auto sb = spectral_split(b);
  if (sb.plus.size() > sa.plus.size() || sb.minus.size() > sa.minus.size())
    throw InertiaConditionError("rank_one_map: output inertia " + inertia_text(sb.inertia()) +
                                " exceeds input inertia " + inertia_text(sa.inertia()));
  return assemble(sa, pointers(sb.plus), pointers(sb.minus), b.dim());
}

std::optional<std::size_t> minimal_rank(const Inertia& a, const Inertia& b) {
  auto need = [](Index have, Index want) -> std::optional<std::size_t> {
    if (want == 0) return 0;
    if (have == 0) return std::nullopt;
    return static_cast<std::size_t>((want + have - 1) / have);
  };
  const auto rp = need(a.plus, b.plus);
  const auto rm = need(a.minus, b.minus);
  if (!rp || !rm) return std::nullopt;
  return std::max(*rp, *rm);
}

std::optional<std::size_t> minimal_rank(const Hermitian& a, const Hermitian& b, double tol) {
  return minimal_rank(inertia(a, tol), inertia(b, tol));
}

std::optional<std::size_t> minimal_rank(const Hermitian& a, const Hermitian& b) {
  return minimal_rank(inertia(a), inertia(b));
}

KrausSet solve_single(const Hermitian& a, const Hermitian& b, double tol) {
  return solve_split(spectral_split(a, tol), spectral_split(b, tol));
}

KrausSet solve_single(const Hermitian& a, const Hermitian& b) {
  return solve_split(spectral_split(a), spectral_split(b));
}

}  // namespace cpinterp

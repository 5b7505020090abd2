#include "cpinterp/interpolation.hpp"

#include <sstream>

namespace cpinterp {

namespace {

enum class DefiniteType { Zero, Positive, Negative, Indefinite };

DefiniteType definite_type(const Hermitian& h) {
  const auto e = eigh(h);
  const auto in = inertia(e, default_tolerance(e));
  if (in.plus == 0 && in.minus == 0) return DefiniteType::Zero;
  if (in.minus == 0) return DefiniteType::Positive;
  if (in.plus == 0) return DefiniteType::Negative;
  return DefiniteType::Indefinite;
}

const char* describe(DefiniteType t) {
  switch (t) {
    case DefiniteType::Zero:
      return "zero";
    case DefiniteType::Positive:
      return "positive semidefinite";
    case DefiniteType::Negative:
      return "negative semidefinite";
    case DefiniteType::Indefinite:
      return "indefinite";
  }
  return "unknown";
}

// A CP map sends PSD to PSD and NSD to NSD.
bool types_compatible(DefiniteType a, DefiniteType b) {
  if (b == DefiniteType::Zero) return true;
  if (a == DefiniteType::Positive) return b == DefiniteType::Positive;
  if (a == DefiniteType::Negative) return b == DefiniteType::Negative;
  return true;
}

double max_norm(const std::vector<Hermitian>& hs) {
  double m = 0.0;
  for (const auto& h : hs) m = std::max(m, h.norm());
  return m;
}

}  // namespace

void Problem::validate() const {
  if (n < 1 || k < 1) throw DimensionError("problem: n and k must be positive");
  if (a.empty()) throw DimensionError("problem: at least one pair is required");
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << "problem: " << a.size() << " inputs but " << b.size() << " outputs";
    throw DimensionError(msg.str());
  }
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (a[v].rows() != n || a[v].cols() != n) {
      std::ostringstream msg;
      msg << "problem: input " << v << " is " << a[v].rows() << "x" << a[v].cols()
          << ", expected " << n << "x" << n;
      throw DimensionError(msg.str());
    }
    if (b[v].rows() != k || b[v].cols() != k) {
      std::ostringstream msg;
      msg << "problem: output " << v << " is " << b[v].rows() << "x" << b[v].cols()
          << ", expected " << k << "x" << k;
      throw DimensionError(msg.str());
    }
    if (!a[v].allFinite() || !b[v].allFinite()) {
      std::ostringstream msg;
      msg << "problem: pair " << v << " has a non-finite entry";
      throw DimensionError(msg.str());
    }
  }
}

CanonicalProblem canonicalize(const Problem& problem, double tol) {
  problem.validate();
  CanonicalProblem cp;
  cp.original = problem;
  const Complex two_i(0.0, 2.0);

  for (std::size_t v = 0; v < problem.size(); ++v) {
    const ComplexMatrix& a = problem.a[v];
    const ComplexMatrix& b = problem.b[v];
    const bool herm_a = (a - a.adjoint()).norm() <= kHermitianRelTol * a.norm();
    const bool herm_b = (b - b.adjoint()).norm() <= kHermitianRelTol * b.norm();
    if (herm_a && herm_b) {
      cp.inputs.push_back(Hermitian::hermitian_part(a));
      cp.outputs.push_back(Hermitian::hermitian_part(b));
      continue;
    }
    // phi is Hermitian preserving, so phi(Re A) = Re B and phi(Im A) = Im B.
    cp.report.split.push_back(v);
    cp.inputs.push_back(Hermitian::hermitian_part(a));
    cp.outputs.push_back(Hermitian::hermitian_part(b));
    cp.inputs.push_back(Hermitian::hermitian_part(ComplexMatrix((a - a.adjoint()) / two_i)));
    cp.outputs.push_back(Hermitian::hermitian_part(ComplexMatrix((b - b.adjoint()) / two_i)));
  }

  const double a_tol = tol * std::max(1.0, max_norm(cp.inputs));
  cp.report.identity_in_input_span =
      contains_identity(build_span(cp.inputs, a_tol), a_tol * std::sqrt(double(problem.n)));
  if (problem.unital) {
    cp.inputs.push_back(Hermitian::identity(problem.n));
    cp.outputs.push_back(Hermitian::identity(problem.k));
    cp.report.unital_pair_added = true;
  }

  cp.basis = build_span(cp.inputs, tol * std::max(1.0, max_norm(cp.inputs)));
  cp.report.dependent = cp.basis.dependent;
  cp.a = cp.basis.span;
  const Index kept = static_cast<Index>(cp.a.size());
  for (Index j = 0; j < kept; ++j) {
    Hermitian bj(problem.k);
    for (std::size_t i = 0; i < cp.outputs.size(); ++i) {
      const double t = cp.basis.transform(j, static_cast<Index>(i));
      if (t != 0.0) bj += t * cp.outputs[i];
    }
    cp.b.push_back(std::move(bj));
  }

  const double b_tol = tol * std::max(1.0, max_norm(cp.outputs));
  for (std::size_t d : cp.basis.dependent) {
    Hermitian predicted(problem.k);
    for (Index j = 0; j < kept; ++j)
      predicted += cp.basis.coefficients(static_cast<Index>(d), j) * cp.b[static_cast<std::size_t>(j)];
    const double mismatch = (cp.outputs[d] - predicted).norm();
    if (mismatch > b_tol) {
      std::ostringstream msg;
      msg << "inconsistent dependence: input " << d
          << " is a linear combination of earlier inputs but its output differs from the same "
             "combination of outputs by "
          << mismatch << " (tolerance " << b_tol << ")";
      throw InconsistentDependenceError(msg.str(), d, mismatch);
    }
  }
  return cp;
}

Hermitian density_orthonormal(const std::vector<Hermitian>& a, const std::vector<Hermitian>& b) {
  if (a.empty() || a.size() != b.size())
    throw DimensionError("density_orthonormal: need equally many non-zero inputs and outputs");
  const Index n = a.front().dim(), k = b.front().dim();
  ComplexMatrix d = ComplexMatrix::Zero(k * n, k * n);
  for (std::size_t v = 0; v < a.size(); ++v) d += kron(b[v].matrix().transpose(), a[v].matrix());
  return Hermitian::hermitian_part(d);
}

Hermitian density_gram(const std::vector<Hermitian>& a, const std::vector<Hermitian>& b) {
  if (a.empty() || a.size() != b.size())
    throw DimensionError("density_gram: need equally many non-zero inputs and outputs");
  const Index count = static_cast<Index>(a.size());
  RealMatrix gram(count, count);
  for (Index v = 0; v < count; ++v)
    for (Index mu = 0; mu < count; ++mu)
      gram(v, mu) = std::real(hs_inner(a[static_cast<std::size_t>(v)].matrix(),
                                       a[static_cast<std::size_t>(mu)].matrix()));
  const Eigen::LDLT<RealMatrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw DimensionError("density_gram: inputs are linearly dependent");
  // Solve entrywise: for each (i, j), gram * c_(ij) = b_(ij); real and
  // imaginary parts separately since gram is real.
  const Index n = a.front().dim(), k = b.front().dim();
  RealMatrix rhs_re(count, k * k), rhs_im(count, k * k);
  for (Index v = 0; v < count; ++v)
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j) {
        rhs_re(v, i * k + j) = b[static_cast<std::size_t>(v)](i, j).real();
        rhs_im(v, i * k + j) = b[static_cast<std::size_t>(v)](i, j).imag();
      }
  const RealMatrix c_re = ldlt.solve(rhs_re);
  const RealMatrix c_im = ldlt.solve(rhs_im);
  ComplexMatrix d = ComplexMatrix::Zero(k * n, k * n);
  for (Index mu = 0; mu < count; ++mu) {
    ComplexMatrix c(k, k);
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j) c(i, j) = Complex(c_re(mu, i * k + j), c_im(mu, i * k + j));
    d += kron(c.transpose(), a[static_cast<std::size_t>(mu)].matrix());
  }
  return Hermitian::hermitian_part(d);
}

DensityData density_matrix(const CanonicalProblem& problem) {
  DensityData out;
  out.n = problem.n();
  out.k = problem.k();
  out.basis = problem.basis;
  out.tensor_complement = tensor_complement(out.k, out.basis);
  if (problem.a.empty())
    out.d = Hermitian(out.k * out.n);
  else
    out.d = density_orthonormal(problem.a, problem.b);
  return out;
}

const char* to_string(PrecheckViolation::Kind kind) {
  switch (kind) {
    case PrecheckViolation::Kind::SemidefiniteType:
      return "semidefinite_type";
    case PrecheckViolation::Kind::NegativeTrace:
      return "negative_trace";
  }
  return "unknown";
}

std::vector<PrecheckViolation> prechecks(const CanonicalProblem& problem,
                                         const DensityData& density, double tol) {
  std::vector<PrecheckViolation> out;
  auto scan = [&out](const std::vector<Hermitian>& a, const std::vector<Hermitian>& b,
                     bool canonical) {
    for (std::size_t v = 0; v < a.size(); ++v) {
      const auto ta = definite_type(a[v]);
      const auto tb = definite_type(b[v]);
      if (types_compatible(ta, tb)) continue;
      std::ostringstream msg;
      msg << (canonical ? "orthonormalized pair " : "pair ") << v << ": input is "
          << describe(ta) << " but output is " << describe(tb);
      PrecheckViolation pv;
      pv.kind = PrecheckViolation::Kind::SemidefiniteType;
      pv.index = v;
      pv.canonical = canonical;
      pv.value = ta == DefiniteType::Positive ? eigh(b[v]).min() : eigh(b[v]).max();
      pv.message = msg.str();
      out.push_back(std::move(pv));
    }
  };
  scan(problem.inputs, problem.outputs, false);
  scan(problem.a, problem.b, true);

  // Complement elements of an operator system are traceless, so every
  // candidate X has tr(X) = tr(D).
  if (contains_identity(density.basis, tol * std::sqrt(double(density.n)))) {
    const double tr = density.d.trace();
    if (tr < -tol * std::max(1.0, density.d.norm())) {
      PrecheckViolation pv;
      pv.kind = PrecheckViolation::Kind::NegativeTrace;
      pv.value = tr;
      std::ostringstream msg;
      msg << "identity is in the input span but tr(D) = " << tr << " < 0";
      pv.message = msg.str();
      out.push_back(std::move(pv));
    }
  }
  return out;
}

AffineConstraints trace_preserving_constraints(const CanonicalProblem& problem,
                                               const DensityData& density) {
  (void)problem;
  AffineConstraints out;
  const auto id_k = ComplexMatrix::Identity(density.k, density.k);
  for (const auto& h : hermitian_unit_basis<double>(density.n))
    out.push_back({Hermitian::hermitian_part(kron(id_k, h.matrix())), h.trace()});
  return out;
}

FeasibilityResult feasibility(const DensityData& density, const AffineConstraints* constraints,
                              const FeasibilityOptions& opts) {
  static const AffineConstraints none;
  return find_psd_point(density.d, density.tensor_complement, constraints ? *constraints : none,
                        opts);
}

FeasibilityOptions SolveOptions::feasibility_options() const {
  FeasibilityOptions fo;
  fo.tol = tol;
  fo.max_iter = max_iter;
  fo.stall_eps = stall_eps;
  fo.stall_window = stall_window;
  fo.seed = seed;
  fo.record_gaps = record_gaps;
  return fo;
}

double Solution::max_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

Solution extract_solution(const DensityData& density, const FeasibilityResult& result,
                          const CanonicalProblem& problem, const SolveOptions& opts) {
  if (!result.feasible() || !result.x)
    throw std::invalid_argument("extract_solution: feasibility result is not Feasible");
  const Index n = density.n, k = density.k;

  Solution sol;
  sol.x = psd_project(*result.x);
  sol.p = result.p;
  sol.iterations = result.iterations;
  // Eigenvalues below the rank cut are dropped from the Kraus set; the Choi
  // matrix is rebuilt from it so both describe the same map.
  sol.kraus = kraus_from_choi(density_to_choi(sol.x.matrix(), n, k));
  sol.choi = choi_of_kraus(sol.kraus);

  if (problem.original.trace_preserving && sol.kraus.size() > 0) {
    // S = sum V V* is within the solver tolerance of I_n; V -> S^{-1/2} V makes
    // it exact while keeping the map CP.
    const auto s = Hermitian::hermitian_part(kraus_trace_operator(sol.kraus));
    if (eigh(s).min() > 0.5) {
      const ComplexMatrix t = pinv_sqrt(s).matrix();
      for (auto& v : sol.kraus.ops) v = t * v;
      sol.choi = choi_of_kraus(sol.kraus);
    }
  }

  const Problem& orig = problem.original;
  double b_scale = 1.0;
  for (std::size_t v = 0; v < orig.size(); ++v) {
    sol.residuals.push_back((apply_kraus(sol.kraus, orig.a[v]) - orig.b[v]).norm());
    b_scale = std::max(b_scale, orig.b[v].norm());
  }
  if (orig.trace_preserving)
    sol.trace_residual = (kraus_trace_operator(sol.kraus) - ComplexMatrix::Identity(n, n)).norm();
  if (orig.unital)
    sol.unital_residual =
        (apply_kraus(sol.kraus, ComplexMatrix::Identity(n, n)) - ComplexMatrix::Identity(k, k))
            .norm();

  const double bound = opts.solution_tol * b_scale;
  if (sol.max_residual() > bound) {
    std::ostringstream msg;
    msg << "interpolation residual " << sol.max_residual() << " exceeds " << bound;
    throw ResidualError(msg.str(), sol.residuals);
  }
  return sol;
}

const char* to_string(DiagnosisStage stage) {
  switch (stage) {
    case DiagnosisStage::InconsistentDependence:
      return "inconsistent_dependence";
    case DiagnosisStage::PrecheckViolation:
      return "precheck_violation";
    case DiagnosisStage::GapStalled:
      return "gap_stalled";
    case DiagnosisStage::IterationLimit:
      return "iteration_limit";
    case DiagnosisStage::ResidualExceeded:
      return "residual_exceeded";
  }
  return "unknown";
}

CheckReport check(const Problem& problem, const SolveOptions& opts) {
  problem.validate();
  CheckReport rep;
  try {
    rep.canonical = canonicalize(problem, opts.tol);
  } catch (const InconsistentDependenceError& e) {
    rep.diagnosis = Diagnosis{DiagnosisStage::InconsistentDependence, e.what(), {}, {}, {}};
    return rep;
  }
  rep.density = density_matrix(*rep.canonical);
  rep.violations = prechecks(*rep.canonical, *rep.density, opts.tol);
  if (!rep.violations.empty()) {
    std::ostringstream msg;
    msg << "necessary condition violated: " << rep.violations.front().message;
    rep.diagnosis =
        Diagnosis{DiagnosisStage::PrecheckViolation, msg.str(), rep.violations, {}, {}};
    return rep;
  }

  std::optional<AffineConstraints> constraints;
  if (problem.trace_preserving)
    constraints = trace_preserving_constraints(*rep.canonical, *rep.density);
  rep.feasibility = feasibility(*rep.density, constraints ? &*constraints : nullptr,
                                opts.feasibility_options());
  if (!rep.feasibility->feasible()) {
    const bool stalled = rep.feasibility->status == FeasibilityStatus::GapStalled;
    std::ostringstream msg;
    msg << "no PSD point found; " << (stalled ? "stalled gap = " : "gap after iteration limit = ")
        << rep.feasibility->gap;
    if (!rep.feasibility->note.empty()) msg << " (" << rep.feasibility->note << ")";
    rep.diagnosis = Diagnosis{stalled ? DiagnosisStage::GapStalled : DiagnosisStage::IterationLimit,
                              msg.str(), {}, rep.feasibility, {}};
  }
  return rep;
}

SolveOutcome solve(const Problem& problem, const SolveOptions& opts) {
  CheckReport rep = check(problem, opts);
  if (rep.diagnosis) return std::move(*rep.diagnosis);
  try {
    return extract_solution(*rep.density, *rep.feasibility, *rep.canonical, opts);
  } catch (const ResidualError& e) {
    return Diagnosis{DiagnosisStage::ResidualExceeded, e.what(), {}, rep.feasibility,
                     e.residuals()};
  }
}

}  // namespace cpinterp

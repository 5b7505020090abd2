#include <doctest.h>

#include <cmath>
#include <limits>

#include "cpinterp/interpolation.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace cpinterp;
using namespace testsupport;

namespace {

const double kSqrt2 = std::sqrt(2.0);

Problem pair_problem(Index n, Index k, std::vector<ComplexMatrix> a, std::vector<ComplexMatrix> b) {
  Problem p;
  p.n = n;
  p.k = k;
  p.a = std::move(a);
  p.b = std::move(b);
  return p;
}

struct Forward {
  Problem problem;
  KrausSet psi;
};

Forward forward(Rng& rng, Index n, Index k, Index count, bool channel = false, bool with_identity = false) {
  Forward f;
  f.problem.n = n;
  f.problem.k = k;
  f.problem.trace_preserving = channel;
  const Index min_ops = channel ? (n + k - 1) / k : 1;
  const Index ops = uniform_int(rng, min_ops, n * k);
  f.psi = channel ? random_channel(rng, n, k, ops) : random_kraus(rng, n, k, ops);
  const auto blocks = kraus_blocks(f.psi);
  for (const auto& a : random_orthonormal_hermitians(rng, n, count, with_identity)) {
    f.problem.a.push_back(a.matrix());
    f.problem.b.push_back(apply_blocks(blocks, n, a.matrix()));
  }
  return f;
}

// phi(A)_ij = tr(X (E_ij (x) A)).
ComplexMatrix map_from_density(const ComplexMatrix& x, Index k, const ComplexMatrix& a) {
  ComplexMatrix out(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) out(i, j) = (x * kron_oracle(unit(k, i, j), a)).trace();
  return out;
}

}  // namespace

TEST_CASE("Problem::validate rejects malformed input") {
  CHECK_THROWS_AS(pair_problem(2, 2, {}, {}).validate(), DimensionError);
  CHECK_THROWS_AS(pair_problem(2, 2, {pauli(0)}, {}).validate(), DimensionError);
  CHECK_THROWS_AS(pair_problem(2, 2, {pauli(0)}, {ComplexMatrix::Identity(3, 3)}).validate(),
                  DimensionError);
  ComplexMatrix bad = pauli(0);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pair_problem(2, 2, {bad}, {pauli(0)}).validate(), DimensionError);
  CHECK_NOTHROW(pair_problem(2, 3, {pauli(0)}, {ComplexMatrix::Identity(3, 3)}).validate());
}

TEST_CASE("canonicalize examples") {
  const auto merged = canonicalize(pair_problem(2, 2, {pauli(0), 2.0 * pauli(0)}, {pauli(0), 2.0 * pauli(0)}));
  REQUIRE(merged.a.size() == 1);
  CHECK((merged.a[0].matrix() - pauli(0) / kSqrt2).norm() < 1e-14);
  CHECK((merged.b[0].matrix() - pauli(0) / kSqrt2).norm() < 1e-14);
  CHECK(merged.report.dependent == std::vector<std::size_t>{1});

  CHECK_THROWS_AS(canonicalize(pair_problem(2, 2, {pauli(0), 2.0 * pauli(0)}, {pauli(0), pauli(0)})),
                  InconsistentDependenceError);

  Rng rng(51);
  const ComplexMatrix b1 = random_hermitian(rng, 3).matrix(), b2 = random_hermitian(rng, 3).matrix();
  const auto ortho = canonicalize(pair_problem(2, 3, {pauli(0), pauli(3)}, {b1, b2}));
  REQUIRE(ortho.a.size() == 2);
  CHECK((ortho.a[0].matrix() - pauli(0) / kSqrt2).norm() < 1e-14);
  CHECK((ortho.a[1].matrix() - pauli(3) / kSqrt2).norm() < 1e-14);
  CHECK((ortho.b[0].matrix() - b1 / kSqrt2).norm() < 1e-14);
  CHECK((ortho.b[1].matrix() - b2 / kSqrt2).norm() < 1e-14);
}

TEST_CASE("canonicalize splits non-Hermitian pairs into real and imaginary parts") {
  Rng rng(52);
  const KrausSet psi = random_kraus(rng, 2, 2, 2);
  const ComplexMatrix a = unit(2, 0, 1);
  const auto cp = canonicalize(pair_problem(2, 2, {a}, {apply_kraus(psi, a)}));
  CHECK(cp.report.split == std::vector<std::size_t>{0});
  REQUIRE(cp.inputs.size() == 2);
  CHECK((cp.inputs[0].matrix() - (a + a.adjoint()) / 2.0).norm() < 1e-14);
  CHECK((cp.inputs[1].matrix() - (a - a.adjoint()) / Complex(0, 2)).norm() < 1e-14);
  // The split outputs are the images of the split inputs.
  for (std::size_t i = 0; i < 2; ++i)
    CHECK((apply_kraus(psi, cp.inputs[i].matrix()) - cp.outputs[i].matrix()).norm() < 1e-12);

  const auto sol = solve(pair_problem(2, 2, {a}, {apply_kraus(psi, a)}));
  REQUIRE(std::holds_alternative<Solution>(sol));
  CHECK(std::get<Solution>(sol).max_residual() <= 1e-7);
}

TEST_CASE("unital flag adds the identity pair or checks it") {
  Problem p = pair_problem(2, 2, {pauli(3)}, {pauli(3)});
  p.unital = true;
  const auto cp = canonicalize(p);
  CHECK(cp.report.unital_pair_added);
  CHECK_FALSE(cp.report.identity_in_input_span);
  CHECK(cp.a.size() == 2);

  Problem clash = pair_problem(2, 2, {pauli(0)}, {2.0 * pauli(0)});
  clash.unital = true;
  CHECK_THROWS_AS(canonicalize(clash), InconsistentDependenceError);

  const auto sol = solve(p);
  REQUIRE(std::holds_alternative<Solution>(sol));
  const Solution& s = std::get<Solution>(sol);
  REQUIRE(s.unital_residual);
  CHECK(*s.unital_residual <= 1e-7);
}

TEST_CASE("density_matrix examples") {
  Rng rng(53);
  const Hermitian b = random_hermitian(rng, 3);
  const auto dens = density_matrix(canonicalize(pair_problem(2, 3, {pauli(0) / kSqrt2}, {b.matrix()})));
  CHECK((dens.d.matrix() - kron_oracle(b.matrix().transpose(), pauli(0) / kSqrt2)).norm() < 1e-14);

  // Single PSD pair before normalization: D is PSD.
  const Hermitian a_psd = random_psd(rng, 3, 2), b_psd = random_psd(rng, 2, 1);
  const auto psd = density_matrix(canonicalize(pair_problem(3, 2, {a_psd.matrix()}, {b_psd.matrix()})));
  CHECK(lambda_min_oracle(psd.d.matrix()) >= -1e-12);
}

TEST_CASE("orthonormal and Gram density paths agree") {
  Rng rng(54);
  for (int t = 0; t < 20; ++t) {
    const Index n = uniform_int(rng, 1, 3), k = uniform_int(rng, 1, 3);
    const Index count = uniform_int(rng, 1, n * n);
    const auto a = random_orthonormal_hermitians(rng, n, count);
    std::vector<Hermitian> b;
    for (Index c = 0; c < count; ++c) b.push_back(random_hermitian(rng, k));
    CHECK((density_orthonormal(a, b).matrix() - density_gram(a, b).matrix()).norm() < 1e-12);

    // Gram path on a non-orthonormal basis of the same span, outputs mapped alike.
    std::vector<Hermitian> a2, b2;
    for (Index c = 0; c < count; ++c) {
      Hermitian ac = a[std::size_t(c)], bc = b[std::size_t(c)];
      if (c > 0) {
        ac += 0.5 * a[0];
        bc += 0.5 * b[0];
      }
      a2.push_back(2.0 * ac);
      b2.push_back(2.0 * bc);
    }
    CHECK((density_orthonormal(a, b).matrix() - density_gram(a2, b2).matrix()).norm() < 1e-10);
  }
}

TEST_CASE("density reproduces the output entries") {
  Rng rng(55);
  for (int t = 0; t < 20; ++t) {
    const Index n = uniform_int(rng, 1, 3), k = uniform_int(rng, 1, 3);
    Problem p = pair_problem(n, k, {}, {});
    for (Index c = 0; c < uniform_int(rng, 1, n * n); ++c) {
      p.a.push_back(random_hermitian(rng, n).matrix());
      p.b.push_back(random_hermitian(rng, k).matrix());
    }
    const auto cp = canonicalize(p);
    const auto dens = density_matrix(cp);
    for (std::size_t v = 0; v < cp.a.size(); ++v)
      CHECK((map_from_density(dens.d.matrix(), k, cp.a[v].matrix()) - cp.b[v].matrix()).norm() <= 1e-9 * (1 + cp.b[v].norm()));
    // Original pairs too: the density is fixed by the span alone.
    for (std::size_t v = 0; v < p.size(); ++v)
      CHECK((map_from_density(dens.d.matrix(), k, p.a[v]) - p.b[v]).norm() <= 1e-9 * (1 + p.b[v].norm()));
  }
}

TEST_CASE("prechecks examples") {
  {
    const auto cp = canonicalize(pair_problem(2, 2, {unit(2, 0, 0)}, {pauli(3)}));
    const auto v = prechecks(cp, density_matrix(cp));
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].kind == PrecheckViolation::Kind::SemidefiniteType);
    CHECK(v[0].index == 0);
  }
  {
    const auto cp = canonicalize(pair_problem(2, 2, {pauli(0) / kSqrt2}, {-pauli(0) / kSqrt2}));
    const auto v = prechecks(cp, density_matrix(cp));
    bool trace = false;
    for (const auto& x : v) trace |= x.kind == PrecheckViolation::Kind::NegativeTrace;
    CHECK(trace);
  }
  {
    // Negative trace without the identity in the span is not a violation.
    const auto cp = canonicalize(pair_problem(2, 2, {pauli(1)}, {-pauli(0)}));
    for (const auto& x : prechecks(cp, density_matrix(cp)))
      CHECK(x.kind != PrecheckViolation::Kind::NegativeTrace);
  }
  Rng rng(56);
  for (int t = 0; t < 20; ++t) {
    const Forward f = forward(rng, 2, 2, 1);
    const auto cp = canonicalize(f.problem);
    const auto dens = density_matrix(cp);
    if (lambda_min_oracle(dens.d.matrix()) >= 0) CHECK(prechecks(cp, dens).empty());
  }
  CHECK(std::string(to_string(PrecheckViolation::Kind::NegativeTrace)).size() > 0);
}

TEST_CASE("trace_preserving_constraints examples") {
  Rng rng(57);
  const Index n = 3, k = 2;
  const auto cp = canonicalize(pair_problem(n, k, {ComplexMatrix::Identity(3, 3)}, {ComplexMatrix::Identity(2, 2)}));
  const auto dens = density_matrix(cp);
  const auto cons = trace_preserving_constraints(cp, dens);
  CHECK(Index(cons.size()) == n * n);

  ComplexMatrix sigma = random_psd(rng, k, k).matrix();
  sigma /= sigma.trace();
  auto violation = [&](const ComplexMatrix& x) {
    double worst = 0;
    for (const auto& c : cons) worst = std::max(worst, std::abs((x * c.functional.matrix()).trace().real() - c.rhs));
    return worst;
  };
  const ComplexMatrix good = kron_oracle(sigma, ComplexMatrix::Identity(n, n));
  CHECK(violation(good) < 1e-12);
  CHECK(violation(2.0 * good) > 0.1);

  // Coordinate form: partial trace over the output factor equals I_n exactly
  // when every constraint holds.
  const ComplexMatrix x = random_hermitian(rng, n * k).matrix();
  const ComplexMatrix pt = partial_trace_oracle(x, k, n) - ComplexMatrix::Identity(n, n);
  CHECK(violation(x) <= pt.norm() + 1e-12);
  CHECK(pt.norm() <= violation(x) * double(n * n) + 1e-12);
}

TEST_CASE("trace-preserving solutions are channels") {
  Rng rng(58);
  for (int t = 0; t < 10; ++t) {
    const Forward f = forward(rng, uniform_int(rng, 2, 3), uniform_int(rng, 2, 3), uniform_int(rng, 1, 3), true);
    const auto sol = solve(f.problem);
    REQUIRE(std::holds_alternative<Solution>(sol));
    const Solution& s = std::get<Solution>(sol);
    const Index n = f.problem.n;
    CHECK((kraus_trace_operator(s.kraus) - ComplexMatrix::Identity(n, n)).norm() <= 1e-8);
    REQUIRE(s.trace_residual);
    CHECK(*s.trace_residual <= 1e-8);
    CHECK(s.max_residual() <= 1e-7);
  }
}

TEST_CASE("extract_solution examples") {
  const auto sol = solve(pair_problem(2, 2, {pauli(0) / kSqrt2}, {pauli(0) / kSqrt2}));
  REQUIRE(std::holds_alternative<Solution>(sol));
  const Solution& s = std::get<Solution>(sol);
  CHECK((apply_kraus(s.kraus, pauli(0)) - pauli(0)).norm() < 1e-9);

  Rng rng(59);
  const Forward f = forward(rng, 3, 2, 2);
  const auto cp = canonicalize(f.problem);
  const auto dens = density_matrix(cp);
  const auto res = feasibility(dens, nullptr, FeasibilityOptions{});
  REQUIRE(res.feasible());
  SolveOptions strict;
  strict.solution_tol = 1e-30;
  CHECK_THROWS_AS(extract_solution(dens, res, cp, strict), ResidualError);

  FeasibilityResult not_feasible = res;
  not_feasible.status = FeasibilityStatus::GapStalled;
  CHECK_THROWS(extract_solution(dens, not_feasible, cp));
}

TEST_CASE("solutions are sound on forward-generated problems") {
  Rng rng(60);
  int solved = 0;
  for (int t = 0; t < 100; ++t) {
    const Forward f = forward(rng, uniform_int(rng, 2, 3), uniform_int(rng, 2, 3), uniform_int(rng, 1, 3),
                              false, t % 4 == 0);
    const auto out = solve(f.problem);
    REQUIRE(std::holds_alternative<Solution>(out));
    ++solved;
    const Solution& s = std::get<Solution>(out);
    const ComplexMatrix& phi = s.choi.matrix();
    CHECK(lambda_min_oracle(phi) >= -1e-8 * phi.norm());
    CHECK(s.max_residual() <= 1e-7);
    for (std::size_t v = 0; v < f.problem.size(); ++v)
      CHECK((apply_kraus(s.kraus, f.problem.a[v]) - f.problem.b[v]).norm() <= 1e-7);
    const ComplexMatrix c = random_matrix(rng, f.problem.n, f.problem.n);
    CHECK((apply_kraus(s.kraus, c) - apply_choi(s.choi, c)).norm() <= 1e-9 * (1 + c.norm()));
    if (t % 4 == 0) CHECK(s.x.trace() >= -1e-9);
  }
  CHECK(solved == 100);
}

TEST_CASE("complement directions do not change the map on the input span") {
  Rng rng(61);
  for (int t = 0; t < 10; ++t) {
    const Forward f = forward(rng, 2, 3, 2);
    const auto cp = canonicalize(f.problem);
    const auto dens = density_matrix(cp);
    const auto res = feasibility(dens, nullptr, FeasibilityOptions{});
    REQUIRE(res.feasible());
    REQUIRE_FALSE(dens.tensor_complement.empty());
    ComplexMatrix shifted = res.x->matrix();
    for (const auto& g : dens.tensor_complement) shifted += normal(rng) * g.matrix();
    const ComplexMatrix a = (normal(rng) * cp.a[0].matrix() + normal(rng) * cp.a[1].matrix());
    CHECK((map_from_density(res.x->matrix(), 3, a) - map_from_density(shifted, 3, a)).norm() <= 1e-10 * (1 + a.norm() * shifted.norm()));
  }
}

TEST_CASE("solve diagnoses") {
  const auto pre = solve(pair_problem(2, 2, {unit(2, 0, 0)}, {pauli(3)}));
  REQUIRE(std::holds_alternative<Diagnosis>(pre));
  CHECK(std::get<Diagnosis>(pre).stage == DiagnosisStage::PrecheckViolation);
  CHECK_FALSE(std::get<Diagnosis>(pre).violations.empty());

  const auto dep = solve(pair_problem(2, 2, {pauli(0), 2.0 * pauli(0)}, {pauli(0), pauli(0)}));
  REQUIRE(std::holds_alternative<Diagnosis>(dep));
  CHECK(std::get<Diagnosis>(dep).stage == DiagnosisStage::InconsistentDependence);

  // Indefinite density with no PSD point: sigma3 and sigma1 to outputs whose
  // 2x2 density has a negative eigenvalue on a one-dimensional complement.
  Problem infeasible = pair_problem(2, 1, {pauli(0), pauli(3), pauli(2)}, {});
  for (double v : {0.0, 1.0, 1.0}) {
    ComplexMatrix b(1, 1);
    b(0, 0) = v;
    infeasible.b.push_back(b);
  }
  const auto inf = solve(infeasible);
  REQUIRE(std::holds_alternative<Diagnosis>(inf));
  CHECK(std::get<Diagnosis>(inf).stage == DiagnosisStage::GapStalled);
  CHECK(std::string(to_string(DiagnosisStage::GapStalled)) == "gap_stalled");
}

TEST_CASE("empty complement forces the density itself") {
  Rng rng(62);
  const KrausSet psi = random_kraus(rng, 2, 2, 2);
  Problem p = pair_problem(2, 2, {}, {});
  for (int i = 0; i < 4; ++i) {
    p.a.push_back(pauli(i));
    p.b.push_back(apply_kraus(psi, pauli(i)));
  }
  const auto out = solve(p);
  REQUIRE(std::holds_alternative<Solution>(out));
  const Solution& s = std::get<Solution>(out);
  CHECK(s.p.size() == 0);
  CHECK((s.choi.matrix() - choi_of_kraus(psi).matrix()).norm() < 1e-9);
}

TEST_CASE("check stops at the first failed stage") {
  const auto rep = check(pair_problem(2, 2, {unit(2, 0, 0)}, {pauli(3)}));
  REQUIRE(rep.diagnosis);
  CHECK_FALSE(rep.feasibility);
  CHECK(rep.canonical);

  Rng rng(63);
  const auto ok = check(forward(rng, 2, 2, 2).problem);
  CHECK_FALSE(ok.diagnosis);
  REQUIRE(ok.feasibility);
  CHECK(ok.feasibility->feasible());
}

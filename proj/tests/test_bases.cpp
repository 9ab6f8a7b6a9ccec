#include <cmath>
#include <numbers>

#include "doctest.h"
#include "evanskit/bases.hpp"
#include "evanskit/errors.hpp"
#include "evanskit/formulations.hpp"
#include "evanskit/systems.hpp"

using namespace evanskit;

namespace {

// |sin| of the angle between span(a) and a single vector v
double misalignment(const CMat& a, const CVec& v) {
  const CVec proj = a * (a.adjoint() * v.normalized());
  return (v.normalized() - proj).norm();
}

double identity_tau(double x) { return x; }

}  // namespace

TEST_CASE("split of the glancing model") {
  const CMat a = glancing_model(0.0, 0.0, 1.0, identity_tau);
  const SubspaceSplit s = split(a);
  CHECK(s.k_stable == 1);
  CHECK(s.k_unstable == 1);
  CHECK(s.gap == doctest::Approx(1.0));
  CHECK(misalignment(s.stable_basis, CVec{{1.0, -1.0}}) <= 1e-14);
  CHECK(misalignment(s.unstable_basis, CVec{{1.0, 1.0}}) <= 1e-14);
  CHECK((s.stable_basis.adjoint() * s.stable_basis - CMat::Identity(1, 1)).norm() <= 1e-14);
  try {
    split(glancing_model(0.0, 0.0, 0.0, identity_tau));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::splitting_failure);
  }
}

TEST_CASE("glancing model") {
  CHECK(std::abs(glancing_delta(0.0, 0.3, cplx(0.0, 0.3), identity_tau)) == 0.0);
  const CMat j = glancing_model(0.0, 0.3, cplx(0.0, 0.3), identity_tau);
  CHECK(std::abs(j(1, 0)) == 0.0);
  CHECK(j(0, 1) == cplx(1.0));
  const CVec ev = glancing_model(-1.0, 0.0, 0.0, identity_tau).eigenvalues();
  for (int i = 0; i < 2; ++i) CHECK(std::abs(std::abs(ev(i).imag()) - 1.0) <= 1e-14);
}

TEST_CASE("burgers limit at +inf against the quadratic formula") {
  const auto b = get_system("burgers");
  const ShockProfile p = solve_profile(*b.model, b.u_minus, b.u_plus);
  const auto f = build_integrated_1d(*b.model, p, 1.0);
  const SubspaceSplit s = split(f.limit_plus());
  REQUIRE(s.k_stable == 1);
  // mu^2 - u+ mu - lambda with u+ = -1: stable root (-1 - sqrt 5) / 2
  const cplx mu = (s.stable_basis.adjoint() * f.limit_plus() * s.stable_basis)(0, 0);
  CHECK(std::abs(mu - (-1.0 - std::sqrt(5.0)) / 2.0) <= 1e-12);
}

TEST_CASE("projector properties and consistent splitting") {
  for (const char* name : {"burgers", "isentropic_lagrangian_1d", "isentropic_eulerian_2d"}) {
    const auto sp = get_system(name);
    const ShockProfile p = solve_profile(*sp.model, sp.u_minus, sp.u_plus);
    const Formulation form(*sp.model, p, sp.model->d == 1 ? Variant::integrated_1d : Variant::flux_md);
    for (cplx lam : {cplx(0.3, 0.0), cplx(1.0, 2.0), cplx(4.0, -1.0)}) {
      const auto [ap, am] = form.limits(Frequency(lam, std::vector<double>(sp.model->d - 1, 0.4)));
      const SubspaceSplit plus = split(ap), minus = split(am);
      CHECK((plus.stable_projector * plus.stable_projector - plus.stable_projector).norm() <= 1e-12);
      CHECK((plus.stable_projector * plus.stable_basis - plus.stable_basis).norm() <= 1e-10);
      CHECK(plus.k_stable + plus.k_unstable == form.size());
      CHECK_MESSAGE(plus.k_stable + minus.k_unstable == form.size(), name);
    }
  }
}

TEST_CASE("conjugation symmetry of the splits") {
  const auto g = get_system("isentropic_lagrangian_1d");
  const ShockProfile p = solve_profile(*g.model, g.u_minus, g.u_plus);
  const Formulation form(*g.model, p, Variant::integrated_1d);
  const cplx lam(0.7, 1.9);
  const SubspaceSplit a = split(form.limits(Frequency(lam)).first);
  const SubspaceSplit b = split(form.limits(Frequency(std::conj(lam))).first);
  CHECK((a.stable_projector.conjugate() - b.stable_projector).norm() <= 1e-12);
}

TEST_CASE("Kato transport") {
  auto fixed = [](double) {
    CMat a(2, 2);
    a << 1.0, 2.0, 0.0, -3.0;
    return a;
  };
  const KatoBasis flat = kato_continue(fixed, {0.0, 0.25, 0.5, 1.0}, Flavor::stable);
  for (const CMat& r : flat.R) CHECK((r - flat.R.front()).norm() == 0.0);

  // trivial loop: one turn around a point of an analytic family with simple eigenvalues
  auto loop = [](double t) {
    const cplx z = cplx(2.0, 0.0) + 0.5 * std::exp(I_unit * (2 * std::numbers::pi * t));
    CMat a(3, 3);
    a << -z, 1.0, 0.3, 0.2 * z, 1.0 + z, 0.0, 0.1, z * z, 2.0;
    return a;
  };
  auto path = [](int n) {
    std::vector<double> t;
    for (int i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) / n);
    return t;
  };
  const KatoBasis coarse = kato_continue(loop, path(64), Flavor::stable);
  const KatoBasis fine = kato_continue(loop, path(6400), Flavor::stable);
  const double c = (coarse.R.back() - coarse.R.front()).norm();
  const double f = (fine.R.back() - fine.R.front()).norm();
  CHECK(c <= 1e-8);
  CHECK(f <= 1e-8);
  for (std::size_t j = 0; j < coarse.R.size(); ++j) {
    CHECK((coarse.P[j] * coarse.R[j] - coarse.R[j]).norm() <= 1e-10);
    CHECK((coarse.P[j] * coarse.P[j] - coarse.P[j]).norm() <= 1e-12);
  }

  // straight through the Jordan point of the glancing model
  auto through = [](double t) { return glancing_model(0.0, 0.0, cplx(0.5 - t, 0.0), identity_tau); };
  try {
    kato_continue(through, path(10), Flavor::stable);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::discontinuity || e.kind() == ErrorKind::splitting_failure));
  }
}

TEST_CASE("Kato step keeps the range and is second order") {
  auto fam = [](double t) {
    CMat a(3, 3);
    a << -1.0 - t, t, 0.0, 0.5, 2.0 + t * t, 0.3, t, 0.0, -2.0;
    return a;
  };
  auto run = [&](int n) {
    std::vector<double> t;
    for (int i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) / n);
    return kato_continue(fam, t, Flavor::stable).R.back();
  };
  const CMat ref = run(12800);
  const double e1 = (run(25) - ref).norm(), e2 = (run(50) - ref).norm(), e3 = (run(100) - ref).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.15));
}

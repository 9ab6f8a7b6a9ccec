#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "evanskit/errors.hpp"
#include "evanskit/formulations.hpp"
#include "evanskit/systems.hpp"

using namespace evanskit;

namespace {

struct Fixture {
  SystemSpec spec;
  ShockProfile p;
  explicit Fixture(const std::string& name) : spec(get_system(name)) {
    p = solve_profile(*spec.model, spec.u_minus, spec.u_plus);
  }
  const SystemModel& m() const { return *spec.model; }
};

double max_diff(const CMat& a, const CMat& b) { return (a - b).cwiseAbs().maxCoeff(); }

// sorted by real part, then imaginary
std::vector<cplx> sorted(const CVec& v) {
  std::vector<cplx> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return out;
}

}  // namespace

TEST_CASE("linearized coefficients") {
  const Fixture b("burgers");
  const auto c0 = linearized_coeffs(b.m(), b.p, 0.0);
  CHECK(std::abs(c0.a[1](0, 0)) <= 1e-9);
  const auto cl = linearized_coeffs(b.m(), b.p, b.p.x_max());
  CHECK(cl.a[1](0, 0) == doctest::Approx(-1.0).epsilon(1e-8));

  const Fixture g("isentropic_lagrangian_1d");
  Vec u(2), du(2);
  g.p.at(0.3, u, du);
  const auto c = linearized_coeffs(g.m(), u, du);
  // row 2 of A-bar^1 carries -(d/dv)(1/v) u' = u'/v^2 in the v column
  const Mat plain = g.m().reduced_jacobian(u);
  CHECK(c.a[1](1, 0) - plain(1, 0) == doctest::Approx(du(1) / (u(0) * u(0))).epsilon(1e-12));
  CHECK(c.a[1](0, 0) == plain(0, 0));
  CHECK(c.a[1](1, 1) == plain(1, 1));
}

TEST_CASE("integrated form") {
  const Fixture b("burgers");
  const cplx lam(0.7, 0.4);
  const auto f = build_integrated_1d(b.m(), b.p, lam);
  REQUIRE(f.size() == 2);
  Vec u(1), du(1);
  for (double x : {-3.0, 0.0, 1.5}) {
    b.p.at(x, u, du);
    CMat want(2, 2);
    // u = w' with lambda w + u_bar w' = w''
    want << 0.0, 1.0, lam, u(0);
    CHECK(max_diff(f.eval_exact(x), want) <= 1e-12);
  }
  const auto zero = build_integrated_1d(b.m(), b.p, 0.0);
  CHECK(zero.eval_exact(0.5)(0, 0) == cplx(0.0));
  CHECK(zero.eval_exact(0.5)(1, 0) == cplx(0.0));

  // limit eigenvalues against det(lambda A0 + mu A1 - mu^2 B) = 0
  const Fixture g("isentropic_lagrangian_1d");
  const cplx lg(1.3, -0.8);
  const auto fg = build_integrated_1d(g.m(), g.p, lg);
  for (int side = 0; side < 2; ++side) {
    const Vec st = side == 0 ? g.spec.u_plus : g.spec.u_minus;
    const CMat lim = side == 0 ? fg.limit_plus() : fg.limit_minus();
    const Mat a0 = g.m().jacobian(0, st), a1 = g.m().reduced_jacobian(st), bb = g.m().viscosity(1, 1, st);
    const double bv = bb(1, 1);
    // 2x2 polynomial: (lambda + mu a1_00)(lambda + mu a1_11 - mu^2 b) - mu^2 a1_01 a1_10 with A0 = I
    // expand into cubic coefficients in mu; the zero root belongs to no mode
    const cplx c3 = -a1(0, 0) * bv, c2 = a1(0, 0) * a1(1, 1) - lg * bv - a1(0, 1) * a1(1, 0),
               c1 = lg * (a1(0, 0) + a1(1, 1)), c0 = lg * lg;
    CHECK(a0.isIdentity());
    const CVec ev = lim.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
      const cplx mu = ev(i);
      const cplx poly = c3 * mu * mu * mu + c2 * mu * mu + c1 * mu + c0;
      CHECK(std::abs(poly) <= 1e-10 * (1.0 + std::pow(std::abs(mu), 3)));
    }
    (void)c3;
  }
}

TEST_CASE("flux form") {
  const Fixture b("burgers");
  const cplx lam(0.3, 1.1);
  const auto f = build_flux_1d(b.m(), b.p, lam);
  Vec u(1), du(1);
  b.p.at(0.8, u, du);
  CMat want(2, 2);
  want << 0.0, lam, 1.0, u(0);
  CHECK(max_diff(f.eval_exact(0.8), want) <= 1e-12);
  CHECK(build_flux_1d(b.m(), b.p, 0.0).eval_exact(0.8).row(0).cwiseAbs().maxCoeff() == 0.0);

  const Fixture g("isentropic_lagrangian_1d");
  const auto fi = build_integrated_1d(g.m(), g.p, lam);
  const auto ff = build_flux_1d(g.m(), g.p, lam);
  // N = 3: rows/cols (f1, f2, u2); in the u2 row the f columns pick up a factor lambda
  for (double x : {-2.0, 0.1, 3.0}) {
    const CMat ai = fi.eval_exact(x), af = ff.eval_exact(x);
    CHECK(std::abs(ai(2, 0) - lam * af(2, 0)) <= 1e-12 * std::abs(ai(2, 0)));
    CHECK(std::abs(ai(2, 2) - af(2, 2)) <= 1e-12 * std::abs(ai(2, 2)));
    CHECK(std::abs(ai(2, 1) - lam * af(2, 1)) <= 1e-12 * std::abs(ai(2, 1)));
    CHECK(af(0, 1) == cplx(0.0));
    CHECK(af(1, 1) == cplx(0.0));
  }
  CHECK(build_flux_1d(g.m(), g.p, 0.0).eval_exact(0.1).topRows(2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("balanced flux equals integrated") {
  const Fixture g("isentropic_lagrangian_1d");
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> re(0.0, 5.0), im(-5.0, 5.0);
  for (int k = 0; k < 5; ++k) {
    const cplx lam(re(rng), im(rng));
    const auto a = build_integrated_1d(g.m(), g.p, lam);
    const auto c = build_balanced_flux_1d(g.m(), g.p, lam);
    for (double x : {-5.0, -0.3, 0.0, 2.2}) {
      const CMat ai = a.eval_exact(x);
      CHECK(max_diff(ai, c.eval_exact(x)) <= 1e-14 * (1.0 + ai.cwiseAbs().maxCoeff()));
    }
  }
  const auto tiny = build_balanced_flux_1d(g.m(), g.p, 1e-30);
  CHECK(tiny.eval_exact(0.0).allFinite());
  CHECK(max_diff(tiny.eval_exact(0.0), build_integrated_1d(g.m(), g.p, 1e-30).eval_exact(0.0)) <= 1e-14);
  try {
    build_balanced_flux_1d(g.m(), g.p, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::scaling_undefined);
  }
}

TEST_CASE("multi-d flux form") {
  const Fixture e("isentropic_eulerian_2d");
  SystemModel one = e.m();
  one.d = 1;
  const cplx lam(0.9, 0.2);
  const auto md = build_flux_md(e.m(), e.p, Frequency(lam, {0.0}));
  const auto flat = build_flux_1d(one, e.p, lam);
  for (double x : {-4.0, 0.0, 1.0}) CHECK(max_diff(md.eval_exact(x), flat.eval_exact(x)) <= 1e-14);

  // lambda = 0, xi real: rows 1-2 are i * real except the b^{xi xi} entries in column 3
  const auto pure = build_flux_md(e.m(), e.p, Frequency(0.0, {0.8}));
  const CMat a = pure.eval_exact(0.4);
  const int n = 3;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) CHECK(std::abs(a(i, j).real()) <= 1e-14 * (1 + std::abs(a(i, j))));

  // limits drop the (B^{xi 1})' term
  const auto lim = build_flux_md(e.m(), e.p, Frequency(lam, {0.6}));
  CHECK(max_diff(lim.eval_exact(e.p.x_max() + 5.0), lim.limit_plus()) <= 1e-10);
  CHECK(max_diff(lim.eval_exact(e.p.x_min() - 5.0), lim.limit_minus()) <= 1e-10);
}

TEST_CASE("sharp form") {
  const Fixture e("isentropic_eulerian_2d");
  const Fixture g("isentropic_lagrangian_1d");
  // rho = lambda, xi = 0 is the integrated form
  const cplx lam(1.7, 0.0);
  const auto s = build_sharp_md(g.m(), g.p, lam, Frequency(1.0));
  const auto i = build_integrated_1d(g.m(), g.p, lam);
  for (double x : {-1.0, 0.5}) CHECK(max_diff(s.eval_exact(x), i.eval_exact(x)) <= 1e-13 * (1 + i.eval_exact(x).norm()));

  // rho = 0: f rows have only the u2 column
  const auto z = build_sharp_md(e.m(), e.p, 0.0, Frequency(cplx(0.6, 0.0), {0.8}));
  const CMat a0 = z.eval_exact(0.2);
  CHECK(a0.block(0, 0, 3, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a0.block(3, 0, 2, 3).cwiseAbs().maxCoeff() == 0.0);

  // W# = diag(I / r, I) W conjugates the flux form into the sharp form at rho = r
  const Frequency f(cplx(0.4, 0.3), {0.5});
  const double r = f.r();
  const auto fl = build_flux_md(e.m(), e.p, f);
  const auto sh = build_sharp_md(e.m(), e.p, r, f.scaled(r));
  CMat t = CMat::Identity(5, 5);
  t.topLeftCorner(3, 3) /= r;
  for (double x : {-2.0, 0.0, 1.3}) {
    const CMat want = t * fl.eval_exact(x) * t.inverse();
    CHECK(max_diff(sh.eval_exact(x), want) <= 1e-13 * (1 + want.norm()));
  }

  CHECK_THROWS_AS(sharpen(Frequency(0.0, {0.0}), Scale::r), Error);
  const SharpFrequency m2 = sharpen(Frequency(cplx(0.5, 1.0), {0.5}), Scale::r2);
  CHECK(std::abs(m2.rho - cplx(1.0, 1.0)) <= 1e-15);
}

TEST_CASE("tabulated coefficients follow the exact assembly") {
  const Fixture g("isentropic_lagrangian_1d");
  for (Variant v : {Variant::integrated_1d, Variant::flux_1d}) {
    const Formulation form(g.m(), g.p, v);
    const auto f = form.field(Frequency(cplx(2.0, 3.0)));
    double worst = 0.0;
    for (double x = -8.0; x <= 8.0; x += 0.0731) {
      const CMat ex = f.eval_exact(x);
      worst = std::max(worst, max_diff(f.eval(x), ex) / (1 + ex.norm()));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("entries are polynomial in the frequency") {
  const Fixture e("isentropic_eulerian_2d");
  const cplx lam(0.8, 0.1);
  const double h = 1e-4;
  const Frequency f(lam, {0.3});
  const auto fp = build_flux_md(e.m(), e.p, Frequency(lam + h, {0.3}));
  const auto fm = build_flux_md(e.m(), e.p, Frequency(lam - h, {0.3}));
  const auto f0 = build_flux_md(e.m(), e.p, f);
  const auto f2 = build_flux_md(e.m(), e.p, Frequency(lam + 2.0 * h, {0.3}));
  // affine in lambda: the second difference vanishes
  const CMat dd = fp.eval_exact(0.2) - 2.0 * f0.eval_exact(0.2) + fm.eval_exact(0.2);
  CHECK(dd.cwiseAbs().maxCoeff() <= 1e-12);
  const CMat slope1 = (fp.eval_exact(0.2) - fm.eval_exact(0.2)) / (2 * h);
  const CMat slope2 = (f2.eval_exact(0.2) - f0.eval_exact(0.2)) / (2 * h);
  CHECK(max_diff(slope1, slope2) <= 1e-8);
}

TEST_CASE("integrated form with a lower-left viscosity block") {
  const Fixture rot("isentropic_lagrangian_1d_rotated");
  const cplx lam(0.9, 0.4);
  const auto a = build_integrated_b21(rot.m(), rot.p, lam);
  CHECK(a.size() == 3);
  CHECK(a.eval_exact(0.0).allFinite());
  // lambda = 0: rows 1-2 vanish except column 3, and A31 = A32 = 0
  const CMat z = build_integrated_b21(rot.m(), rot.p, 0.0).eval_exact(0.3);
  CHECK(z.block(0, 0, 2, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(z(2, 0)) == 0.0);
  CHECK(std::abs(z(2, 1)) == 0.0);

  // without b21 it is the integrated form
  const Fixture g("isentropic_lagrangian_1d");
  SystemModel m = g.m();
  m.b21_present = true;
  const auto b = build_integrated_b21(m, g.p, lam);
  const auto i = build_integrated_1d(g.m(), g.p, lam);
  for (double x : {-2.0, 0.0, 2.0}) CHECK(max_diff(b.eval_exact(x), i.eval_exact(x)) <= 1e-13);

  // the limit spectra are those of the unrotated system
  const auto base = build_integrated_1d(g.m(), g.p, lam);
  const auto s1 = sorted(a.limit_plus().eigenvalues()), s2 = sorted(base.limit_plus().eigenvalues());
  for (std::size_t k = 0; k < s1.size(); ++k) CHECK(std::abs(s1[k] - s2[k]) <= 1e-10);
}

TEST_CASE("matrix dump") {
  const Fixture g("isentropic_lagrangian_1d");
  std::ostringstream os;
  dump_matrix(os, g.m(), build_integrated_1d(g.m(), g.p, 1.0), 0.0);
  CHECK(os.str().find('|') != std::string::npos);
}

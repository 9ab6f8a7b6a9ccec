#include <cmath>

#include "doctest.h"
#include "evanskit/errors.hpp"
#include "evanskit/evans.hpp"
#include "evanskit/systems.hpp"

using namespace evanskit;

TEST_CASE("registry") {
  const auto names = system_names();
  for (const char* n : {"burgers", "isentropic_lagrangian_1d", "isentropic_eulerian_2d", "glancing_model"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  try {
    get_system("navier_stokes_full");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unknown_system);
  }
  try {
    get_system("burgers", {{"gamma", 1.4}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
}

TEST_CASE("burgers entry") {
  const auto b = get_system("burgers");
  const SystemModel& m = *b.model;
  CHECK(m.n == 1);
  CHECK(m.r == 0);
  CHECK(m.d == 1);
  CHECK(m.s == 0.0);
  CHECK(b.u_minus(0) == 1.0);
  CHECK(b.u_plus(0) == -1.0);
  const Vec u = Vec::Constant(1, 0.4);
  CHECK(m.flux(0, u)(0) == 0.4);
  CHECK(m.flux(1, u)(0) == doctest::Approx(0.08));
  CHECK(m.viscosity(1, 1, u)(0, 0) == 1.0);
}

TEST_CASE("lagrangian gas entry") {
  const auto g = get_system("isentropic_lagrangian_1d");
  const SystemModel& m = *g.model;
  CHECK(m.n == 2);
  CHECK(m.r == 1);
  CHECK(g.u_minus(0) == 1.0);
  CHECK(g.u_plus(0) == 0.5);
  CHECK(g.u_minus(1) == 0.0);
  // p(v) = v^{-5/3}; s^2 = -[p]/[v]
  const double jp = std::pow(0.5, -5.0 / 3.0) - 1.0;
  CHECK(m.s * m.s == doctest::Approx(jp / 0.5).epsilon(1e-14));
  CHECK(m.s < 0);
  CHECK(m.viscosity(1, 1, g.u_plus)(1, 1) == doctest::Approx(2.0));
  CHECK(check_rh(m, g.u_minus, g.u_plus) <= 1e-12);

  const auto weak = get_system("isentropic_lagrangian_1d", {{"v_plus", 0.8}});
  CHECK(weak.u_plus(0) == 0.8);
  CHECK(check_rh(*weak.model, weak.u_minus, weak.u_plus) <= 1e-12);
}

TEST_CASE("eulerian 2d entry") {
  const auto e = get_system("isentropic_eulerian_2d");
  const SystemModel& m = *e.model;
  CHECK(m.n == 3);
  CHECK(m.r == 1);
  CHECK(m.d == 2);
  CHECK(check_rh(m, e.u_minus, e.u_plus) <= 1e-12);
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k) {
      const Mat b = m.viscosity(j, k, e.u_minus);
      CHECK(b.row(0).norm() == 0.0);
      CHECK(b.col(0).norm() == 0.0);
    }
  // symmetry b^{jk}_{il} = b^{kj}_{li}
  CHECK((m.viscosity(1, 2, e.u_minus) - m.viscosity(2, 1, e.u_minus).transpose()).norm() == 0.0);
}

TEST_CASE("hypotheses hold along the default profiles") {
  for (const auto& name : system_names()) {
    const auto s = get_system(name);
    if (!s.model) continue;
    const ShockProfile p = solve_profile(*s.model, s.u_minus, s.u_plus);
    const int step = std::max(1, p.size() / 32);
    for (int i = 0; i < p.size(); i += step) {
      const Vec u = p.values().col(i);
      CHECK_NOTHROW(s.model->validate_at(u));
      CHECK_MESSAGE(check_h2(*s.model, u, 16) > 0, name);
      if (s.model->r > 0) CHECK_MESSAGE(std::abs(check_h1(*s.model, u)) > 1e-6, name);
    }
  }
}

TEST_CASE("2d gas at xi = 0 reduces to its 1d restriction") {
  const auto e = get_system("isentropic_eulerian_2d");
  SystemModel one = *e.model;
  one.d = 1;
  one.name = "eulerian_1d_restriction";
  const ShockProfile p2 = solve_profile(*e.model, e.u_minus, e.u_plus);
  const ShockProfile p1 = solve_profile(one, e.u_minus, e.u_plus);
  const EvansEngine md(*e.model, p2, Variant::sharp_md, Scale::r2);
  const EvansEngine flat(one, p1, Variant::integrated_1d);
  for (cplx lam : {cplx(0.5, 0.0), cplx(1.0, 1.0), cplx(2.0, -0.5), cplx(0.2, 3.0), cplx(3.0, 0.0)}) {
    const cplx a = md.evaluate(Frequency(lam, {0.0})).D();
    const cplx b = flat.evaluate(Frequency(lam)).D();
    CHECK(std::abs(a - b) <= 1e-7 * std::abs(b));
  }
  const int w2 = winding(md, circle(1.5, 1.4, {0.0})).winding;
  const int w1 = winding(flat, circle(1.5, 1.4)).winding;
  CHECK(w1 == w2);
  CHECK(w1 == 0);
}

TEST_CASE("glancing fixture") {
  const auto g = get_system("glancing_model");
  CHECK_FALSE(g.model.has_value());
  CHECK(g.tau(0.7) == 0.7);
  const auto steep = get_system("glancing_model", {{"tau_slope", 2.0}});
  CHECK(steep.tau(0.5) == 1.0);
}

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "evanskit/errors.hpp"
#include "evanskit/evans.hpp"
#include "evanskit/profile.hpp"
#include "evanskit/systems.hpp"

using namespace evanskit;

namespace {

// v' for the scalar reduced profile ODE of the Lagrangian gas, u eliminated by the first RH row
double gas_rhs(double v, double vm, double s, double gamma, double nu) {
  const double p = std::pow(v, -gamma), pm = std::pow(vm, -gamma);
  return -v * (p - pm + s * s * (v - vm)) / (nu * s);
}

// classical RK4 from x = 0 to x = target with a fixed small step
double gas_shoot(double v0, double target, double vm, double s) {
  const int steps = static_cast<int>(std::ceil(std::abs(target) / 1e-3));
  const double h = target / steps;
  double v = v0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = gas_rhs(v, vm, s, 5.0 / 3.0, 1.0);
    const double k2 = gas_rhs(v + 0.5 * h * k1, vm, s, 5.0 / 3.0, 1.0);
    const double k3 = gas_rhs(v + 0.5 * h * k2, vm, s, 5.0 / 3.0, 1.0);
    const double k4 = gas_rhs(v + h * k3, vm, s, 5.0 / 3.0, 1.0);
    v += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
  }
  return v;
}

ShockProfile sampled(const std::vector<double>& grid, double (*u)(double), double (*du)(double)) {
  const int n = static_cast<int>(grid.size());
  Mat v(1, n), d(1, n), dd = Mat::Zero(1, n);
  for (int i = 0; i < n; ++i) {
    v(0, i) = u(grid[i]);
    d(0, i) = du(grid[i]);
  }
  return ShockProfile(grid, v, d, dd, Vec::Constant(1, 1.0), Vec::Constant(1, -1.0));
}

double tanh_profile(double x) { return -std::tanh(0.5 * x); }
double tanh_slope(double x) { return -0.5 / std::pow(std::cosh(0.5 * x), 2); }

}  // namespace

TEST_CASE("burgers profile is -tanh(x/2)") {
  const auto b = get_system("burgers");
  const ShockProfile p = solve_profile(*b.model, b.u_minus, b.u_plus);
  double err = 0.0, derr = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double x = p.grid()[i];
    err = std::max(err, std::abs(p.values()(0, i) - tanh_profile(x)));
    derr = std::max(derr, std::abs(p.derivative()(0, i) - tanh_slope(x)));
  }
  CHECK(err <= 1e-8);
  CHECK(derr <= 1e-8);
  // between nodes too
  Vec u(1), du(1);
  double ierr = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.0137) {
    p.at(x, u, du);
    ierr = std::max(ierr, std::abs(u(0) - tanh_profile(x)));
  }
  CHECK(ierr <= 1e-8);
  CHECK(profile_residual(*b.model, p) <= 1e-9);
  CHECK(p.x_min() < 0.0);
  CHECK(p.x_max() > 0.0);
  CHECK(std::abs(p.values()(0, 0) - 1.0) <= 1e-8);
  CHECK(std::abs(p.values()(0, p.size() - 1) + 1.0) <= 1e-8);
}

TEST_CASE("profile residual") {
  const auto b = get_system("burgers");
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-20.0 + 0.1 * i);
  ShockProfile exact = sampled(grid, tanh_profile, tanh_slope);
  CHECK(profile_residual(*b.model, exact) <= 1e-10);

  Mat v = exact.values();
  v(0, 230) += 1e-3;  // x = 3, away from the zero of u_bar
  const ShockProfile bumped(grid, v, exact.derivative(), exact.second_derivative(), exact.u_minus(), exact.u_plus());
  CHECK(profile_residual(*b.model, bumped) >= 1e-4);

  const ShockProfile flat(grid, Mat::Ones(1, grid.size()), Mat::Zero(1, grid.size()), Mat::Zero(1, grid.size()),
                          Vec::Constant(1, 1.0), Vec::Constant(1, 1.0));
  CHECK(profile_residual(*b.model, flat) == 0.0);
}

TEST_CASE("equal end states have no connection") {
  const auto b = get_system("burgers");
  SystemModel m = *b.model;
  m.s = 1.0;
  try {
    solve_profile(m, Vec::Constant(1, 1.0), Vec::Constant(1, 1.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_connection);
  }
}

TEST_CASE("lagrangian gas profile against scalar shooting") {
  const auto g = get_system("isentropic_lagrangian_1d");
  const SystemModel& m = *g.model;
  const ShockProfile p = solve_profile(m, g.u_minus, g.u_plus);
  CHECK(profile_residual(m, p) <= 1e-9);
  CHECK(algebraic_residual(m, p) <= 1e-13);
  // phase condition on u at x = 0 fixes v(0) to the midpoint as well
  const double v0 = 0.5 * (g.u_minus(0) + g.u_plus(0));
  Vec u(2), du(2);
  double err = 0.0;
  for (double x : {-6.0, -3.0, -1.0, -0.25, 0.5, 2.0, 4.0}) {
    p.at(x, u, du);
    err = std::max(err, std::abs(u(0) - gas_shoot(v0, x, g.u_minus(0), m.s)));
  }
  CHECK(err <= 1e-8);
  // monotone v
  for (int i = 1; i < p.size(); ++i) CHECK(p.values()(0, i) <= p.values()(0, i - 1) + 1e-14);
}

TEST_CASE("decay rates") {
  const auto b = get_system("burgers");
  const ShockProfile pb = solve_profile(*b.model, b.u_minus, b.u_plus);
  const DecayFit fb = fit_decay_rates(pb);
  CHECK(fb.reliable);
  CHECK(fb.nu_minus == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fb.nu_plus == doctest::Approx(1.0).epsilon(0.05));

  const auto g = get_system("isentropic_lagrangian_1d");
  const ShockProfile pg = solve_profile(*g.model, g.u_minus, g.u_plus);
  const DecayFit fg = fit_decay_rates(pg);
  const EndStateRates lin = end_state_rates(*g.model, g.u_minus, g.u_plus);
  CHECK(fg.nu_minus == doctest::Approx(lin.nu_minus).epsilon(0.1));
  CHECK(fg.nu_plus == doctest::Approx(lin.nu_plus).epsilon(0.1));
  // the scalar ODE linearized at the end states
  const double h = 1e-6;
  auto slope = [&](double v) {
    return (gas_rhs(v + h, 1.0, g.model->s, 5.0 / 3.0, 1.0) - gas_rhs(v - h, 1.0, g.model->s, 5.0 / 3.0, 1.0)) /
           (2 * h);
  };
  CHECK(lin.nu_minus == doctest::Approx(std::abs(slope(1.0))).epsilon(1e-6));
  CHECK(lin.nu_plus == doctest::Approx(std::abs(slope(0.5))).epsilon(1e-6));

  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(-10.0 + 0.1 * i);
  const ShockProfile flat(grid, Mat::Ones(1, grid.size()), Mat::Zero(1, grid.size()), Mat::Zero(1, grid.size()),
                          Vec::Constant(1, 1.0), Vec::Constant(1, 1.0));
  CHECK_FALSE(fit_decay_rates(flat).reliable);
}

TEST_CASE("refinement order") {
  const auto g = get_system("isentropic_lagrangian_1d");
  std::vector<double> defects;
  for (int nodes : {201, 401, 801}) {
    ProfileOptions o;
    o.nodes = nodes;
    defects.push_back(interpolation_defect(*g.model, solve_profile(*g.model, g.u_minus, g.u_plus, o)));
  }
  CHECK(std::log2(defects[0] / defects[1]) >= 2.0);
  CHECK(std::log2(defects[1] / defects[2]) >= 2.0);
}

TEST_CASE("translated profile gives the same Evans values") {
  const auto g = get_system("isentropic_lagrangian_1d");
  ProfileOptions shifted;
  shifted.phase_shift = 0.7;
  const ShockProfile p0 = solve_profile(*g.model, g.u_minus, g.u_plus);
  const ShockProfile p1 = solve_profile(*g.model, g.u_minus, g.u_plus, shifted);
  Vec u(2), du(2);
  p1.at(0.7, u, du);
  CHECK(u(1) == doctest::Approx(0.5 * (g.u_minus(1) + g.u_plus(1))).epsilon(1e-10));
  // a translate by delta matched at x = delta differs by exp(delta (tr M+ + tr M-)),
  // M the limit matrices restricted to the initial subspaces
  EvansOptions at_shift;
  at_shift.x_match = 0.7;
  const EvansEngine e0(*g.model, p0, Variant::integrated_1d);
  const EvansEngine e1(*g.model, p1, Variant::integrated_1d, Scale::r, at_shift);
  for (cplx lam : {cplx(1.0, 0.0), cplx(0.5, 2.0)}) {
    const auto [ap, am] = e0.limits(Frequency(lam));
    const SubspaceSplit sp = split(ap), sm = split(am);
    const cplx tr = (sp.stable_basis.adjoint() * ap * sp.stable_basis).trace() +
                    (sm.unstable_basis.adjoint() * am * sm.unstable_basis).trace();
    const cplx a = e0.evaluate(Frequency(lam), sp.stable_basis, sm.unstable_basis).D();
    const cplx b = e1.evaluate(Frequency(lam), sp.stable_basis, sm.unstable_basis).D();
    CHECK(std::abs(a * std::exp(0.7 * tr) - b) <= 1e-8 * std::abs(b));
  }
}

TEST_CASE("profile file") {
  const auto b = get_system("burgers");
  ProfileOptions o;
  o.nodes = 21;
  const ShockProfile p = solve_profile(*b.model, b.u_minus, b.u_plus, o);
  std::ostringstream os;
  write_profile(os, p);
  std::istringstream in(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cols(line);
    double x, u, du;
    cols >> x >> u >> du;
    CHECK_FALSE(cols.fail());
    ++rows;
  }
  CHECK(rows == p.size());
}

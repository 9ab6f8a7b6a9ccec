#include <cmath>
#include <sstream>

#include "doctest.h"
#include "evanskit/errors.hpp"
#include "evanskit/lopatinski.hpp"
#include "evanskit/systems.hpp"

using namespace evanskit;

TEST_CASE("burgers determinant is the scalar jump") {
  const auto b = get_system("burgers");
  CHECK(std::abs(lopatinski_det(*b.model, b.u_minus, b.u_plus, Frequency(1.0)) - 2.0) <= 1e-14);
  const cplx lam = std::exp(I_unit * 0.7);
  CHECK(std::abs(lopatinski_det(*b.model, b.u_minus, b.u_plus, Frequency(lam)) - 2.0 * lam) <= 1e-14);
}

TEST_CASE("1d determinant is linear in lambda") {
  const auto g = get_system("isentropic_lagrangian_1d");
  const cplx d1 = lopatinski_det(*g.model, g.u_minus, g.u_plus, Frequency(1.0));
  CHECK(std::abs(d1) > 1e-3);
  const cplx lam = std::exp(I_unit * -0.4);
  const cplx dl = lopatinski_det(*g.model, g.u_minus, g.u_plus, Frequency(lam));
  // the outgoing modes of the d = 1 pencil do not depend on the angle
  CHECK(std::abs(dl - lam * d1) <= 1e-12 * std::abs(d1));
}

TEST_CASE("2d determinant at xi = 0 is its 1d restriction") {
  const auto e = get_system("isentropic_eulerian_2d");
  SystemModel one = *e.model;
  one.d = 1;
  const cplx a = lopatinski_det(*e.model, e.u_minus, e.u_plus, Frequency(1.0, {0.0}));
  const cplx b = lopatinski_det(one, e.u_minus, e.u_plus, Frequency(1.0));
  CHECK(std::abs(a - b) <= 1e-13 * std::abs(b));
  CHECK(std::abs(a) > 0.0);
}

TEST_CASE("uniform inviscid stability of the 2d default shock") {
  const auto e = get_system("isentropic_eulerian_2d");
  double smallest = std::numeric_limits<double>::infinity();
  int checked = 0;
  for (const Frequency& f : sample_angles(2, 40, 0.05)) {
    try {
      smallest = std::min(smallest, std::abs(lopatinski_det(*e.model, e.u_minus, e.u_plus, f)));
      ++checked;
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::glancing);
    }
  }
  CHECK(checked >= 30);
  CHECK(smallest > 1e-3);
}

TEST_CASE("glancing angles are refused") {
  const auto e = get_system("isentropic_eulerian_2d");
  const SystemModel& m = *e.model;
  const Vec& u = e.u_plus;
  // acoustic modes (lam + u1 mu)^2 = c^2 (mu^2 - xi^2) have a double root at
  // lam^2 = (u1^2 - c^2) xi^2; subsonic on the right so lam = i tau |xi|
  const double gamma = e.params.at("gamma"), a = e.params.at("a");
  const double c2 = gamma * a * std::pow(u(0), gamma - 1.0), u1 = u(1) - m.s;
  REQUIRE(u1 * u1 < c2);
  const double tau = std::sqrt(c2 - u1 * u1);
  const double xi = 1.0 / std::sqrt(1.0 + tau * tau);
  const Frequency f(cplx(0.0, tau * xi), {xi});
  CHECK(symbol_condition(m, u, f) > 1e6);
  try {
    lopatinski_det(m, e.u_minus, e.u_plus, f);
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::glancing);
  }
  CHECK(symbol_condition(m, u, Frequency(1.0, {0.0})) < 1e3);
  CHECK(symbol_condition(m, u, Frequency(cplx(0.0, 1.1 * tau * xi), {xi})) < 1e6);
}

TEST_CASE("synthetic fits") {
  const auto angles = sample_angles(2, 8, 0.3);
  const std::vector<double> radii{1e-2, 3e-3, 1e-3};
  auto delta = [](const Frequency& f) { return f.lambda + cplx(0.5, 0.0) + I_unit * f.xi[0]; };

  const LowFrequencyFit quad = fit_low_frequency(
      [&](const Frequency& f, double r) { return 2.0 * delta(f) + r * r; }, delta, angles, radii);
  // a straight-line fit leaves the least-squares intercept of r^2 / Delta
  double sr = 0.0, sr2 = 0.0, sr3 = 0.0, sr4 = 0.0;
  for (double r : radii) sr += r, sr2 += r * r, sr3 += r * r * r, sr4 += r * r * r * r;
  const double nr = static_cast<double>(radii.size());
  const double c0 = (sr2 * sr2 - sr * sr3) / (nr * sr2 - sr * sr);
  for (std::size_t k = 0; k < angles.size(); ++k) {
    CHECK(std::abs(quad.gamma_estimates[k] - (2.0 + c0 / delta(angles[k]))) <= 1e-10);
  }

  const cplx g0(0.7, -0.2);
  const LowFrequencyFit lin = fit_low_frequency(
      [&](const Frequency& f, double r) { return g0 * delta(f) + cplx(3.0, 1.0) * r; }, delta, angles, radii);
  for (cplx g : lin.gamma_estimates) CHECK(std::abs(g - g0) <= 1e-8);

  // a vanishing Delta is flagged and skipped
  const LowFrequencyFit flagged = fit_low_frequency(
      [&](const Frequency& f, double r) { return g0 * delta(f) + r; },
      [&](const Frequency& f) { return std::abs(f.lambda - angles[0].lambda) < 1e-15 ? cplx(0.0) : delta(f); },
      angles, radii);
  CHECK(flagged.unstable[0]);
  CHECK_FALSE(flagged.unstable[1]);
  CHECK(std::isfinite(flagged.spread));

  // no settled limit
  try {
    fit_low_frequency([&](const Frequency& f, double r) { return delta(f) * std::sin(1.0 / r); }, delta, angles,
                      radii);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::fit_error);
  }
  CHECK_THROWS_AS(fit_low_frequency([&](const Frequency&, double) { return cplx(1.0); }, delta, angles,
                                    {1e-3, 1e-2}),
                  Error);
}

TEST_CASE("gamma is angle independent") {
  const auto g = get_system("isentropic_lagrangian_1d");
  const ShockProfile p = solve_profile(*g.model, g.u_minus, g.u_plus);
  const LowFrequencyFit single = fit_low_frequency(*g.model, p, {Frequency(1.0)}, {1e-2, 3e-3, 1e-3});
  CHECK(single.spread == 0.0);

  const LowFrequencyFit fit = fit_low_frequency(*g.model, p, sample_angles(1, 5, 0.3), {1e-2, 3e-3, 1e-3});
  CHECK(fit.spread <= 1e-2);
  // same estimates from radii scaled by a common factor
  const LowFrequencyFit scaled = fit_low_frequency(*g.model, p, sample_angles(1, 5, 0.3), {5e-3, 1.5e-3, 5e-4});
  CHECK(std::abs(scaled.spread - fit.spread) <= 1e-3);
  for (std::size_t a = 0; a < fit.angles.size(); ++a) {
    CHECK(std::abs(scaled.gamma_estimates[a] - fit.gamma_estimates[a]) <= 1e-3 * std::abs(fit.gamma_estimates[a]));
  }

  std::ostringstream os;
  write_fit_report(os, fit);
  CHECK(os.str().find("# spread") != std::string::npos);
}

TEST_CASE("sampled angles") {
  for (int d : {1, 2}) {
    for (const Frequency& f : sample_angles(d, 9, 0.3)) {
      CHECK(f.r() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(f.lambda.real() >= 0.3 - 1e-14);
    }
  }
}

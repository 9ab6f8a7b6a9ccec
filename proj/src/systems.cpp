#include "evanskit/systems.hpp"

#include <cmath>

#include "evanskit/errors.hpp"

namespace evanskit {
namespace {

using Params = std::map<std::string, double>;

Params merge(Params defaults, const Params& overrides, const std::string& name) {
  for (const auto& [key, value] : overrides) {
    auto it = defaults.find(key);
    if (it == defaults.end()) {
      throw Error(ErrorKind::config, "system '" + name + "' has no parameter '" + key + "'");
    }
    it->second = value;
  }
  return defaults;
}

SystemSpec burgers(const Params& p) {
  const double nu = p.at("viscosity");
  SystemSpec spec;
  spec.name = "burgers";
  spec.params = p;
  SystemModel m;
  m.name = "burgers";
  m.n = 1;
  m.r = 0;
  m.d = 1;
  m.s = 0.5 * (p.at("u_minus") + p.at("u_plus"));
  m.flux = [](int j, const Vec& u) -> Vec {
    Vec f(1);
    f(0) = j == 0 ? u(0) : 0.5 * u(0) * u(0);
    return f;
  };
  m.jacobian = [](int j, const Vec& u) -> Mat {
    Mat a(1, 1);
    a(0, 0) = j == 0 ? 1.0 : u(0);
    return a;
  };
  m.viscosity = [nu](int, int, const Vec&) -> Mat { return Mat::Constant(1, 1, nu); };
  m.viscosity_derivative = [](int, int, const Vec&, const Vec&) -> Mat { return Mat::Zero(1, 1); };
  spec.model = m;
  spec.u_minus = Vec::Constant(1, p.at("u_minus"));
  spec.u_plus = Vec::Constant(1, p.at("u_plus"));
  return spec;
}

// p-system in Lagrangian coordinates: v_t - u_x = 0, u_t + p(v)_x = (nu u_x / v)_x.
SystemModel lagrangian_model(double gamma, double a, double nu, double s) {
  SystemModel m;
  m.name = "isentropic_lagrangian_1d";
  m.n = 2;
  m.r = 1;
  m.d = 1;
  m.s = s;
  auto pressure = [gamma, a](double v) { return a * std::pow(v, -gamma); };
  auto dpressure = [gamma, a](double v) { return -gamma * a * std::pow(v, -gamma - 1.0); };
  m.flux = [pressure](int j, const Vec& u) -> Vec {
    if (j == 0) return u;
    Vec f(2);
    f << -u(1), pressure(u(0));
    return f;
  };
  m.jacobian = [dpressure](int j, const Vec& u) -> Mat {
    if (j == 0) return Mat::Identity(2, 2);
    Mat a1(2, 2);
    a1 << 0.0, -1.0, dpressure(u(0)), 0.0;
    return a1;
  };
  m.viscosity = [nu](int, int, const Vec& u) -> Mat {
    Mat b = Mat::Zero(2, 2);
    b(1, 1) = nu / u(0);
    return b;
  };
  m.viscosity_derivative = [nu](int, int, const Vec& u, const Vec& dir) -> Mat {
    Mat db = Mat::Zero(2, 2);
    db(1, 1) = -nu * dir(0) / (u(0) * u(0));
    return db;
  };
  return m;
}

SystemSpec lagrangian(const Params& p, const std::string& name) {
  const double gamma = p.at("gamma");
  const double a = p.at("a");
  const double v_minus = p.at("v_minus");
  const double v_plus = p.at("v_plus");
  const double u_minus = p.at("u_minus");
  const double jump_p = a * std::pow(v_plus, -gamma) - a * std::pow(v_minus, -gamma);
  const double slope = -jump_p / (v_plus - v_minus);
  if (!(slope > 0.0)) {
    throw Error(ErrorKind::config, "Rankine-Hugoniot relations have no real shock speed");
  }
  // left-moving (1-)shock; Lax for v_plus < v_minus
  const double s = -std::sqrt(slope);
  const double u_plus = u_minus - s * (v_plus - v_minus);
  SystemSpec spec;
  spec.name = name;
  spec.params = p;
  spec.model = lagrangian_model(gamma, a, p.at("viscosity"), s);
  spec.u_minus = Vec(2);
  spec.u_minus << v_minus, u_minus;
  spec.u_plus = Vec(2);
  spec.u_plus << v_plus, u_plus;
  return spec;
}

SystemSpec lagrangian_rotated(const Params& p) {
  SystemSpec base = lagrangian(p, "isentropic_lagrangian_1d");
  Mat t = Mat::Identity(2, 2);
  t(1, 0) = p.at("kappa");
  SystemSpec spec;
  spec.name = "isentropic_lagrangian_1d_rotated";
  spec.params = p;
  spec.model = change_of_variables(*base.model, t, spec.name);
  const Eigen::FullPivLU<Mat> lu(t);
  spec.u_minus = lu.solve(base.u_minus);
  spec.u_plus = lu.solve(base.u_plus);
  return spec;
}

// Isentropic Navier-Stokes in two space dimensions with unknowns (rho, u1, u2):
//   rho_t + div(rho u) = 0,
//   (rho u)_t + div(rho u (x) u) + grad p = mu Lap u + (mu + eta) grad div u.
SystemSpec eulerian_2d(const Params& prm) {
  const double gamma = prm.at("gamma");
  const double a = prm.at("a");
  const double mu = prm.at("mu");
  const double eta = prm.at("eta");
  const double rho_minus = prm.at("rho_minus");
  const double rho_plus = prm.at("rho_plus");
  const double s = prm.at("s");
  auto pressure = [gamma, a](double rho) { return a * std::pow(rho, gamma); };
  auto dpressure = [gamma, a](double rho) { return gamma * a * std::pow(rho, gamma - 1.0); };
  const double jump_p = pressure(rho_plus) - pressure(rho_minus);
  const double mass2 = jump_p / (1.0 / rho_minus - 1.0 / rho_plus);
  if (!(mass2 > 0.0)) {
    throw Error(ErrorKind::config, "Rankine-Hugoniot relations have no real mass flux");
  }
  const double mass = std::sqrt(mass2);  // flow from left to right through the shock

  SystemModel m;
  m.name = "isentropic_eulerian_2d";
  m.n = 3;
  m.r = 1;
  m.d = 2;
  m.s = s;
  m.flux = [pressure](int j, const Vec& u) -> Vec {
    const double rho = u(0), v1 = u(1), v2 = u(2);
    Vec f(3);
    switch (j) {
      case 0: f << rho, rho * v1, rho * v2; break;
      case 1: f << rho * v1, rho * v1 * v1 + pressure(rho), rho * v1 * v2; break;
      default: f << rho * v2, rho * v1 * v2, rho * v2 * v2 + pressure(rho); break;
    }
    return f;
  };
  m.jacobian = [dpressure](int j, const Vec& u) -> Mat {
    const double rho = u(0), v1 = u(1), v2 = u(2), c2 = dpressure(u(0));
    Mat a(3, 3);
    switch (j) {
      case 0: a << 1, 0, 0, v1, rho, 0, v2, 0, rho; break;
      case 1: a << v1, rho, 0, v1 * v1 + c2, 2 * rho * v1, 0, v1 * v2, rho * v2, rho * v1; break;
      default: a << v2, 0, rho, v1 * v2, rho * v2, rho * v1, v2 * v2 + c2, 0, 2 * rho * v2; break;
    }
    return a;
  };
  m.viscosity = [mu, eta](int j, int k, const Vec&) -> Mat {
    Mat b = Mat::Zero(3, 3);
    // b^{jk}_{il} = mu delta_jk delta_il + (mu + eta) delta_ij delta_kl on the velocity block
    for (int i = 1; i <= 2; ++i) {
      for (int l = 1; l <= 2; ++l) {
        double v = 0.0;
        if (j == k && i == l) v += mu;
        if (i == j && k == l) v += mu + eta;
        b(i, l) = v;
      }
    }
    return b;
  };
  m.viscosity_derivative = [](int, int, const Vec&, const Vec&) -> Mat { return Mat::Zero(3, 3); };

  SystemSpec spec;
  spec.name = "isentropic_eulerian_2d";
  spec.params = prm;
  spec.model = m;
  spec.u_minus = Vec(3);
  spec.u_minus << rho_minus, s + mass / rho_minus, 0.0;
  spec.u_plus = Vec(3);
  spec.u_plus << rho_plus, s + mass / rho_plus, 0.0;
  return spec;
}

SystemSpec glancing(const Params& p) {
  SystemSpec spec;
  spec.name = "glancing_model";
  spec.params = p;
  const double slope = p.at("tau_slope");
  spec.tau = [slope](double xi_hat) { return slope * xi_hat; };
  return spec;
}

}  // namespace

std::vector<std::string> system_names() {
  return {"burgers", "isentropic_lagrangian_1d", "isentropic_eulerian_2d", "glancing_model",
          "isentropic_lagrangian_1d_rotated"};
}

std::map<std::string, double> default_params(const std::string& name) {
  if (name == "burgers") return {{"u_minus", 1.0}, {"u_plus", -1.0}, {"viscosity", 1.0}};
  if (name == "isentropic_lagrangian_1d" || name == "isentropic_lagrangian_1d_rotated") {
    Params p{{"gamma", 5.0 / 3.0}, {"a", 1.0},       {"v_minus", 1.0},
             {"v_plus", 0.5},      {"u_minus", 0.0}, {"viscosity", 1.0}};
    if (name == "isentropic_lagrangian_1d_rotated") p["kappa"] = 0.5;
    return p;
  }
  if (name == "isentropic_eulerian_2d") {
    return {{"gamma", 5.0 / 3.0}, {"a", 1.0},        {"mu", 1.0}, {"eta", -2.0 / 3.0},
            {"rho_minus", 1.0},   {"rho_plus", 2.0}, {"s", 0.0}};
  }
  if (name == "glancing_model") return {{"tau_slope", 1.0}};
  throw Error(ErrorKind::unknown_system, "unknown system '" + name + "'");
}

SystemSpec get_system(const std::string& name, const std::map<std::string, double>& overrides) {
  const Params p = merge(default_params(name), overrides, name);
  if (name == "burgers") return burgers(p);
  if (name == "isentropic_lagrangian_1d") return lagrangian(p, name);
  if (name == "isentropic_lagrangian_1d_rotated") return lagrangian_rotated(p);
  if (name == "isentropic_eulerian_2d") return eulerian_2d(p);
  return glancing(p);
}

}  // namespace evanskit

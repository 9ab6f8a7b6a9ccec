#include "evanskit/model.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

#include "evanskit/errors.hpp"

namespace evanskit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::degenerate_viscosity: return "degenerate_viscosity";
    case ErrorKind::characteristic_shock: return "characteristic_shock";
    case ErrorKind::noninvertible_a11: return "noninvertible_a11";
    case ErrorKind::no_connection: return "no_connection";
    case ErrorKind::domain_too_short: return "domain_too_short";
    case ErrorKind::h1_violation: return "h1_violation";
    case ErrorKind::scaling_undefined: return "scaling_undefined";
    case ErrorKind::splitting_failure: return "splitting_failure";
    case ErrorKind::discontinuity: return "discontinuity";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::angle_required: return "angle_required";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::zero_on_contour: return "zero_on_contour";
    case ErrorKind::glancing: return "glancing";
    case ErrorKind::fit_error: return "fit_error";
    case ErrorKind::unknown_system: return "unknown_system";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

std::string_view to_string(ShockKind kind) {
  switch (kind) {
    case ShockKind::lax: return "Lax";
    case ShockKind::undercompressive: return "undercompressive";
    case ShockKind::overcompressive: return "overcompressive";
  }
  return "unknown";
}

Vec SystemModel::reduced_flux(const Vec& u) const { return flux(1, u) - s * flux(0, u); }

Mat SystemModel::reduced_jacobian(const Vec& u) const {
  return jacobian(1, u) - s * jacobian(0, u);
}

Mat SystemModel::viscosity_linearization(int j, const Vec& u, const Vec& du) const {
  Mat out(n, n);
  Vec e = Vec::Zero(n);
  for (int c = 0; c < n; ++c) {
    e.setZero();
    e(c) = 1.0;
    out.col(c) = viscosity_derivative(j, 1, u, e) * du;
  }
  return out;
}

void SystemModel::validate_at(const Vec& u) const {
  if (n < 1 || r < 0 || r > n || d < 1) {
    throw Error(ErrorKind::invalid_argument, "model '" + name + "': inconsistent dimensions");
  }
  if (b21_present && d != 1) {
    throw Error(ErrorKind::invalid_argument,
                "model '" + name + "': a nonzero b21 block is supported for d = 1 only");
  }
  if (u.size() != n) throw Error(ErrorKind::invalid_argument, "state has wrong dimension");
  const Partition part = partition();
  for (int j = 1; j <= d; ++j) {
    for (int k = 1; k <= d; ++k) {
      const Mat b = viscosity(j, k, u);
      double top = r > 0 ? b.topRows(r).cwiseAbs().maxCoeff() : 0.0;
      double lower_left = (r > 0 && !b21_present) ? part.b21(b).cwiseAbs().maxCoeff() : 0.0;
      if (top > 0.0 || lower_left > 0.0) {
        std::ostringstream msg;
        msg << "model '" << name << "': B^{" << j << k << "} violates the block structure";
        throw Error(ErrorKind::invalid_argument, msg.str());
      }
    }
  }
}

double check_h1(const SystemModel& model, const Vec& state) {
  if (model.r == 0) return 1.0;
  const Partition part = model.partition();
  const Mat at = model.reduced_jacobian(state);
  Mat block = part.b11(at);
  if (model.b21_present) {
    const Mat b = model.viscosity(1, 1, state);
    Eigen::FullPivLU<Mat> lu(part.b22(b));
    if (!lu.isInvertible()) {
      throw Error(ErrorKind::degenerate_viscosity, "b22 block of B^11 is singular");
    }
    block -= part.b12(at) * lu.solve(part.b21(b));
  }
  return block.determinant();
}

std::vector<Vec> unit_directions(int d, int samples) {
  std::vector<Vec> out;
  if (d == 1) {
    out.push_back(Vec::Ones(1));
    return out;
  }
  samples = std::max(samples, 1);
  if (d == 2) {
    for (int i = 0; i < samples; ++i) {
      const double th = std::numbers::pi * i / samples;
      Vec e(2);
      e << std::cos(th), std::sin(th);
      out.push_back(e);
    }
    return out;
  }
  if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < samples; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / samples;
      const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec e(3);
      e << rad * std::cos(golden * i), rad * std::sin(golden * i), z;
      out.push_back(e);
    }
    return out;
  }
  // d > 3: coordinate axes and normalized diagonals
  for (int i = 0; i < d; ++i) out.push_back(Vec::Unit(d, i));
  for (int i = 0; i < d; ++i) {
    for (int k = i + 1; k < d; ++k) {
      Vec e = (Vec::Unit(d, i) + Vec::Unit(d, k)) / std::sqrt(2.0);
      out.push_back(e);
    }
  }
  return out;
}

double check_h2(const SystemModel& model, const Vec& state, int samples) {
  if (samples < 1) throw Error(ErrorKind::invalid_argument, "check_h2 needs samples >= 1");
  const Partition part = model.partition();
  const int m = part.m();
  if (m == 0) return 1.0;
  double worst = std::numeric_limits<double>::infinity();
  for (const Vec& eta : unit_directions(model.d, samples)) {
    Mat sum = Mat::Zero(m, m);
    for (int j = 1; j <= model.d; ++j) {
      for (int k = 1; k <= model.d; ++k) {
        sum += eta(j - 1) * eta(k - 1) * part.b22(model.viscosity(j, k, state));
      }
    }
    const CVec ev = sum.eigenvalues();
    worst = std::min(worst, ev.real().minCoeff());
  }
  return worst;
}

double check_rh(const SystemModel& model, const Vec& u_minus, const Vec& u_plus) {
  return (model.reduced_flux(u_plus) - model.reduced_flux(u_minus)).cwiseAbs().maxCoeff();
}

std::vector<double> characteristic_speeds(const SystemModel& model, const Vec& state) {
  const Mat a0 = model.jacobian(0, state);
  const Mat m = a0.fullPivLu().solve(model.reduced_jacobian(state));
  const CVec ev = m.eigenvalues();
  std::vector<double> out(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) out[i] = ev(i).real();
  std::sort(out.begin(), out.end());
  return out;
}

ShockClassification classify(const SystemModel& model, const Vec& u_minus, const Vec& u_plus) {
  ShockClassification out;
  out.speeds_minus = characteristic_speeds(model, u_minus);
  out.speeds_plus = characteristic_speeds(model, u_plus);
  double largest = 0.0;
  for (double v : out.speeds_minus) largest = std::max(largest, std::abs(v));
  for (double v : out.speeds_plus) largest = std::max(largest, std::abs(v));
  const double tol = 1e-8 * (1.0 + largest);
  auto check = [&](const std::vector<double>& speeds, const char* side) {
    for (double v : speeds) {
      if (std::abs(v) < tol) {
        std::ostringstream msg;
        msg << "characteristic speed " << v << " at U" << side << " is within " << tol
            << " of zero";
        throw Error(ErrorKind::characteristic_shock, msg.str());
      }
    }
  };
  check(out.speeds_minus, "-");
  check(out.speeds_plus, "+");
  out.i_minus = static_cast<int>(
      std::count_if(out.speeds_minus.begin(), out.speeds_minus.end(), [](double v) { return v > 0; }));
  out.i_plus = static_cast<int>(
      std::count_if(out.speeds_plus.begin(), out.speeds_plus.end(), [](double v) { return v < 0; }));
  out.i = out.i_plus + out.i_minus;
  out.o = 2 * model.n - out.i;
  out.c = out.i - out.o;
  if (out.i == model.n + 1) {
    out.kind = ShockKind::lax;
  } else if (out.i <= model.n) {
    out.kind = ShockKind::undercompressive;
  } else {
    out.kind = ShockKind::overcompressive;
  }
  return out;
}

double jacobian_fd_error(const SystemModel& model, const Vec& state, double h) {
  double worst = 0.0;
  for (int j = 0; j <= model.d; ++j) {
    const Mat exact = model.jacobian(j, state);
    Mat fd(model.n, model.n);
    for (int c = 0; c < model.n; ++c) {
      Vec up = state, dn = state;
      up(c) += h;
      dn(c) -= h;
      fd.col(c) = (model.flux(j, up) - model.flux(j, dn)) / (2 * h);
    }
    worst = std::max(worst, (fd - exact).norm() / std::max(1.0, exact.norm()));
  }
  return worst;
}

double viscosity_derivative_fd_error(const SystemModel& model, const Vec& state, double h) {
  double worst = 0.0;
  for (int j = 1; j <= model.d; ++j) {
    for (int k = 1; k <= model.d; ++k) {
      for (int c = 0; c < model.n; ++c) {
        Vec e = Vec::Unit(model.n, c);
        const Mat exact = model.viscosity_derivative(j, k, state, e);
        const Mat fd = (model.viscosity(j, k, state + h * e) - model.viscosity(j, k, state - h * e)) /
                       (2 * h);
        worst = std::max(worst, (fd - exact).norm() / std::max(1.0, exact.norm()));
      }
    }
  }
  return worst;
}

SystemModel change_of_variables(const SystemModel& model, const Mat& t, const std::string& name) {
  SystemModel out = model;
  out.name = name;
  const Partition part = model.partition();
  out.b21_present = model.b21_present || (part.r > 0 && part.b21(t).cwiseAbs().maxCoeff() > 0.0);
  out.flux = [f = model.flux, t](int j, const Vec& v) { return f(j, t * v); };
  out.jacobian = [a = model.jacobian, t](int j, const Vec& v) -> Mat { return a(j, t * v) * t; };
  out.viscosity = [b = model.viscosity, t](int j, int k, const Vec& v) -> Mat {
    return b(j, k, t * v) * t;
  };
  out.viscosity_derivative = [db = model.viscosity_derivative, t](int j, int k, const Vec& v,
                                                                  const Vec& dir) -> Mat {
    return db(j, k, t * v, t * dir) * t;
  };
  return out;
}

}  // namespace evanskit

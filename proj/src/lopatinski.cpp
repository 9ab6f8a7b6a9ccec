#include "evanskit/lopatinski.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "evanskit/errors.hpp"
#include "evanskit/parallel.hpp"

namespace evanskit {

namespace {

// -(A1 - s A0)^{-1} (lambda A0 + i xi.A)
CMat symbol(const SystemModel& model, const Vec& state, const Frequency& angle) {
  CMat g = angle.lambda * model.jacobian(0, state).cast<cplx>();
  for (std::size_t j = 0; j < angle.xi.size() && static_cast<int>(j) + 2 <= model.d; ++j) {
    g += I_unit * angle.xi[j] * model.jacobian(static_cast<int>(j) + 2, state).cast<cplx>();
  }
  Eigen::FullPivLU<Mat> lu(model.reduced_jacobian(state));
  if (!lu.isInvertible()) throw Error(ErrorKind::characteristic_shock, "end state is characteristic");
  return -(lu.inverse().cast<cplx>() * g);
}

OrderedSchur pick(const CMat& m, Side side) {
  return ordered_schur(m, [side](const CVec& ev) {
    std::vector<bool> f(ev.size());
    for (int i = 0; i < ev.size(); ++i) f[i] = side == Side::plus ? ev(i).real() < 0 : ev(i).real() > 0;
    return f;
  });
}

Frequency reference_angle(const Frequency& like) {
  Frequency f;
  f.lambda = 1.0;
  f.xi.assign(like.xi.size(), 0.0);
  return f;
}

}  // namespace

double symbol_condition(const SystemModel& model, const Vec& state, const Frequency& angle) {
  Eigen::ComplexEigenSolver<CMat> es(symbol(model, state, angle));
  CMat v = es.eigenvectors();
  for (int j = 0; j < v.cols(); ++j) v.col(j).normalize();
  Eigen::JacobiSVD<CMat> svd(v);
  const auto& sv = svd.singularValues();
  const double lo = sv(sv.size() - 1);
  return lo > 0 ? sv(0) / lo : std::numeric_limits<double>::infinity();
}

CMat inviscid_modes(const SystemModel& model, const Vec& state, const Frequency& angle, Side side,
                    const CMat* reference) {
  const OrderedSchur s = pick(symbol(model, state, angle), side);
  if (!reference) return s.Q.leftCols(s.count);
  if (reference->cols() != s.count) {
    throw Error(ErrorKind::glancing, "inviscid mode count changes between the reference and this angle");
  }
  return spectral_projector(s) * (*reference);
}

namespace {

CMat slow_basis(const SystemModel& model, const Vec& state, const Frequency& angle, Side side) {
  const Frequency ref = reference_angle(angle);
  const CMat phi_ref = inviscid_modes(model, state, ref, side);
  return inviscid_modes(model, state, angle, side, &phi_ref);
}

void check_glancing(const SystemModel& model, const Vec& state, const Frequency& angle, double threshold) {
  const double c = symbol_condition(model, state, angle);
  if (!(c < threshold)) {
    std::ostringstream msg;
    msg << "inviscid symbol is near a Jordan block (eigenvector condition " << c << ")";
    throw Error(ErrorKind::glancing, msg.str());
  }
}

}  // namespace

cplx lopatinski_det(const SystemModel& model, const Vec& u_minus, const Vec& u_plus, const Frequency& angle,
                    double glancing_threshold) {
  check_glancing(model, u_plus, angle, glancing_threshold);
  check_glancing(model, u_minus, angle, glancing_threshold);
  const CMat php = slow_basis(model, u_plus, angle, Side::plus);
  const CMat phm = slow_basis(model, u_minus, angle, Side::minus);
  const int n = model.n;
  if (php.cols() + phm.cols() + 1 != n) {
    std::ostringstream msg;
    msg << "Lopatinski matrix needs n - 1 outgoing modes, found " << php.cols() + phm.cols();
    throw Error(ErrorKind::invalid_argument, msg.str());
  }
  CVec jump = angle.lambda * (model.flux(0, u_minus) - model.flux(0, u_plus)).cast<cplx>();
  for (std::size_t j = 0; j < angle.xi.size() && static_cast<int>(j) + 2 <= model.d; ++j) {
    const int idx = static_cast<int>(j) + 2;
    jump += I_unit * angle.xi[j] * (model.flux(idx, u_minus) - model.flux(idx, u_plus)).cast<cplx>();
  }
  CMat m(n, n);
  m << -model.reduced_jacobian(u_plus).cast<cplx>() * php, -model.reduced_jacobian(u_minus).cast<cplx>() * phm,
      jump;
  return m.determinant();
}

std::pair<CMat, CMat> low_frequency_bases(const SystemModel& model, const ShockProfile& p,
                                          const Formulation& sharp, const Frequency& angle, double rho) {
  const int n = model.n, m = model.n - model.r, N = model.system_size();
  SharpFrequency zero;
  zero.rho = 0.0;
  zero.lambda = angle.lambda;
  for (double x : angle.xi) zero.xi.push_back(x);
  const auto [a0_plus, a0_minus] = sharp.limits(zero);
  SharpFrequency at = zero;
  at.rho = rho;
  const auto [a_plus, a_minus] = sharp.limits(at);

  auto build = [&](const CMat& a0, const CMat& a, const Vec& state, Side side) {
    const CMat c = a0.block(0, n, n, m);
    const CMat e = a0.block(n, n, m, m);
    const OrderedSchur fs = pick(e, side);
    const CMat v = fs.Q.leftCols(fs.count);
    const CMat t = v.adjoint() * e * v;
    const CMat phi = slow_basis(model, state, angle, side);
    CMat r0 = CMat::Zero(N, fs.count + phi.cols());
    r0.block(0, 0, n, fs.count) = c * v * t.inverse();
    r0.block(n, 0, m, fs.count) = v;
    r0.block(0, fs.count, n, phi.cols()) = -model.reduced_jacobian(state).cast<cplx>() * phi;
    const OrderedSchur full = pick(a, side);
    if (full.count != r0.cols()) {
      std::ostringstream msg;
      msg << "low-frequency basis has " << r0.cols() << " columns, decaying subspace has " << full.count;
      throw Error(ErrorKind::splitting_failure, msg.str());
    }
    return CMat(spectral_projector(full) * r0);
  };
  return {build(a0_plus, a_plus, p.u_plus(), Side::plus), build(a0_minus, a_minus, p.u_minus(), Side::minus)};
}

namespace {

double spread_of(const std::vector<cplx>& g, const std::vector<bool>& skip) {
  cplx mean = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!skip[i]) {
      mean += g[i];
      ++count;
    }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  mean /= static_cast<double>(count);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!skip[i]) worst = std::max(worst, std::abs(g[i] - mean) / std::abs(mean));
  return worst;
}

// gamma(r) = gamma0 + c r by least squares; returns gamma0 and flags a poor fit.
cplx extrapolate(const std::vector<double>& r, const std::vector<cplx>& g, double& misfit) {
  const std::size_t k = r.size();
  if (k == 1) {
    misfit = 0.0;
    return g[0];
  }
  double sr = 0, srr = 0;
  cplx sg = 0, srg = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sr += r[i];
    srr += r[i] * r[i];
    sg += g[i];
    srg += r[i] * g[i];
  }
  const double det = k * srr - sr * sr;
  const cplx slope = (static_cast<double>(k) * srg - sr * sg) / det;
  const cplx g0 = (sg - slope * sr) / static_cast<double>(k);
  misfit = 0.0;
  for (std::size_t i = 0; i < k; ++i) misfit = std::max(misfit, std::abs(g0 + slope * r[i] - g[i]));
  misfit /= std::max(std::abs(g0), 1e-300);
  return g0;
}

LowFrequencyFit finish(LowFrequencyFit fit) {
  for (std::size_t a = 1; a < fit.radii.size(); ++a) {
    if (!(fit.radii[a] < fit.radii[a - 1])) throw Error(ErrorKind::invalid_argument, "radii must decrease");
  }
  fit.gamma_estimates.assign(fit.angles.size(), cplx(0.0));
  for (std::size_t a = 0; a < fit.angles.size(); ++a) {
    if (fit.unstable[a]) continue;
    double misfit = 0.0;
    fit.gamma_estimates[a] = extrapolate(fit.radii, fit.ratios[a], misfit);
    if (misfit > 0.05 || !std::isfinite(std::abs(fit.gamma_estimates[a]))) {
      std::ostringstream msg;
      msg << "low-frequency extrapolation does not settle at angle " << a << " (misfit " << misfit << ")";
      throw Error(ErrorKind::fit_error, msg.str());
    }
  }
  fit.spread = spread_of(fit.gamma_estimates, fit.unstable);
  return fit;
}

}  // namespace

LowFrequencyFit fit_low_frequency(const std::function<cplx(const Frequency&, double)>& d_bf,
                                  const std::function<cplx(const Frequency&)>& delta,
                                  const std::vector<Frequency>& angles, const std::vector<double>& radii) {
  LowFrequencyFit fit;
  fit.angles = angles;
  fit.radii = radii;
  for (const Frequency& a : angles) {
    const cplx dl = delta(a);
    fit.delta_values.push_back(dl);
    const bool zero = !(std::abs(dl) > 1e-12);
    fit.unstable.push_back(zero);
    std::vector<cplx> row;
    for (double r : radii) row.push_back(zero ? cplx(0.0) : d_bf(a, r) / dl);
    fit.ratios.push_back(row);
  }
  return finish(fit);
}

LowFrequencyFit fit_low_frequency(const SystemModel& model, const ShockProfile& p,
                                  const std::vector<Frequency>& angles, const std::vector<double>& radii, int jobs,
                                  const EvansOptions& opts) {
  EvansEngine engine(model, p, Variant::sharp_md, Scale::r, opts);
  LowFrequencyFit fit;
  fit.angles = angles;
  fit.radii = radii;
  fit.delta_values.resize(angles.size());
  fit.unstable.resize(angles.size());
  fit.ratios.assign(angles.size(), std::vector<cplx>(radii.size()));
  std::vector<double> unit_norms(angles.size());
  for (std::size_t a = 0; a < angles.size(); ++a) {
    if (std::abs(angles[a].r() - 1.0) > 1e-12) throw Error(ErrorKind::invalid_argument, "angles must be unit vectors");
    if (angles[a].lambda.real() < 0.0) throw Error(ErrorKind::invalid_argument, "angles need Re lambda >= 0");
    fit.delta_values[a] = lopatinski_det(model, p.u_minus(), p.u_plus(), angles[a]);
    fit.unstable[a] = !(std::abs(fit.delta_values[a]) > 1e-12);
  }
  parallel_for(angles.size() * radii.size(), jobs, [&](std::size_t idx) {
    const std::size_t a = idx / radii.size(), k = idx % radii.size();
    if (fit.unstable[a]) return;
    const auto [bp, bm] = low_frequency_bases(model, p, engine.formulation(), angles[a], radii[k]);
    SharpFrequency s;
    s.rho = radii[k];
    s.lambda = angles[a].lambda;
    for (double x : angles[a].xi) s.xi.push_back(x);
    fit.ratios[a][k] = engine.evaluate(s, bp, bm).D() / fit.delta_values[a];
  });
  return finish(fit);
}

std::vector<Frequency> sample_angles(int d, int count, double re_min) {
  std::vector<Frequency> out;
  const double phi_max = std::acos(std::clamp(re_min, 0.0, 1.0));
  if (d == 1) {
    for (int i = 0; i < count; ++i) {
      const double phi = count == 1 ? 0.0 : -phi_max + 2.0 * phi_max * i / (count - 1);
      out.emplace_back(std::exp(I_unit * phi));
    }
    return out;
  }
  // lambda# = cos(theta) e^{i phi}, xi# = sin(theta) e_2 with cos(theta) cos(phi) >= re_min
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double u = (i + 0.5) / count;
    const double theta = std::acos(re_min + (1.0 - re_min) * u);  // cos(theta) in [re_min, 1]
    const double ct = std::cos(theta);
    const double pm = std::acos(std::clamp(re_min / ct, -1.0, 1.0));
    const double phi = pm * std::sin(golden * i);
    Frequency f;
    f.lambda = ct * std::exp(I_unit * phi);
    f.xi.assign(d - 1, 0.0);
    f.xi[0] = std::sin(theta) * (i % 2 == 0 ? 1.0 : -1.0);
    out.push_back(f);
  }
  return out;
}

void write_fit_report(std::ostream& os, const LowFrequencyFit& fit) {
  os << std::setprecision(10);
  os << "# angle re_lambda im_lambda xi re_delta im_delta re_gamma im_gamma\n";
  for (std::size_t a = 0; a < fit.angles.size(); ++a) {
    const Frequency& f = fit.angles[a];
    os << a << ' ' << f.lambda.real() << ' ' << f.lambda.imag() << ' ' << (f.xi.empty() ? 0.0 : f.xi[0]) << ' '
       << fit.delta_values[a].real() << ' ' << fit.delta_values[a].imag() << ' ';
    if (fit.unstable[a]) {
      os << "nan nan  # Delta vanishes: inviscid instability\n";
    } else {
      os << fit.gamma_estimates[a].real() << ' ' << fit.gamma_estimates[a].imag() << '\n';
    }
  }
  os << "# spread " << fit.spread << "\n";
}

}  // namespace evanskit

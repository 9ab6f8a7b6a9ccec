#include "evanskit/evans.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "evanskit/errors.hpp"
#include "evanskit/parallel.hpp"

namespace evanskit {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<cplx>;

struct StepBudget {
  long used = 0;
  long limit = 0;
};

// Propagates `basis` from x0 to x1 for W' = (A(x) - sigma) W, orthonormalizing
// every `interval`; returns Q and accumulates log|det R| and its phase.
CMat propagate(const CoefficientField& field, const CMat& basis, double x0, double x1, double sigma,
               const EvansOptions& opts, double& log_scale, cplx& phase) {
  const int n = field.size();
  const int k = static_cast<int>(basis.cols());
  if (k == 0) return basis;
  State y(static_cast<std::size_t>(n) * k);
  Eigen::Map<CMat>(y.data(), n, k) = basis;
  StepBudget budget{0, opts.max_steps};
  CMat a;
  auto rhs = [&](const State& w, State& dw, double x) {
    if (++budget.used > budget.limit) {
      throw Error(ErrorKind::accuracy, "Evans integration exceeded its step budget");
    }
    field.eval_into(x, a);
    a.diagonal().array() -= sigma;
    Eigen::Map<CMat>(dw.data(), n, k).noalias() = a * Eigen::Map<const CMat>(w.data(), n, k);
  };
  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  const double dir = x1 > x0 ? 1.0 : -1.0;
  double x = x0;
  double dt = 0.05 * dir;
  auto orthonormalize = [&]() {
    Eigen::Map<CMat> w(y.data(), n, k);
    Eigen::HouseholderQR<CMat> qr(w);
    const CMat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    CMat q = qr.householderQ() * CMat::Identity(n, k);
    for (int i = 0; i < k; ++i) {
      const cplx d = r(i, i);
      const double mag = std::abs(d);
      if (!(mag > 0.0) || !std::isfinite(mag)) {
        throw Error(ErrorKind::accuracy, "propagated basis lost rank");
      }
      log_scale += std::log(mag);
      phase *= d / mag;
    }
    w = q;
  };
  while (dir * (x1 - x) > 1e-14 * (1.0 + std::abs(x1))) {
    const double xe = dir > 0 ? std::min(x + opts.reorth_interval, x1) : std::max(x - opts.reorth_interval, x1);
    try {
      odeint::integrate_adaptive(stepper, rhs, y, x, xe, dt);
    } catch (const odeint::step_adjustment_error& e) {
      throw Error(ErrorKind::accuracy, std::string("Evans integration failed: ") + e.what());
    }
    for (const cplx& v : y) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw Error(ErrorKind::accuracy, "Evans integration produced non-finite values");
      }
    }
    x = xe;
    orthonormalize();
  }
  if (x0 == x1) orthonormalize();
  return Eigen::Map<CMat>(y.data(), n, k);
}

// trace of the restriction of `a` to span(basis)
cplx restricted_trace(const CMat& a, const CMat& basis) {
  if (basis.cols() == 0) return 0.0;
  const CMat m = (basis.adjoint() * basis).ldlt().solve(basis.adjoint() * a * basis);
  return m.trace();
}

}  // namespace

MatchedBases integrate_bases(const CoefficientField& field, const CMat& basis_plus, const CMat& basis_minus,
                             const EvansOptions& opts) {
  const int n = field.size();
  if (basis_plus.rows() != n || basis_minus.rows() != n || basis_plus.cols() + basis_minus.cols() != n) {
    std::ostringstream msg;
    msg << "inconsistent splitting: " << basis_plus.cols() << " + " << basis_minus.cols() << " columns for N = " << n;
    throw Error(ErrorKind::splitting_failure, msg.str());
  }
  const double xp = field.x_max(), xm = field.x_min();
  const double xs = opts.x_match;
  if (xs < xm || xs > xp) throw Error(ErrorKind::invalid_argument, "match point outside the profile domain");
  const cplx tr_plus = restricted_trace(field.limit_plus(), basis_plus);
  const cplx tr_minus = restricted_trace(field.limit_minus(), basis_minus);
  const int kp = static_cast<int>(basis_plus.cols()), km = static_cast<int>(basis_minus.cols());
  const double sigma_p = kp > 0 ? tr_plus.real() / kp : 0.0;
  const double sigma_m = km > 0 ? tr_minus.real() / km : 0.0;
  MatchedBases out;
  out.plus = propagate(field, basis_plus, xp, xs, sigma_p, opts, out.log_scale, out.phase);
  out.minus = propagate(field, basis_minus, xm, xs, sigma_m, opts, out.log_scale, out.phase);
  // undo the shifts and normalize the data at the ends as exp(A(+-inf) x) V
  const cplx e = tr_plus * xp + tr_minus * xm + tr_plus.real() * (xs - xp) + tr_minus.real() * (xs - xm);
  out.log_scale += e.real();
  out.phase *= std::exp(I_unit * e.imag());
  return out;
}

EvansSample match(const MatchedBases& m) {
  const int n = static_cast<int>(m.plus.rows());
  CMat mat(n, m.plus.cols() + m.minus.cols());
  mat << m.plus, m.minus;
  EvansSample s;
  Eigen::PartialPivLU<CMat> lu(mat);
  s.value = lu.determinant() * m.phase;
  s.log_scale = m.log_scale;
  Eigen::JacobiSVD<CMat> svd(mat);
  s.conditioning = svd.singularValues()(n - 1);
  s.ill_conditioned = s.conditioning < 1e-13;
  return s;
}

EvansSample evaluate(const CoefficientField& field, const CMat& basis_plus, const CMat& basis_minus,
                     const EvansOptions& opts) {
  EvansSample s = match(integrate_bases(field, basis_plus, basis_minus, opts));
  s.freq = field.freq();
  s.variant = field.variant();
  return s;
}

EvansSample evaluate(const CoefficientField& field, const SubspaceSplit& plus, const SubspaceSplit& minus,
                     const EvansOptions& opts) {
  if (plus.k_stable + minus.k_unstable != field.size()) {
    std::ostringstream msg;
    msg << "no consistent splitting: k_stable(+) = " << plus.k_stable << ", k_unstable(-) = " << minus.k_unstable
        << ", N = " << field.size();
    throw Error(ErrorKind::splitting_failure, msg.str());
  }
  return evaluate(field, plus.stable_basis, minus.unstable_basis, opts);
}

EvansEngine::EvansEngine(const SystemModel& model, const ShockProfile& profile, Variant variant, Scale scale,
                         EvansOptions opts)
    : model_(model), profile_(profile), formulation_(model, profile, variant, scale), opts_(opts) {}

EvansSample EvansEngine::evaluate(const Frequency& f) const {
  const CoefficientField field = formulation_.field(f);
  return evanskit::evaluate(field, split(field.limit_plus()), split(field.limit_minus()), opts_);
}

EvansSample EvansEngine::evaluate(const Frequency& f, const CMat& bp, const CMat& bm) const {
  return evanskit::evaluate(formulation_.field(f), bp, bm, opts_);
}

EvansSample EvansEngine::evaluate(const SharpFrequency& s, const CMat& bp, const CMat& bm) const {
  return evanskit::evaluate(formulation_.field(s), bp, bm, opts_);
}

EvansSample evaluate_bf(const SystemModel& model, const ShockProfile& p, const Frequency& freq,
                        const EvansOptions& opts) {
  if (!(freq.r() > 0.0)) throw Error(ErrorKind::angle_required, "D_bf at (lambda, xi) = 0 needs an angle");
  return EvansEngine(model, p, Variant::sharp_md, Scale::r, opts).evaluate(freq);
}

EvansSample evaluate_mbf(const SystemModel& model, const ShockProfile& p, const Frequency& freq,
                         const EvansOptions& opts) {
  if (freq.r2() == 0.0) throw Error(ErrorKind::angle_required, "D_mbf at r2 = 0 needs an angle");
  if (freq.lambda.real() < 0.0) throw Error(ErrorKind::invalid_argument, "D_mbf requires Re lambda >= 0");
  return EvansEngine(model, p, Variant::sharp_md, Scale::r2, opts).evaluate(freq);
}

Contour circle(cplx center, double radius, std::vector<double> xi) {
  Contour c;
  c.shape = "circle";
  c.at = [=](double t) { return Frequency(center + radius * std::exp(I_unit * (2.0 * std::numbers::pi * t)), xi); };
  return c;
}

Contour semicircle(double radius, double re_offset, std::vector<double> xi) {
  Contour c;
  c.shape = "semicircle";
  // arc from -i R to i R through R, then the segment back down
  const double arc = std::numbers::pi * radius;
  const double total = arc + 2.0 * radius;
  c.at = [=](double t) {
    const double s = t * total;
    if (s <= arc) {
      const double th = -0.5 * std::numbers::pi + s / radius;
      return Frequency(re_offset + radius * std::exp(I_unit * th), xi);
    }
    const double y = radius - (s - arc);
    return Frequency(cplx(re_offset, y), xi);
  };
  return c;
}

Contour rectangle(cplx lo, cplx hi, std::vector<double> xi) {
  Contour c;
  c.shape = "rectangle";
  const double w = hi.real() - lo.real(), h = hi.imag() - lo.imag();
  const double total = 2.0 * (w + h);
  c.at = [=](double t) {
    double s = t * total;
    if (s <= w) return Frequency(lo + s, xi);
    s -= w;
    if (s <= h) return Frequency(cplx(hi.real(), lo.imag() + s), xi);
    s -= h;
    if (s <= w) return Frequency(cplx(hi.real() - s, hi.imag()), xi);
    s -= w;
    return Frequency(cplx(lo.real(), hi.imag() - s), xi);
  };
  return c;
}

double phase_sum(const std::vector<cplx>& values, bool closed) {
  double total = 0.0;
  const std::size_t n = values.size();
  const std::size_t segs = closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) total += std::arg(values[(i + 1) % n] / values[i]);
  return total / (2.0 * std::numbers::pi);
}

ContourResult winding(const EvansEngine& engine, const Contour& contour, const WindingOptions& opts) {
  const int n0 = std::max(opts.initial_samples, 4);
  auto limit_plus = [&](double t) { return engine.limits(contour.at(t)).first; };
  auto limit_minus = [&](double t) { return engine.limits(contour.at(t)).second; };
  std::vector<double> params(n0 + 1);
  for (int i = 0; i <= n0; ++i) params[i] = static_cast<double>(i) / n0;
  const KatoBasis kp = kato_continue(limit_plus, params, Flavor::stable, opts.kato);
  const KatoBasis km = kato_continue(limit_minus, params, Flavor::unstable, opts.kato);
  if (kp.k + km.k != engine.formulation().size()) {
    throw Error(ErrorKind::splitting_failure, "no consistent splitting on the contour");
  }

  struct Node {
    double t = 0.0;
    KatoBasis kp, km;  // one-sample Kato states
    int depth = 0;
    EvansSample sample;
    bool done = false;
  };
  std::vector<Node> nodes(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    nodes[i].t = params[i];
    nodes[i].kp = kato_sample(kp, i);
    nodes[i].km = kato_sample(km, i);
  }

  auto compute = [&]() {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (!nodes[i].done) todo.push_back(i);
    parallel_for(todo.size(), opts.jobs, [&](std::size_t j) {
      Node& nd = nodes[todo[j]];
      nd.sample = engine.evaluate(contour.at(nd.t), nd.kp.R[0], nd.km.R[0]);
    });
    for (std::size_t i : todo) nodes[i].done = true;
  };

  int depth_reached = 0;
  for (;;) {
    compute();
    std::vector<Node> refined;
    refined.reserve(2 * nodes.size());
    bool changed = false;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double inc = std::abs(std::arg(nodes[i + 1].sample.value / nodes[i].sample.value));
      const int depth = std::max(nodes[i].depth, nodes[i + 1].depth);
      refined.push_back(nodes[i]);
      if (inc < opts.max_increment) continue;
      if (depth >= opts.max_depth) {
        std::ostringstream msg;
        msg << "phase increment " << inc << " persists on segment t in [" << nodes[i].t << ", " << nodes[i + 1].t
            << "] after " << depth << " bisections";
        throw Error(ErrorKind::resolution, msg.str());
      }
      Node mid;
      mid.t = 0.5 * (nodes[i].t + nodes[i + 1].t);
      mid.depth = depth + 1;
      depth_reached = std::max(depth_reached, mid.depth);
      mid.kp = kato_extend(limit_plus, nodes[i].kp, 0, mid.t, opts.kato);
      mid.km = kato_extend(limit_minus, nodes[i].km, 0, mid.t, opts.kato);
      refined.push_back(std::move(mid));
      changed = true;
    }
    refined.push_back(nodes.back());
    nodes = std::move(refined);
    if (!changed) break;
  }

  ContourResult res;
  res.refinement_depth = depth_reached;
  std::vector<cplx> values;
  for (const Node& nd : nodes) {
    if (nd.sample.ill_conditioned) {
      std::ostringstream msg;
      msg << "Evans function is numerically zero on the contour near lambda = " << nd.sample.freq.lambda;
      throw Error(ErrorKind::zero_on_contour, msg.str());
    }
    res.params.push_back(nd.t);
    res.contour.push_back(nd.sample.freq);
    res.samples.push_back(nd.sample);
    values.push_back(nd.sample.value);
  }
  // the last node is t = 1 with the transported bases: an open sum closes the loop
  res.phase_sum = phase_sum(values, false);
  res.winding = static_cast<int>(std::lround(res.phase_sum));
  return res;
}

void write_samples(std::ostream& os, const std::vector<EvansSample>& samples) {
  os << "# re_lambda im_lambda";
  std::size_t nxi = samples.empty() ? 0 : samples.front().freq.xi.size();
  for (std::size_t j = 0; j < nxi; ++j) os << " xi" << j + 2;
  os << " re_value im_value log_scale conditioning\n" << std::setprecision(17);
  for (const EvansSample& s : samples) {
    os << s.freq.lambda.real() << ' ' << s.freq.lambda.imag();
    for (double x : s.freq.xi) os << ' ' << x;
    os << ' ' << s.value.real() << ' ' << s.value.imag() << ' ' << s.log_scale << ' ' << s.conditioning << '\n';
  }
}

}  // namespace evanskit

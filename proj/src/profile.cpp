#include "evanskit/profile.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "evanskit/errors.hpp"

namespace evanskit {

ShockProfile::ShockProfile(std::vector<double> grid, Mat values, Mat derivative, Mat second,
                           Vec u_minus, Vec u_plus)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      derivative_(std::move(derivative)),
      second_(std::move(second)),
      u_minus_(std::move(u_minus)),
      u_plus_(std::move(u_plus)) {
  if (grid_.size() < 2 || values_.cols() != static_cast<long>(grid_.size())) {
    throw Error(ErrorKind::invalid_argument, "profile arrays do not match the grid");
  }
}

void ShockProfile::at(double x, Vec& u, Vec& du) const {
  if (x <= grid_.front()) {
    u = values_.col(0);
    du = derivative_.col(0);
    return;
  }
  if (x >= grid_.back()) {
    u = values_.col(grid_.size() - 1);
    du = derivative_.col(grid_.size() - 1);
    return;
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const long i = std::distance(grid_.begin(), it) - 1;
  const double h = grid_[i + 1] - grid_[i];
  const double t = (x - grid_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  // cubic Hermite basis and its derivative (in t)
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  u = h00 * values_.col(i) + h * h10 * derivative_.col(i) + h01 * values_.col(i + 1) +
      h * h11 * derivative_.col(i + 1);
  du = h00 * derivative_.col(i) + h * h10 * second_.col(i) + h01 * derivative_.col(i + 1) +
       h * h11 * second_.col(i + 1);
}

namespace {

// The reduced profile ODE y' = F(y) on the parabolic unknowns y = u2, with
// u1 slaved to y through f~1_1(u1, y) = f~1_1(U-).
class ReducedOde {
 public:
  ReducedOde(const SystemModel& model, const Vec& u_minus, const Vec& u_plus)
      : model_(model), part_(model.partition()), u_minus_(u_minus), u_plus_(u_plus),
        flux_minus_(model.reduced_flux(u_minus)) {}

  int m() const { return part_.m(); }

  struct Point {
    Vec u;   // full state
    Vec du;  // full derivative U'
    Vec f;   // F(y) = u2'
  };

  Vec solve_u1(const Vec& y, const Vec& guess) const {
    const int r = part_.r;
    if (r == 0) return Vec(0);
    Vec u(part_.n);
    u.head(r) = guess;
    u.tail(m()) = y;
    for (int it = 0; it < 50; ++it) {
      const Vec g = (model_.reduced_flux(u) - flux_minus_).head(r);
      const Mat a11 = model_.reduced_jacobian(u).topLeftCorner(r, r);
      Eigen::FullPivLU<Mat> lu(a11);
      if (!lu.isInvertible()) {
        throw Error(ErrorKind::noninvertible_a11, "singular A~1_11 while solving the algebraic profile equation");
      }
      const Vec step = lu.solve(g);
      u.head(r) -= step;
      if (step.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + u.head(r).lpNorm<Eigen::Infinity>())) {
        return u.head(r);
      }
      if (it > 3 && g.lpNorm<Eigen::Infinity>() < 1e-15 * (1.0 + flux_minus_.lpNorm<Eigen::Infinity>())) {
        return u.head(r);
      }
    }
    const Vec g = (model_.reduced_flux(u) - flux_minus_).head(r);
    if (g.lpNorm<Eigen::Infinity>() < 1e-12 * (1.0 + flux_minus_.lpNorm<Eigen::Infinity>())) return u.head(r);
    throw Error(ErrorKind::noninvertible_a11, "Newton failed on the algebraic profile equation");
  }

  Point eval(const Vec& y, const Vec& guess) const {
    const int r = part_.r;
    Point p;
    p.u.resize(part_.n);
    p.u.head(r) = solve_u1(y, guess);
    p.u.tail(m()) = y;
    const Mat at = model_.reduced_jacobian(p.u);
    const Mat b = model_.viscosity(1, 1, p.u);
    Mat slave = Mat::Zero(r, m());  // du1/dy
    if (r > 0) slave = -at.topLeftCorner(r, r).fullPivLu().solve(at.topRightCorner(r, m()));
    Mat beff = part_.b22(b);
    if (r > 0) beff += part_.b21(b) * slave;
    const Vec rhs = (model_.reduced_flux(p.u) - flux_minus_).tail(m());
    Eigen::FullPivLU<Mat> lu(beff);
    if (!lu.isInvertible()) throw Error(ErrorKind::degenerate_viscosity, "singular effective viscosity on the profile");
    p.f = lu.solve(rhs);
    p.du.resize(part_.n);
    p.du.head(r) = slave * p.f;
    p.du.tail(m()) = p.f;
    return p;
  }

  // dF/dy by central differences.
  Mat jacobian(const Vec& y, const Vec& guess) const {
    Mat j(m(), m());
    for (int k = 0; k < m(); ++k) {
      const double h = 1e-6 * (1.0 + std::abs(y(k)));
      Vec yp = y, ym = y;
      yp(k) += h;
      ym(k) -= h;
      j.col(k) = (eval(yp, guess).f - eval(ym, guess).f) / (2 * h);
    }
    return j;
  }

  // Linearization at an end state, exact in the block formulas.
  Mat linearization(const Vec& state) const {
    const int r = part_.r;
    const Mat at = model_.reduced_jacobian(state);
    const Mat b = model_.viscosity(1, 1, state);
    Mat slave = Mat::Zero(r, m());
    if (r > 0) slave = -at.topLeftCorner(r, r).fullPivLu().solve(at.topRightCorner(r, m()));
    Mat beff = part_.b22(b);
    Mat rhs = part_.b22(at);
    if (r > 0) {
      beff += part_.b21(b) * slave;
      rhs += part_.b21(at) * slave;
    }
    return beff.fullPivLu().solve(rhs);
  }

  const Vec& u_minus() const { return u_minus_; }
  const Vec& u_plus() const { return u_plus_; }
  const Partition& partition() const { return part_; }

 private:
  const SystemModel& model_;
  Partition part_;
  Vec u_minus_, u_plus_, flux_minus_;
};

// Real orthonormal basis of the invariant subspace of a real matrix picked by `pick`.
Mat real_subspace(const Mat& e, const std::function<bool(cplx)>& pick) {
  const OrderedSchur s = ordered_schur(e.cast<cplx>(), [&](const CVec& ev) {
    std::vector<bool> flags(ev.size());
    for (int i = 0; i < ev.size(); ++i) flags[i] = pick(ev(i));
    return flags;
  });
  if (s.count == 0) return Mat(e.rows(), 0);
  const CMat q = s.Q.leftCols(s.count);
  Mat stacked(e.rows(), 2 * s.count);
  stacked << q.real(), q.imag();
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(s.count);
}

// Rows annihilating span(basis).
Mat annihilator(const Mat& basis) {
  const int m = static_cast<int>(basis.rows());
  const int k = static_cast<int>(basis.cols());
  if (k == 0) return Mat::Identity(m, m);
  if (k == m) return Mat(0, m);
  Eigen::HouseholderQR<Mat> qr(basis);
  const Mat q = qr.householderQ() * Mat::Identity(m, m);
  return q.rightCols(m - k).transpose();
}

constexpr double kGap = 1e-10;

}  // namespace

EndStateRates end_state_rates(const SystemModel& model, const Vec& u_minus, const Vec& u_plus) {
  ReducedOde ode(model, u_minus, u_plus);
  EndStateRates out;
  const Eigen::VectorXcd em = ode.linearization(u_minus).eigenvalues();
  const Eigen::VectorXcd ep = ode.linearization(u_plus).eigenvalues();
  out.nu_minus = std::numeric_limits<double>::infinity();
  out.nu_plus = std::numeric_limits<double>::infinity();
  for (int i = 0; i < em.size(); ++i) {
    if (em(i).real() > kGap) {
      ++out.unstable_minus;
      out.nu_minus = std::min(out.nu_minus, em(i).real());
    }
  }
  for (int i = 0; i < ep.size(); ++i) {
    if (ep(i).real() < -kGap) {
      ++out.stable_plus;
      out.nu_plus = std::min(out.nu_plus, -ep(i).real());
    }
  }
  return out;
}

ShockProfile solve_profile(const SystemModel& model, const Vec& u_minus, const Vec& u_plus,
                           const ProfileOptions& opts) {
  if (u_minus.size() != model.n || u_plus.size() != model.n) {
    throw Error(ErrorKind::invalid_argument, "end states have the wrong dimension");
  }
  const double scale = 1.0 + std::max(u_minus.lpNorm<Eigen::Infinity>(), u_plus.lpNorm<Eigen::Infinity>());
  if ((u_minus - u_plus).lpNorm<Eigen::Infinity>() <= 1e-12 * scale) {
    throw Error(ErrorKind::no_connection, "equal end states admit only the constant solution");
  }
  if (check_rh(model, u_minus, u_plus) > 1e-10 * scale) {
    throw Error(ErrorKind::no_connection, "end states violate the Rankine-Hugoniot condition");
  }
  model.validate_at(u_minus);
  model.validate_at(u_plus);

  ReducedOde ode(model, u_minus, u_plus);
  const Partition part = model.partition();
  const int m = part.m();
  const int r = part.r;
  if (m == 0) throw Error(ErrorKind::invalid_argument, "no parabolic unknowns");

  const EndStateRates rates = end_state_rates(model, u_minus, u_plus);
  if (rates.unstable_minus + rates.stable_plus < m + 1 || rates.unstable_minus == 0 ||
      rates.stable_plus == 0) {
    throw Error(ErrorKind::no_connection,
                "end-state dimension count admits no transverse connection");
  }
  const double nu_min = std::min(rates.nu_minus, rates.nu_plus);
  const double L = opts.L > 0 ? opts.L : std::log(1e10) / nu_min;
  const int nodes = std::max(opts.nodes, 9) | 1;
  const int intervals = nodes - 1;

  std::vector<double> x(nodes);
  const double alpha = opts.grading;
  for (int i = 0; i < nodes; ++i) {
    const double t = -1.0 + 2.0 * i / intervals;
    x[i] = opts.phase_shift + (alpha > 0 ? L * std::sinh(alpha * t) / std::sinh(alpha) : L * t);
  }
  x[intervals / 2] = opts.phase_shift;

  const Vec y_minus = u_minus.tail(m), y_plus = u_plus.tail(m);
  int phase_comp = 0;
  (y_plus - y_minus).cwiseAbs().maxCoeff(&phase_comp);
  const double phase_value = 0.5 * (y_minus(phase_comp) + y_plus(phase_comp));

  const Mat left_rows = annihilator(real_subspace(ode.linearization(u_minus), [](cplx z) { return z.real() > kGap; }));
  const Mat right_rows = annihilator(real_subspace(ode.linearization(u_plus), [](cplx z) { return z.real() < -kGap; }));
  const int nl = static_cast<int>(left_rows.rows());
  const int nr = static_cast<int>(right_rows.rows());

  // initial guess: a tanh front with the mean end-state rate
  const double nu_bar = 2.0 / (1.0 / rates.nu_minus + 1.0 / rates.nu_plus);
  Mat y(m, nodes);
  Mat u1(r, nodes);
  for (int i = 0; i < nodes; ++i) {
    const double w = 0.5 * (1.0 + std::tanh(0.5 * nu_bar * (x[i] - opts.phase_shift)));
    y.col(i) = y_minus + w * (y_plus - y_minus);
    u1.col(i) = u_minus.head(r) + w * (u_plus.head(r) - u_minus.head(r));
  }

  const int unknowns = m * nodes;
  const int equations = nl + m * intervals + 1 + nr;

  std::vector<ReducedOde::Point> pts(nodes), mids(intervals);
  std::vector<Mat> jac(nodes), jac_mid(intervals);
  Mat u1_mid(r, intervals);

  auto residual = [&](const Mat& yy, Mat& u1g, bool with_jac, Vec& res) {
    for (int i = 0; i < nodes; ++i) {
      pts[i] = ode.eval(yy.col(i), u1g.col(i));
      u1g.col(i) = pts[i].u.head(r);
      if (with_jac) jac[i] = ode.jacobian(yy.col(i), u1g.col(i));
    }
    res.resize(equations);
    int row = 0;
    if (nl > 0) res.segment(row, nl) = left_rows * (yy.col(0) - y_minus);
    row += nl;
    for (int i = 0; i < intervals; ++i) {
      const double h = x[i + 1] - x[i];
      const Vec ym = 0.5 * (yy.col(i) + yy.col(i + 1)) + h / 8.0 * (pts[i].f - pts[i + 1].f);
      const Vec g = 0.5 * (u1g.col(i) + u1g.col(i + 1));
      mids[i] = ode.eval(ym, g);
      if (with_jac) jac_mid[i] = ode.jacobian(ym, mids[i].u.head(r));
      res.segment(row, m) = yy.col(i + 1) - yy.col(i) - h / 6.0 * (pts[i].f + 4.0 * mids[i].f + pts[i + 1].f);
      row += m;
    }
    res(row++) = yy(phase_comp, intervals / 2) - phase_value;
    if (nr > 0) res.segment(row, nr) = right_rows * (yy.col(nodes - 1) - y_plus);
  };

  auto assemble = [&]() {
    std::vector<Eigen::Triplet<double>> trip;
    int row = 0;
    for (int a = 0; a < nl; ++a)
      for (int k = 0; k < m; ++k) trip.emplace_back(row + a, k, left_rows(a, k));
    row += nl;
    const Mat eye = Mat::Identity(m, m);
    for (int i = 0; i < intervals; ++i) {
      const double h = x[i + 1] - x[i];
      const Mat dl = -eye - h / 6.0 * (jac[i] + 4.0 * jac_mid[i] * (0.5 * eye + h / 8.0 * jac[i]));
      const Mat dr = eye - h / 6.0 * (jac[i + 1] + 4.0 * jac_mid[i] * (0.5 * eye - h / 8.0 * jac[i + 1]));
      for (int a = 0; a < m; ++a)
        for (int k = 0; k < m; ++k) {
          trip.emplace_back(row + a, m * i + k, dl(a, k));
          trip.emplace_back(row + a, m * (i + 1) + k, dr(a, k));
        }
      row += m;
    }
    trip.emplace_back(row++, m * (intervals / 2) + phase_comp, 1.0);
    for (int a = 0; a < nr; ++a)
      for (int k = 0; k < m; ++k) trip.emplace_back(row + a, m * (nodes - 1) + k, right_rows(a, k));
    Eigen::SparseMatrix<double> j(equations, unknowns);
    j.setFromTriplets(trip.begin(), trip.end());
    j.makeCompressed();
    return j;
  };

  Vec res;
  residual(y, u1, true, res);
  double norm = res.lpNorm<Eigen::Infinity>();
  bool converged = false;
  for (int iter = 0; iter < 80 && !converged; ++iter) {
    const Eigen::SparseMatrix<double> j = assemble();
    Vec step;
    if (equations == unknowns) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(j);
      if (lu.info() != Eigen::Success) throw Error(ErrorKind::no_connection, "singular collocation Jacobian");
      step = lu.solve(-res);
    } else {
      // more unknowns than conditions: minimum-norm Newton step
      const Eigen::SparseMatrix<double> jt = j.transpose();
      Eigen::SparseMatrix<double> g = j * jt;
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(g);
      if (lu.info() != Eigen::Success) throw Error(ErrorKind::no_connection, "singular collocation Jacobian");
      step = jt * lu.solve(-res);
    }
    double damping = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k) {
      Mat trial = y;
      for (int i = 0; i < nodes; ++i) trial.col(i) += damping * step.segment(m * i, m);
      Mat u1t = u1;
      Vec rt;
      try {
        residual(trial, u1t, false, rt);
      } catch (const Error&) {
        damping *= 0.5;
        continue;
      }
      const double nt = rt.lpNorm<Eigen::Infinity>();
      if (nt < (1.0 - 1e-4 * damping) * norm || nt < 1e-13) {
        y = trial;
        u1 = u1t;
        accepted = true;
        const double step_norm = damping * step.lpNorm<Eigen::Infinity>();
        converged = (step_norm < 1e-13 * (1.0 + y.lpNorm<Eigen::Infinity>()) || nt < 1e-13);
        norm = nt;
        break;
      }
      damping *= 0.5;
    }
    if (!accepted) {
      if (norm < 1e-11) {
        converged = true;
        break;
      }
      throw Error(ErrorKind::no_connection, "profile Newton iteration stalled at residual " + std::to_string(norm));
    }
    residual(y, u1, !converged, res);
  }
  if (!converged && norm > 1e-11) {
    throw Error(ErrorKind::no_connection, "profile Newton iteration did not converge");
  }

  const int n = model.n;
  Mat values(n, nodes), deriv(n, nodes), second(n, nodes);
  for (int i = 0; i < nodes; ++i) {
    const ReducedOde::Point& p = pts[i];
    values.col(i) = p.u;
    deriv.col(i) = p.du;
    const double fnorm = p.f.lpNorm<Eigen::Infinity>();
    if (fnorm == 0.0) {
      second.col(i).setZero();
      continue;
    }
    const double h = 1e-6;
    const Vec dir = p.f / fnorm;
    const Vec vp = ode.eval(y.col(i) + h * dir, p.u.head(r)).du;
    const Vec vm = ode.eval(y.col(i) - h * dir, p.u.head(r)).du;
    second.col(i) = fnorm * (vp - vm) / (2 * h);
  }

  // (H1) must hold along the whole profile, with one sign
  if (r > 0) {
    const double h1_first = check_h1(model, values.col(0));
    for (int i = 0; i < nodes; ++i) {
      const double h1 = check_h1(model, values.col(i));
      if (h1 == 0.0 || (h1 > 0) != (h1_first > 0)) {
        std::ostringstream msg;
        msg << "hyperbolic block becomes characteristic on the profile at x = " << x[i];
        throw Error(ErrorKind::noninvertible_a11, msg.str());
      }
    }
  }

  ShockProfile prof(x, values, deriv, second, u_minus, u_plus);
  const double tail = std::max((values.col(0) - u_minus).lpNorm<Eigen::Infinity>(),
                               (values.col(nodes - 1) - u_plus).lpNorm<Eigen::Infinity>());
  if (tail > opts.tail_tol) {
    const double suggest = L + std::log(tail / opts.tail_tol) / nu_min + 1.0;
    std::ostringstream msg;
    msg << "profile tail " << tail << " exceeds " << opts.tail_tol << "; try L = " << suggest;
    throw Error(ErrorKind::domain_too_short, msg.str());
  }
  const double resid = profile_residual(model, prof);
  if (resid > opts.tol) {
    throw Error(ErrorKind::no_connection, "profile residual " + std::to_string(resid) + " above tolerance");
  }
  const DecayFit fit = fit_decay_rates(prof);
  prof.nu_minus = fit.reliable ? fit.nu_minus : rates.nu_minus;
  prof.nu_plus = fit.reliable ? fit.nu_plus : rates.nu_plus;
  return prof;
}

namespace {

double traveling_residual(const SystemModel& model, const Vec& u, const Vec& du, const Vec& flux_minus) {
  const Vec res = model.viscosity(1, 1, u) * du - (model.reduced_flux(u) - flux_minus);
  return res.lpNorm<Eigen::Infinity>();
}

}  // namespace

double profile_residual(const SystemModel& model, const ShockProfile& p) {
  const Vec fm = model.reduced_flux(p.u_minus());
  double worst = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    worst = std::max(worst, traveling_residual(model, p.values().col(i), p.derivative().col(i), fm));
  }
  return worst;
}

double algebraic_residual(const SystemModel& model, const ShockProfile& p) {
  if (model.r == 0) return 0.0;
  const Vec fm = model.reduced_flux(p.u_minus());
  double worst = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const Vec g = (model.reduced_flux(p.values().col(i)) - fm).head(model.r);
    worst = std::max(worst, g.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

double interpolation_defect(const SystemModel& model, const ShockProfile& p) {
  const Vec fm = model.reduced_flux(p.u_minus());
  double worst = 0.0;
  Vec u, du;
  for (int i = 0; i + 1 < p.size(); ++i) {
    for (double t : {0.25, 0.75}) {
      p.at(p.grid()[i] + t * (p.grid()[i + 1] - p.grid()[i]), u, du);
      worst = std::max(worst, traveling_residual(model, u, du, fm));
    }
  }
  return worst;
}

DecayFit fit_decay_rates(const ShockProfile& p) {
  DecayFit fit;
  const double c = p.center();
  const double L = p.L();
  auto slope = [&](double lo, double hi, const Vec& end, bool& ok) {
    std::vector<double> xs, ls;
    for (int i = 0; i < p.size(); ++i) {
      const double xi = p.grid()[i] - c;
      if (xi < lo || xi > hi) continue;
      const double dist = (p.values().col(i) - end).lpNorm<Eigen::Infinity>();
      if (!(dist > 0.0)) {
        ok = false;
        return 0.0;
      }
      xs.push_back(xi);
      ls.push_back(std::log(dist));
    }
    if (xs.size() < 8) {
      ok = false;
      return 0.0;
    }
    // distance to the end state must shrink monotonically toward it
    const bool right = lo > 0;
    for (std::size_t k = 1; k < ls.size(); ++k) {
      if (right ? ls[k] > ls[k - 1] : ls[k] < ls[k - 1]) ok = false;
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sx += xs[k];
      sy += ls[k];
      sxx += xs[k] * xs[k];
      sxy += xs[k] * ls[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  bool ok = true;
  fit.nu_plus = -slope(0.4 * L, 0.85 * L, p.u_plus(), ok);
  fit.nu_minus = slope(-0.85 * L, -0.4 * L, p.u_minus(), ok);
  fit.reliable = ok && fit.nu_plus > 0 && fit.nu_minus > 0;
  return fit;
}

void write_profile(std::ostream& os, const ShockProfile& p) {
  os << "# x";
  for (int k = 0; k < p.n(); ++k) os << " U" << k + 1;
  for (int k = 0; k < p.n(); ++k) os << " dU" << k + 1;
  os << "\n" << std::setprecision(17);
  for (int i = 0; i < p.size(); ++i) {
    os << p.grid()[i];
    for (int k = 0; k < p.n(); ++k) os << ' ' << p.values()(k, i);
    for (int k = 0; k < p.n(); ++k) os << ' ' << p.derivative()(k, i);
    os << '\n';
  }
}

}  // namespace evanskit

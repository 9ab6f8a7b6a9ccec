#include "evanskit/bases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "evanskit/errors.hpp"

namespace evanskit {

namespace {

std::vector<bool> by_sign(const CVec& ev, bool negative) {
  std::vector<bool> f(ev.size());
  for (int i = 0; i < ev.size(); ++i) f[i] = negative ? ev(i).real() < 0 : ev(i).real() > 0;
  return f;
}

double norm2(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

SubspaceSplit split(const CMat& a, double gap_tol) {
  SubspaceSplit s;
  const OrderedSchur st = ordered_schur(a, [](const CVec& ev) { return by_sign(ev, true); });
  s.eigenvalues = st.eigenvalues();
  s.gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.eigenvalues.size(); ++i) s.gap = std::min(s.gap, std::abs(s.eigenvalues(i).real()));
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  if (!(s.gap > gap_tol * scale)) {
    std::ostringstream msg;
    msg << "limit matrix has an eigenvalue within " << s.gap << " of the imaginary axis";
    throw Error(ErrorKind::splitting_failure, msg.str());
  }
  const OrderedSchur su = ordered_schur(a, [](const CVec& ev) { return by_sign(ev, false); });
  s.k_stable = st.count;
  s.k_unstable = su.count;
  s.stable_basis = st.Q.leftCols(st.count);
  s.unstable_basis = su.Q.leftCols(su.count);
  s.stable_projector = spectral_projector(st);
  s.unstable_projector = spectral_projector(su);
  return s;
}

CMat kato_step(const CMat& p_prev, const CMat& p_next, const CMat& r_prev) {
  const CMat q = p_next * r_prev;
  return p_next * (1.5 * r_prev - 0.5 * (p_prev * q));
}

namespace {

struct GroupState {
  CMat P;
  CVec group;
  CVec rest;
};

// Projector onto the eigenvalues of `a` continuing `prev` (nearest-neighbour
// matching). Returns false if the grouping is ambiguous.
bool continue_group(const CMat& a, const GroupState& prev, GroupState& out) {
  bool ok = true;
  const OrderedSchur s = ordered_schur(a, [&](const CVec& ev) {
    std::vector<bool> f(ev.size());
    int count = 0;
    for (int i = 0; i < ev.size(); ++i) {
      double dg = std::numeric_limits<double>::infinity(), dr = dg;
      for (int k = 0; k < prev.group.size(); ++k) dg = std::min(dg, std::abs(ev(i) - prev.group(k)));
      for (int k = 0; k < prev.rest.size(); ++k) dr = std::min(dr, std::abs(ev(i) - prev.rest(k)));
      f[i] = dg < dr;
      count += f[i];
    }
    if (count != prev.group.size()) ok = false;
    return f;
  });
  if (!ok) return false;
  const CVec ev = s.eigenvalues();
  out.group = ev.head(s.count);
  out.rest = ev.tail(ev.size() - s.count);
  // the two groups must stay apart for the projector to exist
  double sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < out.group.size(); ++i)
    for (int k = 0; k < out.rest.size(); ++k) sep = std::min(sep, std::abs(out.group(i) - out.rest(k)));
  if (!(sep > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()))) return false;
  out.P = spectral_projector(s);
  return true;
}

KatoBasis transport(const std::function<CMat(double)>& matrix_at, const std::vector<double>& params,
                    Flavor flavor, const CMat* r0, const GroupState* start, const KatoOptions& opts) {
  if (params.empty()) throw Error(ErrorKind::invalid_argument, "empty Kato path");
  KatoBasis kb;
  kb.flavor = flavor;
  GroupState state;
  CMat r;
  if (start) {
    state = *start;
    r = *r0;
  } else {
    const CMat a0 = matrix_at(params.front());
    const OrderedSchur s0 =
        ordered_schur(a0, [&](const CVec& ev) { return by_sign(ev, flavor == Flavor::stable); });
    state.P = spectral_projector(s0);
    const CVec ev0 = s0.eigenvalues();
    state.group = ev0.head(s0.count);
    state.rest = ev0.tail(ev0.size() - s0.count);
    r = r0 ? CMat(state.P * (*r0)) : CMat(s0.Q.leftCols(s0.count));
  }
  kb.k = static_cast<int>(state.group.size());
  kb.params.push_back(params.front());
  kb.R.push_back(r);
  kb.P.push_back(state.P);
  kb.group.push_back(state.group);
  kb.rest.push_back(state.rest);

  // recursive bisection between two parameters
  std::function<void(double, double, int)> advance = [&](double ta, double tb, int depth) {
    GroupState next;
    const bool grouped = continue_group(matrix_at(tb), state, next);
    if (!grouped || norm2(next.P - state.P) >= opts.max_jump) {
      if (depth >= opts.max_depth) {
        std::ostringstream msg;
        msg << "eigenprojector jumps between path parameters " << ta << " and " << tb
            << " (possible eigenvalue crossing or glancing point)";
        throw Error(ErrorKind::discontinuity, msg.str());
      }
      const double mid = 0.5 * (ta + tb);
      ++kb.inserted;
      advance(ta, mid, depth + 1);
      advance(mid, tb, depth + 1);
      return;
    }
    r = kato_step(state.P, next.P, r);
    state = std::move(next);
  };

  for (std::size_t j = 1; j < params.size(); ++j) {
    advance(params[j - 1], params[j], 0);
    kb.params.push_back(params[j]);
    kb.R.push_back(r);
    kb.P.push_back(state.P);
    kb.group.push_back(state.group);
    kb.rest.push_back(state.rest);
  }
  return kb;
}

}  // namespace

KatoBasis kato_continue(const std::function<CMat(double)>& matrix_at, const std::vector<double>& params,
                        Flavor flavor, const KatoOptions& opts) {
  return transport(matrix_at, params, flavor, nullptr, nullptr, opts);
}

KatoBasis kato_continue(const std::function<CMat(double)>& matrix_at, const std::vector<double>& params,
                        Flavor flavor, const CMat& r0, const KatoOptions& opts) {
  return transport(matrix_at, params, flavor, &r0, nullptr, opts);
}

KatoBasis kato_extend(const std::function<CMat(double)>& matrix_at, const KatoBasis& kb, std::size_t j, double t,
                      const KatoOptions& opts) {
  GroupState start{kb.P[j], kb.group[j], kb.rest[j]};
  KatoBasis out = transport(matrix_at, {kb.params[j], t}, kb.flavor, &kb.R[j], &start, opts);
  KatoBasis one;
  one.flavor = out.flavor;
  one.k = out.k;
  one.inserted = out.inserted;
  one.params = {out.params.back()};
  one.R = {out.R.back()};
  one.P = {out.P.back()};
  one.group = {out.group.back()};
  one.rest = {out.rest.back()};
  return one;
}

KatoBasis kato_sample(const KatoBasis& kb, std::size_t j) {
  KatoBasis one;
  one.flavor = kb.flavor;
  one.k = kb.k;
  one.params = {kb.params[j]};
  one.R = {kb.R[j]};
  one.P = {kb.P[j]};
  one.group = {kb.group[j]};
  one.rest = {kb.rest[j]};
  return one;
}

cplx glancing_delta(double r, double xi_hat, cplx lambda_hat, const std::function<double(double)>& tau) {
  return lambda_hat - I_unit * tau(xi_hat) + r;
}

CMat glancing_model(double r, double xi_hat, cplx lambda_hat, const std::function<double(double)>& tau) {
  CMat a(2, 2);
  a << 0.0, 1.0, glancing_delta(r, xi_hat, lambda_hat, tau), 0.0;
  return a;
}

}  // namespace evanskit

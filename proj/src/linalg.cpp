#include "evanskit/linalg.hpp"

#include <cmath>

namespace evanskit {
namespace {

// Plane rotation [c s; -conj(s) c] mapping (f, g) to (r, 0).
void givens(cplx f, cplx g, double& c, cplx& s) {
  if (g == cplx(0.0)) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (f == cplx(0.0)) {
    c = 0.0;
    s = std::conj(g) / std::abs(g);
    return;
  }
  const double norm = std::hypot(std::abs(f), std::abs(g));
  c = std::abs(f) / norm;
  s = (f / std::abs(f)) * std::conj(g) / norm;
}

// x <- c x + s y, y <- c y - conj(s) x
template <class X, class Y>
void rotate(X&& x, Y&& y, double c, cplx s) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const cplx xi = x(i);
    const cplx yi = y(i);
    x(i) = c * xi + s * yi;
    y(i) = c * yi - std::conj(s) * xi;
  }
}

// Exchange the adjacent diagonal entries k and k+1 of an upper triangular T.
void swap_adjacent(CMat& t, CMat& q, int k) {
  const int n = static_cast<int>(t.rows());
  const cplx t11 = t(k, k);
  const cplx t22 = t(k + 1, k + 1);
  double c = 1.0;
  cplx s = 0.0;
  givens(t(k, k + 1), t22 - t11, c, s);
  if (k + 2 < n) {
    rotate(t.row(k).tail(n - k - 2).transpose(), t.row(k + 1).tail(n - k - 2).transpose(), c, s);
  }
  if (k > 0) rotate(t.col(k).head(k), t.col(k + 1).head(k), c, std::conj(s));
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  rotate(q.col(k), q.col(k + 1), c, std::conj(s));
}

}  // namespace

OrderedSchur ordered_schur(const CMat& a,
                           const std::function<std::vector<bool>(const CVec&)>& choose) {
  Eigen::ComplexSchur<CMat> schur(a);
  OrderedSchur out;
  out.Q = schur.matrixU();
  out.T = schur.matrixT();
  const int n = static_cast<int>(a.rows());
  std::vector<bool> flags = choose(out.T.diagonal());
  int placed = 0;
  for (int j = 0; j < n; ++j) {
    if (!flags[j]) continue;
    for (int k = j - 1; k >= placed; --k) swap_adjacent(out.T, out.Q, k);
    ++placed;
  }
  out.count = placed;
  return out;
}

CMat solve_sylvester(const CMat& a, const CMat& b, const CMat& c) {
  const Eigen::Index p = a.rows();
  const Eigen::Index q = b.rows();
  CMat kron = CMat::Zero(p * q, p * q);
  for (Eigen::Index j = 0; j < q; ++j) {
    kron.block(j * p, j * p, p, p) += a;
    for (Eigen::Index i = 0; i < q; ++i) {
      kron.block(j * p, i * p, p, p) -= b(i, j) * CMat::Identity(p, p);
    }
  }
  const CVec rhs = Eigen::Map<const CVec>(c.data(), p * q);
  const CVec x = kron.fullPivLu().solve(rhs);
  return Eigen::Map<const CMat>(x.data(), p, q);
}

CMat spectral_projector(const OrderedSchur& s) {
  const Eigen::Index n = s.T.rows();
  const Eigen::Index k = s.count;
  CMat pt = CMat::Zero(n, n);
  pt.topLeftCorner(k, k).setIdentity();
  if (k > 0 && k < n) {
    const CMat y = solve_sylvester(s.T.topLeftCorner(k, k), s.T.bottomRightCorner(n - k, n - k),
                                   -s.T.topRightCorner(k, n - k));
    pt.topRightCorner(k, n - k) = -y;
  }
  return s.Q * pt * s.Q.adjoint();
}

}  // namespace evanskit

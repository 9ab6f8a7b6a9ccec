#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace evanskit {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx I_unit{0.0, 1.0};

// Block partition of an n-vector into (u1, u2) with u1 of size r.
struct Partition {
  int n = 0;
  int r = 0;
  int m() const { return n - r; }

  template <class M>
  auto b11(const M& a) const { return a.topLeftCorner(r, r); }
  template <class M>
  auto b12(const M& a) const { return a.topRightCorner(r, m()); }
  template <class M>
  auto b21(const M& a) const { return a.bottomLeftCorner(m(), r); }
  template <class M>
  auto b22(const M& a) const { return a.bottomRightCorner(m(), m()); }
};

/// Ordered complex Schur form A = Q T Q^H whose leading `count` diagonal
/// entries are the eigenvalues picked by the selector.
struct OrderedSchur {
  CMat Q;
  CMat T;
  int count = 0;
  CVec eigenvalues() const { return T.diagonal(); }
};

/// `choose` receives the eigenvalues in unordered Schur position and returns
/// one flag per eigenvalue.
OrderedSchur ordered_schur(const CMat& a,
                           const std::function<std::vector<bool>(const CVec&)>& choose);

/// Spectral projector onto the invariant subspace spanned by the leading
/// `count` Schur vectors, along the complementary invariant subspace.
CMat spectral_projector(const OrderedSchur& s);

/// Solve A X - X B = C for small dense A, B (Kronecker form).
CMat solve_sylvester(const CMat& a, const CMat& b, const CMat& c);

}  // namespace evanskit

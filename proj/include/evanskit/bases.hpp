#pragma once

#include <functional>
#include <vector>

#include "evanskit/linalg.hpp"

namespace evanskit {

/// Stable / unstable invariant subspaces of a constant limit matrix.
struct SubspaceSplit {
  int k_stable = 0;
  int k_unstable = 0;
  CMat stable_basis;    // orthonormal, N x k_stable
  CMat unstable_basis;  // orthonormal, N x k_unstable
  CMat stable_projector;
  CMat unstable_projector;
  CVec eigenvalues;
  double gap = 0.0;  // min |Re mu|
};

SubspaceSplit split(const CMat& limit_matrix, double gap_tol = 1e-10);

enum class Flavor { stable, unstable };

struct KatoOptions {
  int max_depth = 24;       // bisection levels per requested step
  double max_jump = 1.0;    // bound on |P_{j+1} - P_j|
};

/// Kato transport of an invariant-subspace basis along a parameter path.
/// The subspace is the eigenvalue group picked by sign of Re at params[0]
/// and followed by continuity afterwards.
struct KatoBasis {
  Flavor flavor = Flavor::stable;
  int k = 0;
  std::vector<double> params;
  std::vector<CMat> R;
  std::vector<CMat> P;
  std::vector<CVec> group;  // eigenvalues of the tracked group at each sample
  std::vector<CVec> rest;   // the remaining eigenvalues
  int inserted = 0;         // bisection points added
};

KatoBasis kato_continue(const std::function<CMat(double)>& matrix_at, const std::vector<double>& params,
                        Flavor flavor, const KatoOptions& opts = {});

/// As above with a prescribed initial basis (projected onto the group).
KatoBasis kato_continue(const std::function<CMat(double)>& matrix_at, const std::vector<double>& params,
                        Flavor flavor, const CMat& r0, const KatoOptions& opts = {});

/// Transport sample `j` of `kb` to parameter `t` (one step, bisected as
/// needed), keeping the group identity of sample j. Returns the one-sample
/// state at t.
KatoBasis kato_extend(const std::function<CMat(double)>& matrix_at, const KatoBasis& kb, std::size_t j, double t,
                 const KatoOptions& opts = {});

/// Sample j of `kb` as a one-sample state.
KatoBasis kato_sample(const KatoBasis& kb, std::size_t j);

/// One transport step R_{j+1} = P_{j+1} [ 3/2 - 1/2 P_j P_{j+1} ] R_j.
CMat kato_step(const CMat& p_prev, const CMat& p_next, const CMat& r_prev);

/// delta = lambda_hat - i tau(xi_hat) + r
cplx glancing_delta(double r, double xi_hat, cplx lambda_hat, const std::function<double(double)>& tau);

/// [[0, 1], [delta, 0]]
CMat glancing_model(double r, double xi_hat, cplx lambda_hat, const std::function<double(double)>& tau);

}  // namespace evanskit

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "evanskit/linalg.hpp"

namespace evanskit {

/// A planar shock problem for a conservation law with block ("real")
/// viscosity, written in the frame moving with the shock:
///
///   f^0(U)_t + (f^1(U) - s f^0(U))_{x_1} + sum_{j>=2} f^j(U)_{x_j}
///       = sum_{j,k} (B^{jk}(U) U_{x_k})_{x_j}
///
/// The state splits as U = (u1, u2) with u1 of size r (hyperbolic part).
/// Every viscosity matrix has a zero first block row; the lower-left block
/// is zero unless `b21_present` is set (one space dimension only).
struct SystemModel {
  std::string name;
  int n = 0;
  int r = 0;
  int d = 1;
  double s = 0.0;
  bool b21_present = false;

  /// f^j(U), j = 0..d.
  std::function<Vec(int j, const Vec& u)> flux;
  /// A^j(U) = df^j(U), j = 0..d.
  std::function<Mat(int j, const Vec& u)> jacobian;
  /// B^{jk}(U), j, k = 1..d.
  std::function<Mat(int j, int k, const Vec& u)> viscosity;
  /// Directional derivative D_U B^{jk}(U)[dir].
  std::function<Mat(int j, int k, const Vec& u, const Vec& dir)> viscosity_derivative;

  Partition partition() const { return {n, r}; }
  int system_size() const { return 2 * n - r; }

  /// f~^1(U) = f^1(U) - s f^0(U).
  Vec reduced_flux(const Vec& u) const;
  /// A^1(U) - s A^0(U).
  Mat reduced_jacobian(const Vec& u) const;
  /// Matrix M with M V = dB^{j1}(U)(V, U') := (D_U B^{j1}(U)[V]) U'.
  Mat viscosity_linearization(int j, const Vec& u, const Vec& du) const;

  /// Checks dimensions and the zero-block pattern of B^{jk} at `u`.
  void validate_at(const Vec& u) const;
};

enum class ShockKind { lax, undercompressive, overcompressive };

std::string_view to_string(ShockKind kind);

struct ShockClassification {
  int i_plus = 0;
  int i_minus = 0;
  int i = 0;
  int o = 0;
  int c = 0;
  ShockKind kind = ShockKind::lax;
  std::vector<double> speeds_minus;
  std::vector<double> speeds_plus;
};

/// det(A^1_11 - s A^0_11) at `state`; the (H1') determinant
/// det(A^1_11 - A^1_12 (b22)^{-1} b21 - s A^0_11) when b21 is present.
/// Returns 1 for r = 0.
double check_h1(const SystemModel& model, const Vec& state);

/// Minimum over `samples` deterministic unit directions of the smallest real
/// part of spec(sum eta_j eta_k b^{jk}(state)).
double check_h2(const SystemModel& model, const Vec& state, int samples = 64);

/// Max-norm of f~^1(U+) - f~^1(U-).
double check_rh(const SystemModel& model, const Vec& u_minus, const Vec& u_plus);

/// Characteristic speeds: eigenvalues of (A^0)^{-1}(A^1 - s A^0), ascending.
std::vector<double> characteristic_speeds(const SystemModel& model, const Vec& state);

ShockClassification classify(const SystemModel& model, const Vec& u_minus,
                             const Vec& u_plus);

/// Deterministic unit directions in R^d (Fibonacci lattice for d = 3,
/// equispaced half-circle for d = 2, {1} for d = 1).
std::vector<Vec> unit_directions(int d, int samples);

/// Largest relative deviation between the analytic Jacobians A^j(U) and
/// central differences of f^j at step h.
double jacobian_fd_error(const SystemModel& model, const Vec& state, double h = 1e-5);

/// Same cross-check for the viscosity derivative against differences of B^{jk}.
double viscosity_derivative_fd_error(const SystemModel& model, const Vec& state,
                                     double h = 1e-5);

/// The system expressed in new unknowns V with U = T V for constant invertible T:
/// f^j(T V), A^j(T V) T, B^{jk}(T V) T. Flags b21 when the result needs it.
SystemModel change_of_variables(const SystemModel& model, const Mat& t,
                                const std::string& name);

}  // namespace evanskit

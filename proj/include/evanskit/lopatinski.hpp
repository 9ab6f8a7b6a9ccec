#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "evanskit/evans.hpp"
#include "evanskit/model.hpp"
#include "evanskit/profile.hpp"

namespace evanskit {

enum class Side { plus, minus };

/// Modes Phi e^{mu x1} of the inviscid symbol at `state`,
///   (lambda A0 + i xi.A + mu (A1 - s A0)) Phi = 0,
/// decaying at +inf (Re mu < 0, side plus) or at -inf (Re mu > 0, side minus).
/// With `reference`, the basis is the spectral projection of it (continuous in
/// the angle); otherwise orthonormal Schur vectors.
CMat inviscid_modes(const SystemModel& model, const Vec& state, const Frequency& angle, Side side,
                    const CMat* reference = nullptr);

/// Eigenvector condition number of the inviscid symbol; large near glancing.
double symbol_condition(const SystemModel& model, const Vec& state, const Frequency& angle);

/// det[ -A1(U+) Phi+ | -A1(U-) Phi- | lambda (f0(U-) - f0(U+)) + i xi.(f(U-) - f(U+)) ]
/// for Lax shocks. Uses reference bases at (lambda, xi) = (1, 0) transported
/// by spectral projection, so the value is continuous in the angle.
cplx lopatinski_det(const SystemModel& model, const Vec& u_minus, const Vec& u_plus, const Frequency& angle,
                    double glancing_threshold = 1e6);

/// Bases of the sharp system at scale rho and `angle` built from the rho = 0
/// structure (fast parabolic modes plus inviscid slow modes), projected onto
/// the decaying subspace at scale rho.
std::pair<CMat, CMat> low_frequency_bases(const SystemModel& model, const ShockProfile& p,
                                          const Formulation& sharp, const Frequency& angle, double rho);

struct LowFrequencyFit {
  std::vector<Frequency> angles;
  std::vector<double> radii;
  std::vector<cplx> delta_values;
  std::vector<std::vector<cplx>> ratios;  // D_bf / Delta per angle and radius
  std::vector<cplx> gamma_estimates;      // extrapolated to r = 0
  std::vector<bool> unstable;             // Delta = 0: no estimate
  double spread = 0.0;
};

LowFrequencyFit fit_low_frequency(const SystemModel& model, const ShockProfile& p,
                                  const std::vector<Frequency>& angles, const std::vector<double>& radii,
                                  int jobs = 1, const EvansOptions& opts = {});

/// The fitting pipeline on a supplied D_bf(angle, r) and Delta(angle).
LowFrequencyFit fit_low_frequency(const std::function<cplx(const Frequency&, double)>& d_bf,
                                  const std::function<cplx(const Frequency&)>& delta,
                                  const std::vector<Frequency>& angles, const std::vector<double>& radii);

/// Unit angles (lambda#, xi#) with Re lambda# >= re_min, spread over the
/// allowed cap; d = 1 gives lambda# on the right half unit circle.
std::vector<Frequency> sample_angles(int d, int count, double re_min);

void write_fit_report(std::ostream& os, const LowFrequencyFit& fit);

}  // namespace evanskit

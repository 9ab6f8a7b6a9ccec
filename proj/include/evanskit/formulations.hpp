#pragma once

#include <iosfwd>
#include <memory>
#include <utility>
#include <string>
#include <vector>

#include "evanskit/model.hpp"
#include "evanskit/profile.hpp"

namespace evanskit {

/// Spectral frequency (lambda, xi) with xi in R^{d-1}.
struct Frequency {
  cplx lambda{0.0, 0.0};
  std::vector<double> xi;

  Frequency() = default;
  Frequency(cplx l, std::vector<double> x = {}) : lambda(l), xi(std::move(x)) {}

  double xi_norm() const;
  /// r = |lambda, xi|
  double r() const;
  /// r2 = |xi| + lambda
  cplx r2() const { return xi_norm() + lambda; }
  /// (lambda, xi) / r; requires r > 0
  Frequency angle() const;
  /// (lambda, xi) / r
  Frequency scaled(double rho) const;
};

/// Sharp-form scale: unit (flux form), r = |lambda, xi| (balanced flux) or
/// r2 = |xi| + lambda (modified balanced flux).
enum class Scale { unit, r, r2 };

/// The data A# depends on: scale rho and angle (lambda#, xi#) = (lambda, xi) / rho.
struct SharpFrequency {
  cplx rho{1.0, 0.0};
  cplx lambda{0.0, 0.0};
  std::vector<cplx> xi;
};

/// Sharp data of `freq` under `scale`; r = 0 (or r2 = 0) raises angle_required.
SharpFrequency sharpen(const Frequency& freq, Scale scale);

enum class Variant { integrated_1d, flux_1d, balanced_flux_1d, flux_md, sharp_md, integrated_b21 };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// Frozen linearized coefficients at one point of the profile. Index j runs
/// over 1..d for the A's and B's (slot 0 of `a` holds A0).
struct LinearizedCoeffs {
  Mat a0;
  std::vector<Mat> a;       // a[j], j = 1..d: A-bar^j including the dB^{j1} correction
  std::vector<Mat> a_tilde; // a_tilde[j] = a[j] + (B-bar^{j1})', j >= 2
  std::vector<std::vector<Mat>> b;  // b[j][k], 1..d
};

LinearizedCoeffs linearized_coeffs(const SystemModel& model, const Vec& u, const Vec& du);
LinearizedCoeffs linearized_coeffs(const SystemModel& model, const ShockProfile& p, double x1);

class FieldTable;

/// x1 -> A(x1; lambda, xi) for one formulation and frequency.
class CoefficientField {
 public:
  Variant variant() const { return variant_; }
  int size() const { return n_; }
  const Frequency& freq() const { return freq_; }
  cplx rho() const { return rho_; }

  /// A(x1); cubic interpolation between tabulated profile points, clamped
  /// to the end tables outside [x_min, x_max].
  CMat eval(double x1) const;
  void eval_into(double x1, CMat& out) const;
  /// A(x1) assembled directly from the profile interpolant (no table); the
  /// reference the tabulation is checked against.
  CMat eval_exact(double x1) const;
  const CMat& limit_plus() const { return plus_; }
  const CMat& limit_minus() const { return minus_; }
  double x_min() const;
  double x_max() const;

 private:
  friend class Formulation;
  Variant variant_ = Variant::integrated_1d;
  int n_ = 0;
  Frequency freq_;
  cplx rho_{1.0, 0.0};
  std::shared_ptr<const FieldTable> table_;
  std::vector<cplx> coef_;
  std::vector<CMat> values_;  // combined matrix at each table abscissa
  CMat plus_, minus_;
};

/// Per-(model, profile, variant) precomputation. The coefficient matrix of
/// every variant is a short sum c_k(lambda, xi, rho) T_k(x1) with
/// frequency-independent T_k; the T_k are tabulated once here.
class Formulation {
 public:
  Formulation(const SystemModel& model, const ShockProfile& profile, Variant variant);

  Variant variant() const { return variant_; }
  int size() const;

  /// sharp_md uses `scale` to pick rho; the other variants ignore it.
  Formulation(const SystemModel& model, const ShockProfile& profile, Variant variant, Scale scale);

  Scale scale() const { return scale_; }

  CoefficientField field(const Frequency& freq) const;
  /// sharp_md at explicit scale and angle (rho may be 0).
  CoefficientField field(const SharpFrequency& sharp) const;
  /// A(+inf), A(-inf) only.
  std::pair<CMat, CMat> limits(const Frequency& freq) const;
  std::pair<CMat, CMat> limits(const SharpFrequency& sharp) const;

 private:
  SharpFrequency scales_for(const Frequency& freq) const;
  CoefficientField assemble(const SharpFrequency& s, const Frequency& freq) const;

  Variant variant_;
  Scale scale_ = Scale::r;
  std::shared_ptr<const FieldTable> table_;
};

CoefficientField build_integrated_1d(const SystemModel& model, const ShockProfile& p, cplx lambda);
CoefficientField build_flux_1d(const SystemModel& model, const ShockProfile& p, cplx lambda);
CoefficientField build_balanced_flux_1d(const SystemModel& model, const ShockProfile& p, cplx lambda);
CoefficientField build_flux_md(const SystemModel& model, const ShockProfile& p, const Frequency& freq);
/// `sharp` holds (lambda#, xi#); the assembled matrix is A#(rho, xi#, lambda#).
CoefficientField build_sharp_md(const SystemModel& model, const ShockProfile& p, cplx rho,
                                const Frequency& sharp);
CoefficientField build_sharp_md(const SystemModel& model, const ShockProfile& p,
                                const SharpFrequency& sharp);
CoefficientField build_integrated_b21(const SystemModel& model, const ShockProfile& p, cplx lambda);

/// Writes A(x1) with separators between the (r, n-r, n-r) blocks.
void dump_matrix(std::ostream& os, const SystemModel& model, const CoefficientField& f, double x1);

}  // namespace evanskit

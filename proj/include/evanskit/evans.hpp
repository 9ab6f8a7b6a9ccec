#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "evanskit/bases.hpp"
#include "evanskit/formulations.hpp"

namespace evanskit {

struct EvansOptions {
  double x_match = 0.0;
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double reorth_interval = 1.0;  // QR every this much x1
  long max_steps = 1000000;
};

struct EvansSample {
  Frequency freq;
  Variant variant = Variant::integrated_1d;
  cplx value{0.0, 0.0};     // determinant of the matched matrix, with phase factors
  double log_scale = 0.0;   // D = value * exp(log_scale)
  double conditioning = 0.0;
  bool ill_conditioned = false;
  cplx D() const { return value * std::exp(log_scale); }
};

/// Solutions at x_match of the two propagated subspaces, with orthonormal
/// columns; the discarded triangular factors live in log_scale / phase.
struct MatchedBases {
  CMat plus;
  CMat minus;
  double log_scale = 0.0;
  cplx phase{1.0, 0.0};
};

MatchedBases integrate_bases(const CoefficientField& field, const CMat& basis_plus, const CMat& basis_minus,
                             const EvansOptions& opts = {});

/// det[plus | minus] with the accumulated factors.
EvansSample match(const MatchedBases& m);

EvansSample evaluate(const CoefficientField& field, const CMat& basis_plus, const CMat& basis_minus,
                     const EvansOptions& opts = {});
/// Uses the stable basis of `plus` and the unstable basis of `minus`.
EvansSample evaluate(const CoefficientField& field, const SubspaceSplit& plus, const SubspaceSplit& minus,
                     const EvansOptions& opts = {});

/// Caches the tabulated formulation of one (model, profile, variant).
/// Holds references: model and profile must outlive it.
class EvansEngine {
 public:
  EvansEngine(const SystemModel& model, const ShockProfile& profile, Variant variant,
              Scale scale = Scale::r, EvansOptions opts = {});

  Variant variant() const { return formulation_.variant(); }
  Scale scale() const { return formulation_.scale(); }
  const Formulation& formulation() const { return formulation_; }
  const EvansOptions& options() const { return opts_; }
  const SystemModel& model() const { return model_; }
  const ShockProfile& profile() const { return profile_; }

  std::pair<CMat, CMat> limits(const Frequency& f) const { return formulation_.limits(f); }

  /// Bases from the ordered Schur split of the limits.
  EvansSample evaluate(const Frequency& f) const;
  EvansSample evaluate(const Frequency& f, const CMat& basis_plus, const CMat& basis_minus) const;
  EvansSample evaluate(const SharpFrequency& s, const CMat& basis_plus, const CMat& basis_minus) const;

 private:
  const SystemModel& model_;
  const ShockProfile& profile_;
  Formulation formulation_;
  EvansOptions opts_;
};

/// D_bf: sharp form at rho = r(lambda, xi).
EvansSample evaluate_bf(const SystemModel& model, const ShockProfile& p, const Frequency& freq,
                        const EvansOptions& opts = {});
/// D_mbf: sharp form at rho = r2(lambda, xi) = |xi| + lambda.
EvansSample evaluate_mbf(const SystemModel& model, const ShockProfile& p, const Frequency& freq,
                         const EvansOptions& opts = {});

/// Closed frequency path t in [0, 1] -> (lambda(t), xi).
struct Contour {
  std::string shape;
  std::function<Frequency(double)> at;
};

Contour circle(cplx center, double radius, std::vector<double> xi = {});
/// Boundary of {|lambda - offset| < radius, Re lambda > offset}, counterclockwise.
Contour semicircle(double radius, double re_offset, std::vector<double> xi = {});
Contour rectangle(cplx lower_left, cplx upper_right, std::vector<double> xi = {});

struct WindingOptions {
  int initial_samples = 64;
  int max_depth = 14;
  double max_increment = 1.5707963267948966;  // pi / 2
  int jobs = 1;
  KatoOptions kato;
};

struct ContourResult {
  std::vector<double> params;
  std::vector<Frequency> contour;
  std::vector<EvansSample> samples;  // samples.back() closes the loop at t = 1
  int winding = 0;
  double phase_sum = 0.0;            // total increment / (2 pi)
  int refinement_depth = 0;
};

ContourResult winding(const EvansEngine& engine, const Contour& contour, const WindingOptions& opts = {});

/// Winding of t -> D(t) from a dense fixed sampling (no refinement).
double phase_sum(const std::vector<cplx>& values, bool closed = true);

/// Columns: Re lambda, Im lambda, xi..., Re value, Im value, log_scale, conditioning.
void write_samples(std::ostream& os, const std::vector<EvansSample>& samples);

}  // namespace evanskit

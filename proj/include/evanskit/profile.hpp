#pragma once

#include <iosfwd>
#include <vector>

#include "evanskit/model.hpp"

namespace evanskit {

struct ProfileOptions {
  double L = 0.0;        // half-width; 0 picks it from the end-state decay rates
  int nodes = 1601;      // rounded up to odd
  double tol = 1e-9;     // nodal residual tolerance
  double tail_tol = 1e-8;
  double phase_shift = 0.0;  // location of the phase condition (grid is shifted with it)
  double grading = 2.0;      // sinh clustering toward the phase point
};

/// Ū sampled on a graded grid with Ū' and Ū''; piecewise cubic Hermite in between.
class ShockProfile {
 public:
  ShockProfile() = default;
  ShockProfile(std::vector<double> grid, Mat values, Mat derivative, Mat second,
               Vec u_minus, Vec u_plus);

  const std::vector<double>& grid() const { return grid_; }
  const Mat& values() const { return values_; }          // n x nodes
  const Mat& derivative() const { return derivative_; }  // n x nodes
  const Mat& second_derivative() const { return second_; }
  const Vec& u_minus() const { return u_minus_; }
  const Vec& u_plus() const { return u_plus_; }
  int n() const { return static_cast<int>(values_.rows()); }
  int size() const { return static_cast<int>(grid_.size()); }
  double x_min() const { return grid_.front(); }
  double x_max() const { return grid_.back(); }
  double L() const { return 0.5 * (grid_.back() - grid_.front()); }
  double center() const { return 0.5 * (grid_.back() + grid_.front()); }

  double nu_minus = 0.0;
  double nu_plus = 0.0;

  /// Ū(x) and Ū'(x); clamped to (U±, 0) outside the grid.
  void at(double x, Vec& u, Vec& du) const;

 private:
  std::vector<double> grid_;
  Mat values_, derivative_, second_;
  Vec u_minus_, u_plus_;
};

ShockProfile solve_profile(const SystemModel& model, const Vec& u_minus, const Vec& u_plus,
                           const ProfileOptions& opts = {});

/// max over nodes of |B11(Ū)Ū' - (f~1(Ū) - f~1(U-))|.
double profile_residual(const SystemModel& model, const ShockProfile& p);

/// max over nodes of |f~1_1(Ū) - f~1_1(U-)|; 0 when r = 0.
double algebraic_residual(const SystemModel& model, const ShockProfile& p);

/// max of the traveling-wave residual of the interpolant at interval quarter
/// points, where the collocation does not force it to vanish. Measures the
/// discretization error of the stored profile.
double interpolation_defect(const SystemModel& model, const ShockProfile& p);

struct DecayFit {
  double nu_minus = 0.0;
  double nu_plus = 0.0;
  bool reliable = true;
};

/// Least-squares slope of log|Ū - U±| over the outer tail windows.
DecayFit fit_decay_rates(const ShockProfile& p);

/// Columns: x, Ū components, Ū' components.
void write_profile(std::ostream& os, const ShockProfile& p);

/// Decay rates of the reduced profile ODE linearized at the end states
/// (smallest |Re| of the relevant eigenvalues), and its dimension counts.
struct EndStateRates {
  double nu_minus = 0.0;
  double nu_plus = 0.0;
  int unstable_minus = 0;
  int stable_plus = 0;
};
EndStateRates end_state_rates(const SystemModel& model, const Vec& u_minus, const Vec& u_plus);

}  // namespace evanskit

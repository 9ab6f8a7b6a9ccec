#include "evanskit/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "evanskit/errors.hpp"

namespace evanskit {

double Frequency::xi_norm() const {
  double s = 0.0;
  for (double x : xi) s += x * x;
  return std::sqrt(s);
}

double Frequency::r() const {
  const double xn = xi_norm();
  return std::sqrt(std::norm(lambda) + xn * xn);
}

Frequency Frequency::angle() const {
  const double rr = r();
  if (!(rr > 0.0)) throw Error(ErrorKind::angle_required, "the angle of (lambda, xi) = 0 is undefined");
  return scaled(rr);
}

Frequency Frequency::scaled(double rho) const {
  Frequency out;
  out.lambda = lambda / rho;
  for (double x : xi) out.xi.push_back(x / rho);
  return out;
}

SharpFrequency sharpen(const Frequency& freq, Scale scale) {
  SharpFrequency s;
  switch (scale) {
    case Scale::unit: s.rho = 1.0; break;
    case Scale::r: s.rho = freq.r(); break;
    case Scale::r2: s.rho = freq.r2(); break;
  }
  if (s.rho == 0.0) throw Error(ErrorKind::angle_required, "frequency scale is zero; an angle is required");
  s.lambda = freq.lambda / s.rho;
  for (double x : freq.xi) s.xi.push_back(x / s.rho);
  return s;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::integrated_1d: return "integrated_1d";
    case Variant::flux_1d: return "flux_1d";
    case Variant::balanced_flux_1d: return "balanced_flux_1d";
    case Variant::flux_md: return "flux_md";
    case Variant::sharp_md: return "sharp_md";
    case Variant::integrated_b21: return "integrated_b21";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view name) {
  for (Variant v : {Variant::integrated_1d, Variant::flux_1d, Variant::balanced_flux_1d, Variant::flux_md,
                    Variant::sharp_md, Variant::integrated_b21}) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorKind::config, "unknown formulation variant '" + std::string(name) + "'");
}

LinearizedCoeffs linearized_coeffs(const SystemModel& model, const Vec& u, const Vec& du) {
  LinearizedCoeffs c;
  const int d = model.d;
  c.a0 = model.jacobian(0, u);
  c.a.assign(d + 1, Mat());
  c.a_tilde.assign(d + 1, Mat());
  c.a[1] = model.reduced_jacobian(u) - model.viscosity_linearization(1, u, du);
  for (int j = 2; j <= d; ++j) {
    c.a[j] = model.jacobian(j, u) - model.viscosity_linearization(j, u, du);
    c.a_tilde[j] = c.a[j] + model.viscosity_derivative(j, 1, u, du);
  }
  c.b.assign(d + 1, std::vector<Mat>(d + 1));
  for (int j = 1; j <= d; ++j)
    for (int k = 1; k <= d; ++k) c.b[j][k] = model.viscosity(j, k, u);
  return c;
}

LinearizedCoeffs linearized_coeffs(const SystemModel& model, const ShockProfile& p, double x1) {
  Vec u, du;
  p.at(x1, u, du);
  return linearized_coeffs(model, u, du);
}

namespace {

// Coefficient multiplying a tabulated term. Sharp quantities carry the
// scale rho separately so that rho = 0 is representable.
enum class Coef { one, lambda, ixi, xixi, lambda_s, ixi_s, xixi_s, rho };

struct TermKind {
  Coef coef;
  int j = 0;
  int k = 0;
};

cplx xi_at(const SharpFrequency& s, int j) {
  const std::size_t idx = static_cast<std::size_t>(j - 2);
  return idx < s.xi.size() ? s.xi[idx] : cplx(0.0);
}

cplx coefficient(const TermKind& t, const SharpFrequency& s) {
  switch (t.coef) {
    case Coef::one: return 1.0;
    case Coef::lambda: return s.rho * s.lambda;
    case Coef::ixi: return I_unit * s.rho * xi_at(s, t.j);
    case Coef::xixi: return s.rho * s.rho * xi_at(s, t.j) * xi_at(s, t.k);
    case Coef::lambda_s: return s.lambda;
    case Coef::ixi_s: return I_unit * xi_at(s, t.j);
    case Coef::xixi_s: return s.rho * xi_at(s, t.j) * xi_at(s, t.k);
    case Coef::rho: return s.rho;
  }
  return 0.0;
}

Mat invert(const Mat& m, ErrorKind kind, const char* what) {
  if (m.rows() == 0) return m;
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) throw Error(kind, what);
  return lu.inverse();
}

// Frequency-independent pieces of one variant at one state.
class Assembler {
 public:
  Assembler(const SystemModel& model, Variant variant) : model_(model), variant_(variant) {
    const int d = model.d;
    switch (variant) {
      case Variant::integrated_1d:
      case Variant::flux_1d:
      case Variant::integrated_b21:
        kinds_ = {{Coef::one}, {Coef::lambda}};
        break;
      case Variant::balanced_flux_1d:
      case Variant::flux_md:
      case Variant::sharp_md:
        kinds_ = {{Coef::one}, {Coef::lambda}, {Coef::lambda_s}, {Coef::rho}};
        for (int j = 2; j <= d; ++j) {
          kinds_.push_back({Coef::ixi, j});
          kinds_.push_back({Coef::ixi_s, j});
          for (int k = 2; k <= d; ++k) kinds_.push_back({Coef::xixi_s, j, k});
        }
        break;
    }
  }

  const std::vector<TermKind>& kinds() const { return kinds_; }
  int size() const { return model_.system_size(); }

  std::vector<Mat> terms(const Vec& u, const Vec& du, double where) const {
    switch (variant_) {
      case Variant::integrated_1d: return integrated(u, du, where, false);
      case Variant::flux_1d: return integrated(u, du, where, true);
      case Variant::integrated_b21: return integrated_b21(u, du, where);
      default: return sharp(u, du, where);
    }
  }

 private:
  [[noreturn]] void h1_failure(double where) const {
    std::ostringstream msg;
    msg << "A-bar^1_11 is singular near x1 = " << where;
    throw Error(ErrorKind::h1_violation, msg.str());
  }

  Mat inverse_a11(const Mat& a1, double where) const {
    const int r = model_.r;
    if (r == 0) return Mat(0, 0);
    Eigen::FullPivLU<Mat> lu(a1.topLeftCorner(r, r));
    if (!lu.isInvertible() || lu.rcond() < 1e-14) h1_failure(where);
    return lu.inverse();
  }

  // Integrated (flux = false) or flux (flux = true) form in one dimension.
  std::vector<Mat> integrated(const Vec& u, const Vec& du, double where, bool flux) const {
    const Partition pt = model_.partition();
    const int r = pt.r, m = pt.m(), n = pt.n, N = size();
    const LinearizedCoeffs c = linearized_coeffs(model_, u, du);
    const Mat& a0 = c.a0;
    const Mat& a1 = c.a[1];
    const Mat a = inverse_a11(a1, where);
    const Mat binv = invert(pt.b22(c.b[1][1]), ErrorKind::degenerate_viscosity, "b^11 is singular");
    Mat one = Mat::Zero(N, N), lam = Mat::Zero(N, N);
    // column blocks: [0, r) w1 or f1, [r, n) w2 or f2, [n, N) u2
    const Mat col3_top = pt.b12(a0) - pt.b11(a0) * a * pt.b12(a1);
    const Mat col3_mid = pt.b22(a0) - pt.b21(a0) * a * pt.b12(a1);
    lam.block(0, 0, r, r) = -pt.b11(a0) * a;
    lam.block(r, 0, m, r) = -pt.b21(a0) * a;
    Mat& rows12_col3 = flux ? lam : one;
    rows12_col3.block(0, n, r, m) = col3_top;
    rows12_col3.block(r, n, m, m) = col3_mid;
    Mat& row3_cols12 = flux ? one : lam;
    row3_cols12.block(n, 0, m, r) = -binv * pt.b21(a1) * a;
    row3_cols12.block(n, r, m, m) = binv;
    one.block(n, n, m, m) = binv * (pt.b22(a1) - pt.b21(a1) * a * pt.b12(a1));
    return {one, lam};
  }

  std::vector<Mat> integrated_b21(const Vec& u, const Vec& du, double where) const {
    const Partition pt = model_.partition();
    const int r = pt.r, m = pt.m(), n = pt.n, N = size();
    const LinearizedCoeffs c = linearized_coeffs(model_, u, du);
    const Mat& a0 = c.a0;
    const Mat& a1 = c.a[1];
    const Mat& b = c.b[1][1];
    const Mat b22i = invert(pt.b22(b), ErrorKind::degenerate_viscosity, "b22 is singular");
    const Mat k = b22i * pt.b21(b);
    const Mat db = model_.viscosity_derivative(1, 1, u, du);  // (B^11(U-bar))'
    const Mat kp = -b22i * pt.b22(db) * b22i * pt.b21(b) + b22i * pt.b21(db);
    const Mat cal_b = pt.b11(a1) - pt.b12(a1) * k;
    Mat bi;
    if (r > 0) {
      Eigen::FullPivLU<Mat> lu(cal_b);
      if (!lu.isInvertible() || lu.rcond() < 1e-14) h1_failure(where);
      bi = lu.inverse();
    } else {
      bi = Mat(0, 0);
    }
    // M1 = -lambda Bi, N1 = lambda K Bi (lambda factored out below)
    const Mat m1 = -bi, n1 = k * bi;
    const Mat m3 = -bi * pt.b12(a1);
    const Mat n3 = Mat::Identity(m, m) + k * bi * pt.b12(a1);
    Mat one = Mat::Zero(N, N), lam = Mat::Zero(N, N);
    lam.block(0, 0, r, r) = pt.b11(a0) * m1 + pt.b12(a0) * n1;
    lam.block(r, 0, m, r) = pt.b21(a0) * m1 + pt.b22(a0) * n1;
    one.block(0, n, r, m) = pt.b11(a0) * m3 + pt.b12(a0) * n3;
    one.block(r, n, m, m) = pt.b21(a0) * m3 + pt.b22(a0) * n3;
    const Mat b22 = pt.b22(b);
    lam.block(n, 0, m, r) =
        b22i * (-pt.b21(a1) * bi - b22 * kp * bi + pt.b22(a1) * k * bi);
    lam.block(n, r, m, m) = b22i;
    one.block(n, n, m, m) = b22i * (-pt.b21(a1) * bi * pt.b12(a1) - b22 * kp * bi * pt.b12(a1) +
                                    pt.b22(a1) + pt.b22(a1) * k * bi * pt.b12(a1));
    return {one, lam};
  }

  // A#(rho; lambda#, xi#): the multi-D flux form with f# = f / rho.
  std::vector<Mat> sharp(const Vec& u, const Vec& du, double where) const {
    const Partition pt = model_.partition();
    const int r = pt.r, m = pt.m(), n = pt.n, N = size();
    const LinearizedCoeffs c = linearized_coeffs(model_, u, du);
    const Mat& a0 = c.a0;
    const Mat& a1 = c.a[1];
    const Mat a = inverse_a11(a1, where);
    const Mat binv = invert(pt.b22(c.b[1][1]), ErrorKind::degenerate_viscosity, "b^11 is singular");
    std::vector<Mat> out;
    out.reserve(kinds_.size());
    // G -> rows 1-2, column 1 : -G_k1 a ; column 3 : G_k2 - G_k1 a A1_12
    auto col1 = [&](const Mat& g) {
      Mat t = Mat::Zero(N, N);
      t.block(0, 0, r, r) = -pt.b11(g) * a;
      t.block(r, 0, m, r) = -pt.b21(g) * a;
      return t;
    };
    auto col3 = [&](const Mat& g) {
      Mat t = Mat::Zero(N, N);
      t.block(0, n, r, m) = pt.b12(g) - pt.b11(g) * a * pt.b12(a1);
      t.block(r, n, m, m) = pt.b22(g) - pt.b21(g) * a * pt.b12(a1);
      return t;
    };
    for (const TermKind& kind : kinds_) {
      Mat t = Mat::Zero(N, N);
      switch (kind.coef) {
        case Coef::one:
          t.block(n, n, m, m) = binv * (pt.b22(a1) - pt.b21(a1) * a * pt.b12(a1));
          break;
        case Coef::lambda: t = col1(a0); break;
        case Coef::lambda_s: t = col3(a0); break;
        case Coef::rho:
          t.block(n, 0, m, r) = -binv * pt.b21(a1) * a;
          t.block(n, r, m, m) = binv;
          break;
        case Coef::ixi: {
          t = col1(c.a_tilde[kind.j]);
          const Mat bj = c.b[kind.j][1] + c.b[1][kind.j];
          t.block(n, n, m, m) = -binv * pt.b22(bj);
          break;
        }
        case Coef::ixi_s: t = col3(c.a_tilde[kind.j]); break;
        case Coef::xixi_s: t.block(r, n, m, m) = pt.b22(c.b[kind.j][kind.k]); break;
        case Coef::xixi: break;
      }
      out.push_back(std::move(t));
    }
    return out;
  }

  const SystemModel& model_;
  Variant variant_;
  std::vector<TermKind> kinds_;
};

}  // namespace

class FieldTable {
 public:
  FieldTable(const SystemModel& model, const ShockProfile& profile, Variant variant)
      : model_(model), profile_(profile), variant_(variant), assembler_(model, variant) {
    const auto& g = profile.grid();
    xs_.reserve(2 * g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      xs_.push_back(g[i]);
      if (i + 1 < g.size()) xs_.push_back(0.5 * (g[i] + g[i + 1]));
    }
    terms_.resize(xs_.size());
    Vec u, du;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (i % 2 == 0) {
        u = profile.values().col(i / 2);
        du = profile.derivative().col(i / 2);
      } else {
        profile.at(xs_[i], u, du);
      }
      terms_[i] = assembler_.terms(u, du, xs_[i]);
    }
    const Vec zero = Vec::Zero(model.n);
    plus_ = assembler_.terms(profile.u_plus(), zero, profile.x_max());
    minus_ = assembler_.terms(profile.u_minus(), zero, profile.x_min());
  }

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<TermKind>& kinds() const { return assembler_.kinds(); }
  int size() const { return assembler_.size(); }
  Variant variant() const { return variant_; }

  CMat combine(const std::vector<Mat>& terms, const std::vector<cplx>& coef) const {
    CMat out = CMat::Zero(size(), size());
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (coef[k] != 0.0) out += coef[k] * terms[k].cast<cplx>();
    }
    return out;
  }
  const std::vector<Mat>& terms_at(std::size_t i) const { return terms_[i]; }
  const std::vector<Mat>& plus() const { return plus_; }
  const std::vector<Mat>& minus() const { return minus_; }

  std::vector<Mat> terms_exact(double x) const {
    Vec u, du;
    profile_.at(x, u, du);
    return assembler_.terms(u, du, x);
  }

 private:
  const SystemModel& model_;
  const ShockProfile& profile_;
  Variant variant_;
  Assembler assembler_;
  std::vector<double> xs_;
  std::vector<std::vector<Mat>> terms_;
  std::vector<Mat> plus_, minus_;
};

namespace {

std::vector<cplx> coefficients(const std::vector<TermKind>& kinds, const SharpFrequency& s) {
  std::vector<cplx> out;
  out.reserve(kinds.size());
  for (const TermKind& k : kinds) out.push_back(coefficient(k, s));
  return out;
}

}  // namespace

Formulation::Formulation(const SystemModel& model, const ShockProfile& profile, Variant variant)
    : Formulation(model, profile, variant, Scale::r) {}

Formulation::Formulation(const SystemModel& model, const ShockProfile& profile, Variant variant, Scale scale)
    : variant_(variant), scale_(scale) {
  if (variant == Variant::integrated_b21 && model.d != 1) {
    throw Error(ErrorKind::invalid_argument, "integrated_b21 is defined in one space dimension only");
  }
  table_ = std::make_shared<FieldTable>(model, profile, variant);
}

int Formulation::size() const { return table_->size(); }

// The 1D forms and flux_md are polynomial in (lambda, xi): they are encoded
// with rho = 1 and (lambda#, xi#) = (lambda, xi).
SharpFrequency Formulation::scales_for(const Frequency& freq) const {
  SharpFrequency s;
  switch (variant_) {
    case Variant::integrated_1d:
    case Variant::flux_1d:
    case Variant::integrated_b21:
    case Variant::flux_md:
      s.rho = 1.0;
      s.lambda = freq.lambda;
      for (double x : freq.xi) s.xi.push_back(x);
      return s;
    case Variant::balanced_flux_1d:
      if (freq.lambda == 0.0) {
        throw Error(ErrorKind::scaling_undefined, "balanced flux scaling f/lambda needs lambda != 0");
      }
      s.rho = freq.lambda;
      s.lambda = 1.0;
      s.xi.assign(freq.xi.size(), 0.0);
      return s;
    case Variant::sharp_md:
      return sharpen(freq, scale_);
  }
  return s;
}

CoefficientField Formulation::assemble(const SharpFrequency& s, const Frequency& freq) const {
  CoefficientField f;
  f.variant_ = variant_;
  f.n_ = table_->size();
  f.table_ = table_;
  f.freq_ = freq;
  f.rho_ = s.rho;
  f.coef_ = coefficients(table_->kinds(), s);
  const auto& xs = table_->xs();
  f.values_.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) f.values_[i] = table_->combine(table_->terms_at(i), f.coef_);
  f.plus_ = table_->combine(table_->plus(), f.coef_);
  f.minus_ = table_->combine(table_->minus(), f.coef_);
  return f;
}

CoefficientField Formulation::field(const Frequency& freq) const { return assemble(scales_for(freq), freq); }

CoefficientField Formulation::field(const SharpFrequency& sharp) const {
  if (variant_ != Variant::sharp_md) {
    throw Error(ErrorKind::invalid_argument, "explicit sharp scaling applies to sharp_md only");
  }
  Frequency freq;
  freq.lambda = sharp.rho * sharp.lambda;
  for (const cplx& x : sharp.xi) freq.xi.push_back((sharp.rho * x).real());
  return assemble(sharp, freq);
}

std::pair<CMat, CMat> Formulation::limits(const Frequency& freq) const {
  return limits(scales_for(freq));
}

std::pair<CMat, CMat> Formulation::limits(const SharpFrequency& sharp) const {
  const std::vector<cplx> coef = coefficients(table_->kinds(), sharp);
  return {table_->combine(table_->plus(), coef), table_->combine(table_->minus(), coef)};
}

double CoefficientField::x_min() const { return table_->xs().front(); }
double CoefficientField::x_max() const { return table_->xs().back(); }

void CoefficientField::eval_into(double x, CMat& out) const {
  const auto& xs = table_->xs();
  const long np = static_cast<long>(xs.size());
  if (x <= xs.front()) {
    out = values_.front();
    return;
  }
  if (x >= xs.back()) {
    out = values_.back();
    return;
  }
  const long i = std::distance(xs.begin(), std::upper_bound(xs.begin(), xs.end(), x)) - 1;
  // cubic Lagrange through four neighbours
  long lo = std::clamp(i - 1, 0L, np - 4);
  double w[4];
  for (int a = 0; a < 4; ++a) {
    double v = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) v *= (x - xs[lo + b]) / (xs[lo + a] - xs[lo + b]);
    }
    w[a] = v;
  }
  out = w[0] * values_[lo];
  for (int a = 1; a < 4; ++a) out += w[a] * values_[lo + a];
}

CMat CoefficientField::eval(double x) const {
  CMat out;
  eval_into(x, out);
  return out;
}

CMat CoefficientField::eval_exact(double x) const {
  return table_->combine(table_->terms_exact(x), coef_);
}

CoefficientField build_integrated_1d(const SystemModel& model, const ShockProfile& p, cplx lambda) {
  return Formulation(model, p, Variant::integrated_1d).field(Frequency(lambda));
}

CoefficientField build_flux_1d(const SystemModel& model, const ShockProfile& p, cplx lambda) {
  return Formulation(model, p, Variant::flux_1d).field(Frequency(lambda));
}

CoefficientField build_balanced_flux_1d(const SystemModel& model, const ShockProfile& p, cplx lambda) {
  return Formulation(model, p, Variant::balanced_flux_1d).field(Frequency(lambda));
}

CoefficientField build_flux_md(const SystemModel& model, const ShockProfile& p, const Frequency& freq) {
  return Formulation(model, p, Variant::flux_md).field(freq);
}

CoefficientField build_sharp_md(const SystemModel& model, const ShockProfile& p, cplx rho,
                                const Frequency& sharp) {
  SharpFrequency s;
  s.rho = rho;
  s.lambda = sharp.lambda;
  for (double x : sharp.xi) s.xi.push_back(x);
  return build_sharp_md(model, p, s);
}

CoefficientField build_sharp_md(const SystemModel& model, const ShockProfile& p, const SharpFrequency& sharp) {
  return Formulation(model, p, Variant::sharp_md).field(sharp);
}

CoefficientField build_integrated_b21(const SystemModel& model, const ShockProfile& p, cplx lambda) {
  return Formulation(model, p, Variant::integrated_b21).field(Frequency(lambda));
}

void dump_matrix(std::ostream& os, const SystemModel& model, const CoefficientField& f, double x1) {
  const CMat a = f.eval_exact(x1);
  const int r = model.r, n = model.n;
  auto sep = [&](int idx) { return idx == r || idx == n; };
  os << "# " << to_string(f.variant()) << " x1=" << x1 << " lambda=" << f.freq().lambda << "\n";
  os << std::setprecision(10);
  for (int i = 0; i < a.rows(); ++i) {
    if (i > 0 && sep(i)) {
      for (int j = 0; j < a.cols(); ++j) os << "------------------------------";
      os << "\n";
    }
    for (int j = 0; j < a.cols(); ++j) {
      if (j > 0 && sep(j)) os << " |";
      os << ' ' << std::setw(13) << a(i, j).real() << (a(i, j).imag() < 0 ? "-" : "+") << std::setw(12)
         << std::abs(a(i, j).imag()) << "i";
    }
    os << "\n";
  }
}

}  // namespace evanskit

#include "ostrovsky/functionals.hpp"

#include <cmath>
#include <sstream>

namespace ostrovsky {

namespace {

// |u|^q with fast paths for the small integer exponents that dominate use
inline double abs_pow(double a, double q) {
  if (q == 1.0) return a;
  if (q == 2.0) return a * a;
  if (q == 3.0) return a * a * a;
  if (q == 4.0) return (a * a) * (a * a);
  if (a == 0.0) return 0.0;
  return std::pow(a, q);
}

bool is_integer(double p) { return std::floor(p) == p; }

Spectrum galerkin_nonlinear(const Spectrum& c, const Model& m, const Oversampler& os) {
  std::vector<double> u = os.up(c);
  for (double& v : u) v = m.N(v);
  return os.down(u);
}

int resolve_R(const Model& m, int R) { return R > 0 ? R : default_oversampling(m); }

}  // namespace

const char* to_string(Family f) { return f == Family::AbsPower ? "abs" : "signed"; }

Family family_from_string(const std::string& s) {
  if (s == "abs" || s == "AbsPower") return Family::AbsPower;
  if (s == "signed" || s == "SignedPower") return Family::SignedPower;
  fail(ErrorCode::Usage, "unknown family '" + s + "' (expected abs or signed)");
}

double Model::N(double u) const {
  double a = std::abs(u);
  if (family == Family::AbsPower) return abs_pow(a, p);
  return abs_pow(a, p - 1.0) * u;
}

double Model::F(double u) const {
  double a = std::abs(u);
  if (family == Family::AbsPower) return abs_pow(a, p) * u;
  return abs_pow(a, p + 1.0);
}

double Model::V(double u) const {
  double a = std::abs(u);
  if (family == Family::AbsPower) {
    if (u == 0.0) return 0.0;
    return p * abs_pow(a, p - 1.0) * (u > 0.0 ? 1.0 : -1.0);
  }
  return p * abs_pow(a, p - 1.0);
}

bool Model::polynomial() const {
  if (!is_integer(p)) return false;
  int ip = static_cast<int>(p);
  // |u|^p = u^p for even p;  |u|^{p-1}u = u^p for odd p
  return family == Family::AbsPower ? ip % 2 == 0 : ip % 2 == 1;
}

Model make_model(Family family, double p) {
  Model m{family, p};
  if (!(p > m.p_min() && p < m.p_max())) {
    std::ostringstream os;
    os << "exponent p=" << p << " outside the admissible range " << m.p_min() << " < p < "
       << m.p_max() << " for the " << to_string(family) << " family";
    fail(ErrorCode::InvalidExponent, os.str());
  }
  return m;
}

int default_oversampling(const Model& m) {
  if (m.polynomial()) {
    // F has degree p+1; the fine grid must exceed (p+1)/2 times the coarse one
    int R = 1;
    while (R <= (m.p + 1.0) / 2.0) R *= 2;
    return R;
  }
  if (m.p < 2.0) return 128;
  if (m.p < 3.0) return 64;
  return 8;
}

Oversampler::Oversampler(int n, int R) : n_(n), R_(R) {
  if (R < 1 || (R & (R - 1)) != 0) fail(ErrorCode::Usage, "oversampling must be a power of two");
}

std::vector<double> Oversampler::up(const Spectrum& c) const {
  const int h = n_ / 2;
  if (R_ == 1) return irfft(c, n_);
  const int nf = n_ * R_;
  Spectrum g(nf / 2 + 1, 0.0);
  for (int k = 0; k < h; ++k) g[k] = double(R_) * c[k];
  g[0] = g[0].real();
  g[h] = 0.5 * R_ * c[h].real();
  return irfft(g, nf);
}

Spectrum Oversampler::down(const std::vector<double>& fine) const {
  const int h = n_ / 2;
  Spectrum g = rfft(fine);
  Spectrum c(h + 1);
  const double s = 1.0 / R_;
  for (int k = 0; k <= h; ++k) c[k] = g[k] * s;
  c[h] = c[h].real();
  return c;
}

EnergyParts energy_parts_second_order(const Field& u, const Model& model, int R) {
  if (!has_zero_mean(u)) fail(ErrorCode::NonZeroMean, "energy needs a mean-free field");
  R = resolve_R(model, R);
  const Grid& g = u.grid;
  const int n = g.n;
  Spectrum c = rfft(u.values);
  double q = 0.0;
  for (int k = 1; k <= n / 2; ++k) {
    double xi = g.xi(k);
    double w = k == n / 2 ? 1.0 : 2.0;
    q += w * (xi * xi + 1.0 / (xi * xi)) * std::norm(c[k]);
  }
  EnergyParts e;
  e.quadratic = 0.5 * q * g.spacing / n;
  Oversampler os(n, R);
  std::vector<double> fine = os.up(c);
  double s = 0.0;
  for (double v : fine) s += model.F(v);
  e.nonlinear = s * g.spacing / R / (model.p + 1.0);
  return e;
}

double energy_second_order(const Field& u, const Model& model, int R) {
  return energy_parts_second_order(u, model, R).total();
}

double energy_fourth_order(const Field& v, const Model& model, int R) {
  R = resolve_R(model, R);
  const Grid& g = v.grid;
  const int n = g.n;
  Spectrum c = rfft(v.values);
  double q = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    double xi = g.xi(k);
    double w = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    q += w * (xi * xi * xi * xi + 1.0) * std::norm(c[k]);
  }
  Field dv = deriv(v, 1);
  Oversampler os(n, R);
  std::vector<double> fine = os.up(rfft(dv.values));
  double s = 0.0;
  for (double x : fine) s += model.F(x);
  return 0.5 * q * g.spacing / n - s * g.spacing / R / (model.p + 1.0);
}

Field nonlinear_term(const Field& u, const Model& model, int R) {
  R = resolve_R(model, R);
  Oversampler os(u.grid.n, R);
  Spectrum c = galerkin_nonlinear(rfft(u.values), model, os);
  c[0] = 0.0;
  return Field{u.grid, irfft(c, u.grid.n), true};
}

double integral_F(const Field& u, const Model& model, int R) {
  R = resolve_R(model, R);
  Oversampler os(u.grid.n, R);
  std::vector<double> fine = os.up(rfft(u.values));
  double s = 0.0;
  for (double v : fine) s += model.F(v);
  return s * u.grid.spacing / R;
}

Field gradient_second_order(const Field& u, const Model& model, int R) {
  if (!has_zero_mean(u)) fail(ErrorCode::NonZeroMean, "gradient needs a mean-free field");
  R = resolve_R(model, R);
  const Grid& g = u.grid;
  const int n = g.n;
  Oversampler os(n, R);
  Spectrum c = rfft(u.values);
  Spectrum nl = galerkin_nonlinear(c, model, os);
  Spectrum out(n / 2 + 1);
  out[0] = 0.0;
  for (int k = 1; k <= n / 2; ++k) {
    double xi = g.xi(k);
    out[k] = (xi * xi + 1.0 / (xi * xi)) * c[k] - nl[k];
  }
  return Field{g, irfft(out, n), true};
}

double omega_multiplier(const Field& u, double lambda, const Model& model, int R) {
  if (!has_zero_mean(u)) fail(ErrorCode::NonZeroMean, "multiplier needs a mean-free field");
  double mass = inner(u, u);
  if (!(std::abs(mass - lambda) <= 1e-8 * lambda)) {
    std::ostringstream os;
    os << "||u||^2 = " << mass << " differs from lambda = " << lambda;
    fail(ErrorCode::ConstraintViolated, os.str());
  }
  EnergyParts e = energy_parts_second_order(u, model, R);
  double intF = e.nonlinear * (model.p + 1.0);
  return (2.0 * e.quadratic - intF) / lambda;
}

Field el_residual_field(const WaveProfile& pr) {
  Field grad = gradient_second_order(pr.phi, pr.model, pr.oversampling);
  Field r = grad;
  for (int j = 0; j < r.grid.n; ++j) r.values[j] = pr.omega * pr.phi.values[j] - grad.values[j];
  return r;
}

double el_residual_second_order(const WaveProfile& pr) {
  double nphi = norm_l2(pr.phi);
  if (nphi == 0.0) return 0.0;
  return norm_l2(el_residual_field(pr)) / nphi;
}

double el_residual_fourth_order(const WaveProfile& pr) {
  if (!has_zero_mean(pr.phi)) fail(ErrorCode::NonZeroMean, "profile must be mean-free");
  Field vphi = deriv(pr.phi, -1);
  double nv = norm_l2(vphi);
  if (nv == 0.0) fail(ErrorCode::DegenerateProfile, "zero profile has no relative residual");
  Field lin = biquadratic_operator(vphi, pr.omega);
  // vphi' is phi itself: an odd derivative would drop the Nyquist cosine of phi
  Field dnl = deriv(nonlinear_term(pr.phi, pr.model, pr.oversampling), 1);
  return norm_l2(lin + dnl) / nv;
}

}  // namespace ostrovsky

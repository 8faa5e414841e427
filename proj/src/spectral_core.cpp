#include "ostrovsky/spectral_core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ostrovsky {

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> plans;

  // kind 0: r2c, kind 1: c2r
  fftw_plan get(int n, int kind) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, kind);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    double* r = fftw_alloc_real(n);
    fftw_complex* c = fftw_alloc_complex(n / 2 + 1);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = kind == 0 ? fftw_plan_dft_r2c_1d(n, r, c, flags)
                               : fftw_plan_dft_c2r_1d(n, c, r, flags);
    fftw_free(r);
    fftw_free(c);
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::vector<double> Grid::nodes() const {
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = x(j);
  return out;
}

double Grid::xi(int k) const { return std::numbers::pi * k / half_length; }

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = xi(j - n / 2);
  return out;
}

Grid make_grid(double half_length, int n) {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    fail(ErrorCode::NonPositiveLength, "half_length must be positive");
  if (!is_power_of_two(n) || n < 64)
    fail(ErrorCode::NonPowerOfTwo, "n must be a power of two >= 64, got " + std::to_string(n));
  Grid g;
  g.half_length = half_length;
  g.n = n;
  g.spacing = 2.0 * half_length / n;
  return g;
}

double Field::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return values.empty() ? 0.0 : s / values.size();
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

Field make_field(const Grid& grid, const std::function<double(double)>& f, bool mean_free) {
  Field out{grid, std::vector<double>(grid.n), mean_free};
  for (int j = 0; j < grid.n; ++j) out.values[j] = f(grid.x(j));
  return out;
}

Field zero_field(const Grid& grid) { return Field{grid, std::vector<double>(grid.n, 0.0), true}; }

Spectrum rfft(const double* f, int n) {
  Spectrum out(n / 2 + 1);
  fftw_plan plan = cache().get(n, 0);
  fftw_execute_dft_r2c(plan, const_cast<double*>(f), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Spectrum rfft(const std::vector<double>& f) { return rfft(f.data(), static_cast<int>(f.size())); }

void irfft(const Spectrum& c, int n, double* out) {
  Spectrum tmp(c.begin(), c.begin() + (n / 2 + 1));
  tmp[0] = tmp[0].real();
  tmp[n / 2] = tmp[n / 2].real();
  fftw_plan plan = cache().get(n, 1);
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(tmp.data()), out);
  const double s = 1.0 / n;
  for (int j = 0; j < n; ++j) out[j] *= s;
}

std::vector<double> irfft(const Spectrum& c, int n) {
  std::vector<double> out(n);
  irfft(c, n, out.data());
  return out;
}

bool has_zero_mean(const Field& f) {
  return std::abs(f.mean()) <= 1e-12 * std::max(f.max_abs(), 1e-300) || f.max_abs() == 0.0;
}

void require_same_grid(const Field& a, const Field& b) {
  if (a.grid != b.grid) fail(ErrorCode::GridMismatch, "fields live on different grids");
}

Field project_zero_mean(const Field& f) {
  Spectrum c = rfft(f.values);
  c[0] = 0.0;
  return Field{f.grid, irfft(c, f.grid.n), true};
}

Field deriv(const Field& f, int order) {
  if (order == 0) return f;
  if (order < 0 && !has_zero_mean(f))
    fail(ErrorCode::NonZeroMean, "antiderivative of a field with nonzero mean");
  const int n = f.grid.n;
  Spectrum c = rfft(f.values);
  c[0] = 0.0;
  for (int k = 1; k <= n / 2; ++k) {
    cplx m = std::pow(cplx(0.0, f.grid.xi(k)), order);
    c[k] *= m;
  }
  // odd orders of the Nyquist mode have no real representation
  if (order % 2 != 0) c[n / 2] = 0.0;
  return Field{f.grid, irfft(c, n), true};
}

Field apply_symbol(const Field& f, const std::function<double(double)>& symbol) {
  const int n = f.grid.n;
  Spectrum c = rfft(f.values);
  for (int k = 0; k <= n / 2; ++k) c[k] *= symbol(f.grid.xi(k));
  Field out{f.grid, irfft(c, n), false};
  out.mean_free = std::abs(c[0]) == 0.0;
  return out;
}

Field resolvent_biquadratic(const Field& f, double omega) {
  if (!(omega < 2.0)) fail(ErrorCode::OmegaOutOfRange, "resolvent needs omega < 2");
  return apply_symbol(f, [omega](double xi) {
    double x2 = xi * xi;
    return 1.0 / (x2 * x2 - omega * x2 + 1.0);
  });
}

Field biquadratic_operator(const Field& f, double omega) {
  return apply_symbol(f, [omega](double xi) {
    double x2 = xi * xi;
    return x2 * x2 - omega * x2 + 1.0;
  });
}

double decay_rate_kappa(double omega) {
  if (!(omega < 2.0)) fail(ErrorCode::OmegaOutOfRange, "decay rate needs omega < 2");
  if (omega >= -2.0) return std::sqrt(2.0 - omega) / 2.0;
  return std::sqrt((-omega - std::sqrt(omega * omega - 4.0)) / 2.0);
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  double s = 0.0;
  for (int j = 0; j < f.grid.n; ++j) s += f.values[j] * g.values[j];
  return s * f.grid.spacing;
}

double norm_l2(const Field& f) { return std::sqrt(inner(f, f)); }

double norm_sobolev(const Field& f, double s) {
  if (s < 0.0 && !has_zero_mean(f))
    fail(ErrorCode::NonZeroMean, "negative Sobolev norm of a field with nonzero mean");
  const int n = f.grid.n;
  Spectrum c = rfft(f.values);
  double acc = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    double xi = f.grid.xi(k);
    double w = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    double m;
    if (k == 0) m = s == 0.0 ? 1.0 : 0.0;
    else m = std::pow(xi, 2.0 * s);
    acc += w * m * std::norm(c[k]);
  }
  return std::sqrt(acc * f.grid.spacing / n);
}

Field translate(const Field& f, double s) {
  const int n = f.grid.n;
  Spectrum c = rfft(f.values);
  for (int k = 1; k <= n / 2; ++k) c[k] *= std::polar(1.0, -f.grid.xi(k) * s);
  c[n / 2] = c[n / 2].real();
  return Field{f.grid, irfft(c, n), f.mean_free};
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out = a;
  for (int j = 0; j < a.grid.n; ++j) out.values[j] += b.values[j];
  out.mean_free = a.mean_free && b.mean_free;
  return out;
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out = a;
  for (int j = 0; j < a.grid.n; ++j) out.values[j] -= b.values[j];
  out.mean_free = a.mean_free && b.mean_free;
  return out;
}

Field operator*(double a, const Field& f) {
  Field out = f;
  for (double& v : out.values) v *= a;
  return out;
}

}  // namespace ostrovsky

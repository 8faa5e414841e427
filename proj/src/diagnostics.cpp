#include "ostrovsky/diagnostics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ostrovsky/solver.hpp"

namespace ostrovsky {

namespace {

double rel(double lhs, double rhs) {
  double d = std::abs(lhs) + std::abs(rhs);
  return d > 0.0 ? std::abs(lhs - rhs) / d : 0.0;
}

PohozaevReport assemble(double A, double B, double C, double lambda, double omega, const Model& m) {
  PohozaevReport r;
  const double p = m.p;
  r.grad_sq = A;
  r.anti_sq = B;
  r.nonlinear = C;
  r.lambda = lambda;
  r.omega = omega;
  r.r1 = rel(A, B + (p - 1.0) / (2.0 * (p + 1.0)) * C);
  r.r2 = rel(omega * lambda, 2.0 * B - (p + 3.0) / (2.0 * (p + 1.0)) * C);
  if (m.family == Family::AbsPower) {
    r.alt_r1 = rel(A, B);
    r.alt_r2 = rel(omega * lambda, 2.0 * B);
    r.variant_note =
        "primary: nonlinearity |phi|^p; alt: d/dx(|phi|^p), whose moment against phi is zero";
  } else {
    r.variant_note = "nonlinearity |phi|^{p-1} phi";
  }
  return r;
}

void require_converged(const WaveProfile& pr) {
  if (pr.phi.max_abs() == 0.0) fail(ErrorCode::NotConverged, "zero profile");
  double res = el_residual_second_order(pr);
  if (!(res <= 1e-6)) {
    std::ostringstream os;
    os << "EL residual " << res << " exceeds 1e-6";
    fail(ErrorCode::NotConverged, os.str());
  }
}

// least-squares slope of y against x
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

PohozaevReport pohozaev_identities(const Field& phi, const Model& model, double omega, int R) {
  double A = std::pow(norm_sobolev(phi, 1.0), 2);
  double B = std::pow(norm_sobolev(phi, -1.0), 2);
  double C = integral_F(phi, model, R);
  return assemble(A, B, C, inner(phi, phi), omega, model);
}

PohozaevReport pohozaev_identities_fourth_order(const Field& phi, const Model& model, double omega,
                                                int R) {
  Field v = deriv(phi, -1);
  Field dv = deriv(v, 1);
  double A = std::pow(norm_l2(deriv(v, 2)), 2);
  double B = std::pow(norm_l2(v), 2);
  double C = integral_F(dv, model, R);
  return assemble(A, B, C, inner(dv, dv), omega, model);
}

PohozaevReport pohozaev_residuals(const WaveProfile& pr) {
  require_converged(pr);
  return pohozaev_identities(pr.phi, pr.model, pr.omega, pr.oversampling);
}

PohozaevReport pohozaev_fourth_order(const WaveProfile& pr) {
  require_converged(pr);
  if (!has_zero_mean(pr.phi)) fail(ErrorCode::NonZeroMean, "profile must be mean-free");
  return pohozaev_identities_fourth_order(pr.phi, pr.model, pr.omega, pr.oversampling);
}

DecayFit fit_decay(const Field& f, double kappa_ref, bool oscillatory) {
  if (!(kappa_ref > 0.0)) fail(ErrorCode::Usage, "reference decay rate must be positive");
  const Grid& g = f.grid;
  const int n = g.n;
  const double L = g.half_length;
  DecayFit fit;
  fit.kappa_ref = kappa_ref;
  fit.window_lo = 3.0 / kappa_ref;
  fit.window_hi = std::min(0.8 * L, 10.0 / kappa_ref);
  if (fit.window_hi - fit.window_lo < 1.0 / kappa_ref) {
    std::ostringstream os;
    os << "fit window [" << fit.window_lo << ", " << fit.window_hi << "] shorter than 1/kappa";
    fail(ErrorCode::WindowTooSmall, os.str());
  }
  const double peak = peak_location(f);
  const double amax = f.max_abs();
  const double floor = n * std::numeric_limits<double>::epsilon() * amax;

  auto at = [&](int j) { return std::abs(f.values[((j % n) + n) % n]); };
  auto tail = [&](int dir, int& count) {
    std::vector<double> xs, ys;
    const int j0 = static_cast<int>(std::lround((peak + L) / g.spacing));
    for (int m = 1; m < n / 2; ++m) {
      int j = j0 + dir * m;
      double dist = std::abs(g.x(0) + j * g.spacing - peak);
      if (dist < fit.window_lo) continue;
      if (dist > fit.window_hi) break;
      double a = at(j);
      if (oscillatory) {
        double am = at(j - 1), ap = at(j + 1);
        if (!(a >= am && a > ap)) continue;
        // parabolic refinement of the extremum of |f|
        double den = am - 2.0 * a + ap;
        double off = den != 0.0 ? 0.5 * (am - ap) / den : 0.0;
        off = std::clamp(off, -0.5, 0.5);
        a = a - 0.25 * (am - ap) * off;
        dist = std::abs(g.x(0) + (j + off) * g.spacing - peak);
      }
      if (a < 10.0 * floor) {
        std::ostringstream os;
        os << "tail amplitude " << a << " below 10x rounding floor " << floor;
        fail(ErrorCode::WindowTooNoisy, os.str());
      }
      xs.push_back(dist);
      ys.push_back(std::log(a));
    }
    count = static_cast<int>(xs.size());
    if (xs.size() < 3) fail(ErrorCode::WindowTooSmall, "fewer than 3 usable samples in the decay window");
    return -slope(xs, ys);
  };
  fit.kappa_right = tail(+1, fit.samples_right);
  fit.kappa_left = tail(-1, fit.samples_left);
  fit.kappa_fit = 0.5 * (fit.kappa_left + fit.kappa_right);
  fit.rel_dev_left = std::abs(fit.kappa_left - kappa_ref) / kappa_ref;
  fit.rel_dev_right = std::abs(fit.kappa_right - kappa_ref) / kappa_ref;
  fit.rel_dev = std::max(fit.rel_dev_left, fit.rel_dev_right);
  return fit;
}

DecayFit fit_decay(const WaveProfile& pr) {
  return fit_decay(pr.phi, decay_rate_kappa(pr.omega), pr.omega > -2.0);
}

SamplingResult sampling_check(const std::function<double(double)>& f,
                              const std::function<double(double)>& df, double eps, int N, double a,
                              double b) {
  if (N < 2) fail(ErrorCode::BadN, "N must be an integer >= 2");
  if (!(eps > 0.0)) fail(ErrorCode::BadEpsilon, "eps must be positive");
  if (!(b > a)) fail(ErrorCode::Usage, "empty integration domain");
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const double h = eps / N;
  const long c0 = static_cast<long>(std::floor(a / h));
  const long c1 = static_cast<long>(std::ceil(b / h));
  SamplingResult r;
  double total = 0.0, part = 0.0, var = 0.0;
  auto absdf = [&](double x) { return std::abs(df(x)); };
  for (long c = c0; c < c1; ++c) {
    double lo = std::max(a, c * h), hi = std::min(b, (c + 1) * h);
    if (!(hi > lo)) continue;
    double v = Gauss::integrate(f, lo, hi);
    total += v;
    var += Gauss::integrate(absdf, lo, hi);
    // cell c lies in [n eps, n eps + eps/N) exactly when c is a multiple of N
    if (((c % N) + N) % N == 0) part += v;
  }
  r.partial_sum = part;
  r.full_integral = total;
  r.lhs = std::abs(part - total / N);
  r.rhs_bound = h * var;
  r.pass = r.lhs <= r.rhs_bound * (1.0 + 1e-6);
  return r;
}

}  // namespace ostrovsky

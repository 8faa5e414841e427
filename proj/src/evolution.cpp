#include "ostrovsky/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace ostrovsky {

namespace {

double mass_of(const std::vector<double>& u, double dx) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return 0.5 * s * dx;
}

// correlation c(s) = <u(. + s), phi> as a trigonometric polynomial in s
struct Correlation {
  Grid g;
  Spectrum p;  // U_k conj(Phi_k)
  Correlation(const Field& u, const Field& phi) : g(u.grid) {
    Spectrum a = rfft(u.values), b = rfft(phi.values);
    p.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) p[k] = a[k] * std::conj(b[k]);
  }
  // {c, c', c''} at s
  std::array<double, 3> eval(double s) const {
    const int n = g.n;
    double v = p[0].real(), d1 = 0.0, d2 = 0.0;
    for (int k = 1; k <= n / 2; ++k) {
      double xi = g.xi(k);
      double w = k == n / 2 ? 1.0 : 2.0;
      cplx pk = k == n / 2 ? cplx(p[k].real(), 0.0) : p[k];
      cplx t = pk * std::polar(1.0, xi * s);
      v += w * t.real();
      d1 -= w * xi * t.imag();
      d2 -= w * xi * xi * t.real();
    }
    const double f = g.spacing / n;
    return {v * f, d1 * f, d2 * f};
  }
};

}  // namespace

double EvolutionTrace::mass_drift() const {
  double d = 0.0;
  for (double m : mass) d = std::max(d, std::abs(m - mass.front()) / mass.front());
  return d;
}

double EvolutionTrace::energy_drift() const {
  double d = 0.0;
  double e0 = std::abs(energy.front());
  for (double e : energy) d = std::max(d, std::abs(e - energy.front()) / e0);
  return d;
}

OrbitalDistance orbital_distance(const Field& u, const Field& phi) {
  require_same_grid(u, phi);
  Correlation corr(u, phi);
  const int n = u.grid.n;
  std::vector<double> c = irfft(corr.p, n);
  int jbest = static_cast<int>(std::max_element(c.begin(), c.end()) - c.begin());
  const double dx = u.grid.spacing;
  double s = (jbest <= n / 2 ? jbest : jbest - n) * dx;
  for (int it = 0; it < 30; ++it) {
    auto v = corr.eval(s);
    if (v[2] >= 0.0) break;
    double step = std::clamp(-v[1] / v[2], -dx, dx);
    s += step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(s))) break;
  }
  double cs = corr.eval(s)[0];
  double d2 = inner(u, u) + inner(phi, phi) - 2.0 * cs;
  return {std::sqrt(std::max(d2, 0.0)), s};
}

double traveling_wave_error(const Field& u, const WaveProfile& pr, double t) {
  Field moved = translate(pr.phi, pr.omega * t);
  return norm_l2(u - moved) / norm_l2(pr.phi);
}

Field smooth_noise(const Grid& grid, std::uint64_t seed, double xi_cut) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const int n = grid.n;
  Spectrum c(n / 2 + 1, 0.0);
  for (int k = 1; k < n / 2; ++k) {
    double xi = grid.xi(k);
    double a = nd(rng), b = nd(rng);
    c[k] = cplx(a, b) * std::exp(-0.5 * (xi / xi_cut) * (xi / xi_cut));
  }
  Field f{grid, irfft(c, n), true};
  return (1.0 / norm_l2(f)) * f;
}

EvolutionTrace integrate(const Field& u0, const Model& model, double T, double dt,
                         const WaveProfile* reference, const EvolutionOptions& opts) {
  if (!has_zero_mean(u0)) fail(ErrorCode::NonZeroMean, "initial data must be mean-free");
  if (!(T >= 0.0) || !(dt > 0.0)) fail(ErrorCode::Usage, "need T >= 0 and dt > 0");
  if (reference) require_same_grid(u0, reference->phi);
  const Grid& g = u0.grid;
  const int n = g.n;
  const int h = n / 2;
  int R = opts.oversampling;
  if (R <= 0) R = model.polynomial() ? default_oversampling(model) : std::min(default_oversampling(model), 8);
  Oversampler os(n, R);

  double vmax = 0.0;
  for (double v : u0.values) vmax = std::max(vmax, std::abs(model.V(v)));
  if (!opts.linear_only && dt * g.nyquist() * vmax >= 1.0) {
    std::ostringstream oss;
    oss << "dt * xi_max * max|V| = " << dt * g.nyquist() * vmax << " violates the bound < 1";
    fail(ErrorCode::Usage, oss.str());
  }

  // exact propagation of the dispersive symbol -i(xi^3 + 1/xi); the stage
  // weights are phi-functions of z = dt * symbol, averaged over a circle
  // around z so they stay accurate when |z| is small
  std::vector<cplx> E(h + 1, 0.0), E2(h + 1, 0.0), Q(h + 1, 0.0), f1(h + 1, 0.0), f2(h + 1, 0.0),
      f3(h + 1, 0.0), ik(h + 1, 0.0);
  constexpr int contour = 32;
  for (int k = 1; k < h; ++k) {
    double xi = g.xi(k);
    cplx z(0.0, -dt * (xi * xi * xi + 1.0 / xi));
    E[k] = std::exp(z);
    E2[k] = std::exp(0.5 * z);
    cplx q = 0.0, a = 0.0, b = 0.0, c = 0.0;
    for (int m = 0; m < contour; ++m) {
      cplx r = z + std::polar(1.0, 2.0 * M_PI * (m + 0.5) / contour);
      cplx er = std::exp(r), r3 = r * r * r;
      q += (std::exp(0.5 * r) - 1.0) / r;
      a += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
      b += (2.0 + r + er * (r - 2.0)) / r3;
      c += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
    }
    Q[k] = dt * q / double(contour);
    f1[k] = dt * a / double(contour);
    f2[k] = dt * b / double(contour);
    f3[k] = dt * c / double(contour);
  }
  for (int k = 1; k < h; ++k) ik[k] = cplx(0.0, g.xi(k));
  auto nonlinear = [&](const Spectrum& c) {
    Spectrum out(h + 1, 0.0);
    if (opts.linear_only) return out;
    std::vector<double> f = os.up(c);
    for (double& v : f) v = model.N(v);
    Spectrum nc = os.down(f);
    for (int k = 1; k < h; ++k) out[k] = ik[k] * nc[k];
    return out;
  };

  // the Nyquist mode has no real odd-derivative dynamics and is dropped
  Spectrum u = rfft(u0.values);
  u[0] = 0.0;
  u[h] = 0.0;

  EvolutionTrace tr;
  const double amp0 = u0.max_abs();
  const double phinorm = reference ? norm_l2(reference->phi) : 1.0;
  auto sample = [&](double t, const std::vector<double>& vals) {
    Field f{g, vals, true};
    tr.times.push_back(t);
    tr.mass.push_back(mass_of(vals, g.spacing));
    tr.energy.push_back(opts.linear_only ? energy_parts_second_order(f, model, R).quadratic
                                         : energy_second_order(f, model, R));
    if (reference) {
      tr.orbital_distance.push_back(orbital_distance(f, reference->phi).distance);
      tr.traveling_error.push_back(norm_l2(f - translate(reference->phi, reference->omega * t)) / phinorm);
    }
  };

  const long nsteps = static_cast<long>(std::llround(T / dt));
  const long every = std::max(1L, static_cast<long>(std::llround(opts.sample_interval / dt)));
  std::vector<double> vals = irfft(u, n);
  sample(0.0, vals);
  Spectrum a(h + 1), b(h + 1), c(h + 1);
  for (long s = 1; s <= nsteps; ++s) {
    Spectrum nu = nonlinear(u);
    for (int k = 0; k <= h; ++k) a[k] = E2[k] * u[k] + Q[k] * nu[k];
    Spectrum na = nonlinear(a);
    for (int k = 0; k <= h; ++k) b[k] = E2[k] * u[k] + Q[k] * na[k];
    Spectrum nb = nonlinear(b);
    for (int k = 0; k <= h; ++k) c[k] = E2[k] * a[k] + Q[k] * (2.0 * nb[k] - nu[k]);
    Spectrum nc = nonlinear(c);
    for (int k = 0; k <= h; ++k)
      u[k] = E[k] * u[k] + f1[k] * nu[k] + 2.0 * f2[k] * (na[k] + nb[k]) + f3[k] * nc[k];
    u[0] = 0.0;
    u[h] = 0.0;
    tr.steps = static_cast<int>(s);
    const double t = s * dt;
    if (s % every == 0 || s == nsteps) {
      irfft(u, n, vals.data());
      double amp = 0.0;
      bool finite = true;
      for (double v : vals) {
        amp = std::max(amp, std::abs(v));
        finite = finite && std::isfinite(v);
      }
      if (!finite || amp > opts.blowup_factor * amp0) {
        tr.blowup_time = t;
        break;
      }
      sample(t, vals);
    }
  }
  irfft(u, n, vals.data());
  tr.final_state = Field{g, vals, true};
  return tr;
}

PerturbationResult perturbation_experiment(const WaveProfile& pr, double delta, double T, double dt,
                                           std::uint64_t seed, const EvolutionOptions& opts) {
  if (!(delta >= 0.0 && delta <= 0.1)) {
    std::ostringstream os;
    os << "delta = " << delta << " outside (0, 0.1]";
    fail(ErrorCode::BadDelta, os.str());
  }
  PerturbationResult r;
  r.delta = delta;
  const double np = norm_l2(pr.phi);
  Field u0 = pr.phi;
  if (delta == 0.0) {
    r.traveling_wave_mode = true;
  } else {
    Field eta = smooth_noise(pr.phi.grid, seed);
    u0 = pr.phi + (delta * np) * eta;
  }
  r.trace = integrate(u0, pr.model, T, dt, &pr, opts);
  for (double e : r.trace.traveling_error) r.max_traveling_error = std::max(r.max_traveling_error, e);
  if (r.traveling_wave_mode) {
    r.ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    double m = 0.0;
    for (double d : r.trace.orbital_distance) m = std::max(m, d);
    r.ratio = m / (delta * np);
  }
  return r;
}

}  // namespace ostrovsky

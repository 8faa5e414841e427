#include "ostrovsky/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ostrovsky {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

// Trigonometric interpolant of f and its first two derivatives at x.
struct Interpolant {
  const Grid& g;
  Spectrum c;
  explicit Interpolant(const Field& f) : g(f.grid), c(rfft(f.values)) {}

  // returns {f, f', f''}
  std::array<double, 3> eval(double x) const {
    const int n = g.n;
    double v = c[0].real(), d1 = 0.0, d2 = 0.0;
    for (int k = 1; k <= n / 2; ++k) {
      double xi = g.xi(k);
      double w = k == n / 2 ? 1.0 : 2.0;
      cplx ck = k == n / 2 ? cplx(c[k].real(), 0.0) : c[k];
      cplx t = ck * std::polar(1.0, xi * (x + g.half_length));
      v += w * t.real();
      d1 -= w * xi * t.imag();
      d2 -= w * xi * xi * t.real();
    }
    return {v / n, d1 / n, d2 / n};
  }
};

class Descent {
 public:
  Descent(const Model& m, double lambda, const Grid& g, int R, const SolverOptions& o)
      : model_(m), lambda_(lambda), g_(g), R_(R), opts_(o), os_(g.n, R), sym_(g.n / 2 + 1, 0.0) {
    for (int k = 1; k <= g.n / 2; ++k) {
      double xi = g.xi(k);
      sym_[k] = xi * xi + 1.0 / (xi * xi);
    }
  }

  struct State {
    std::vector<double> u;
    double E = 0.0, scale = 0.0;
    std::vector<double> r;
    double omega = 0.0, res = 0.0;
  };

  void evaluate(State& s) const {
    const int n = g_.n;
    Spectrum c = rfft(s.u);
    double q = 0.0;
    for (int k = 1; k <= n / 2; ++k) q += (k == n / 2 ? 1.0 : 2.0) * sym_[k] * std::norm(c[k]);
    q *= 0.5 * g_.spacing / n;
    std::vector<double> fine = os_.up(c);
    double sF = 0.0;
    for (double& v : fine) {
      sF += model_.F(v);
      v = model_.N(v);
    }
    double nl = sF * g_.spacing / R_ / (model_.p + 1.0);
    s.E = q - nl;
    s.scale = std::abs(q) + std::abs(nl);
    Spectrum nc = os_.down(fine);
    Spectrum gc(n / 2 + 1);
    gc[0] = 0.0;
    for (int k = 1; k <= n / 2; ++k) gc[k] = sym_[k] * c[k] - nc[k];
    std::vector<double> grad = irfft(gc, n);
    double uu = dot(s.u, s.u);
    s.omega = dot(grad, s.u) / uu;
    s.r.resize(n);
    for (int j = 0; j < n; ++j) s.r[j] = grad[j] - s.omega * s.u[j];
    s.res = std::sqrt(dot(s.r, s.r) / uu);
  }

  void normalize(std::vector<double>& u) const {
    double m = dot(u, u) * g_.spacing;
    double f = std::sqrt(lambda_ / m);
    for (double& v : u) v *= f;
  }

  // Runs until res < tol; returns false on stall.
  bool run(State& s, int& iter, std::vector<double>* history, std::string& why) const {
    const int n = g_.n;
    double step = opts_.step0;
    int since_recenter = 0;
    const double eps = std::numeric_limits<double>::epsilon();
    while (s.res >= opts_.tol) {
      if (iter >= opts_.max_iter) {
        std::ostringstream os;
        os << "iteration budget " << opts_.max_iter << " exhausted at residual " << s.res;
        why = os.str();
        return false;
      }
      double sigma = std::max(2.0 - s.omega, opts_.sigma_min);
      Spectrum rc = rfft(s.r);
      rc[0] = 0.0;
      for (int k = 1; k <= n / 2; ++k) rc[k] /= (sym_[k] - 2.0 + sigma);
      std::vector<double> d = irfft(rc, n);
      double a = dot(d, s.u) / dot(s.u, s.u);
      for (int j = 0; j < n; ++j) d[j] -= a * s.u[j];
      double gd = dot(s.r, d) * g_.spacing;
      State t;
      t.u.resize(n);
      while (true) {
        for (int j = 0; j < n; ++j) t.u[j] = s.u[j] - step * d[j];
        normalize(t.u);
        evaluate(t);
        if (!std::isfinite(t.E) || t.E < -1e8 * (1.0 + lambda_)) {
          std::ostringstream os;
          os << "energy unbounded below (E = " << t.E << ")";
          throw Error(ErrorCode::Diverged, os.str());
        }
        if (t.E <= s.E - 1e-4 * step * gd) break;
        // energy differences at rounding level: accept on residual decrease
        if (t.E <= s.E + 16.0 * eps * s.scale && t.res < s.res) break;
        step *= opts_.backtrack;
        if (step < 1e-14) {
          std::ostringstream os;
          os << "line search stalled at residual " << s.res;
          why = os.str();
          return false;
        }
      }
      s = std::move(t);
      ++iter;
      if (history) history->push_back(s.E);
      step = std::min(step * 1.25, 4.0);
      if (opts_.recenter_every > 0 && ++since_recenter >= opts_.recenter_every) {
        since_recenter = 0;
        recenter_state(s);
      }
    }
    return true;
  }

  void recenter_state(State& s) const {
    Field f{g_, s.u, true};
    s.u = recenter(f).values;
    normalize(s.u);
    evaluate(s);
  }

 private:
  Model model_;
  double lambda_;
  Grid g_;
  int R_;
  SolverOptions opts_;
  Oversampler os_;
  std::vector<double> sym_;
};

Field roll(const Field& f, int shift) {
  Field out = f;
  const int n = f.grid.n;
  for (int j = 0; j < n; ++j) out.values[((j + shift) % n + n) % n] = f.values[j];
  return out;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tol > 0.0)) fail(ErrorCode::Usage, "solver tol must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0)) fail(ErrorCode::Usage, "backtrack must lie in (0,1)");
  if (max_iter <= 0) fail(ErrorCode::Usage, "max_iter must be positive");
  if (!(step0 > 0.0)) fail(ErrorCode::Usage, "step0 must be positive");
  if (!(sigma_min > 0.0)) fail(ErrorCode::Usage, "sigma_min must be positive");
}

std::pair<double, double> seed_alpha_range(double p) {
  return {std::max((p - 1.0) / 2.0, 2.0 / (p + 1.0)), 1.0};
}

Field initial_guess(const Grid& grid, double lambda, SeedVariant variant, double eps,
                    std::optional<double> alpha, double p) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::BadEpsilon, "seed epsilon must lie in (0,1)");
  if (!(lambda > 0.0)) fail(ErrorCode::ConstraintViolated, "lambda must be positive");
  double a = 0.0;
  if (variant == SeedVariant::I) {
    auto [lo, hi] = seed_alpha_range(p);
    a = alpha.value_or(0.5 * (lo + hi));
    if (!(a > lo && a < hi)) {
      std::ostringstream os;
      os << "alpha=" << a << " outside (" << lo << ", " << hi << ") for p=" << p;
      fail(ErrorCode::BadAlpha, os.str());
    }
  }
  const double amp = 2.0 * std::sqrt(eps);
  const double second = variant == SeedVariant::I ? std::pow(eps, a) : 0.0;
  Field v = make_field(grid, [&](double x) {
    double y = eps * x;
    return amp * std::exp(-0.5 * y * y) * (std::cos(x) + second * std::cos(2.0 * x));
  });
  v = project_zero_mean(v);
  double m = inner(v, v);
  return std::sqrt(lambda / m) * v;
}

double peak_location(const Field& f) {
  int jmax = 0;
  for (int j = 1; j < f.grid.n; ++j)
    if (std::abs(f.values[j]) > std::abs(f.values[jmax])) jmax = j;
  Interpolant it(f);
  double x = f.grid.x(jmax);
  const double dx = f.grid.spacing;
  for (int k = 0; k < 20; ++k) {
    auto v = it.eval(x);
    if (v[2] == 0.0) break;
    double step = -v[1] / v[2];
    step = std::clamp(step, -dx, dx);
    x += step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) break;
  }
  if (std::abs(x - f.grid.x(jmax)) > dx) x = f.grid.x(jmax);
  return x;
}

Field recenter(const Field& f) { return translate(f, -peak_location(f)); }

double parity_defect(const Field& f) {
  const int n = f.grid.n;
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = f.values[j] - f.values[(n - j) % n];
    num += d * d;
    den += f.values[j] * f.values[j];
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double boundary_ratio(const Field& f) {
  const int n = f.grid.n;
  const int w = std::max(1, n / 40);
  double edge = 0.0;
  for (int j = 0; j < w; ++j) edge = std::max({edge, std::abs(f.values[j]), std::abs(f.values[n - 1 - j])});
  double m = f.max_abs();
  return m > 0.0 ? edge / m : 0.0;
}

WaveProfile minimize_from(const Model& model, double lambda, const Field& start,
                          const SolverOptions& opts) {
  opts.validate();
  if (!(lambda > 0.0)) fail(ErrorCode::ConstraintViolated, "lambda must be positive");
  const Grid& g = start.grid;
  const int R = opts.oversampling > 0 ? opts.oversampling : default_oversampling(model);
  Descent desc(model, lambda, g, R, opts);

  Descent::State s;
  s.u = project_zero_mean(start).values;
  if (dot(s.u, s.u) == 0.0) fail(ErrorCode::DegenerateProfile, "zero starting field");
  desc.normalize(s.u);
  if (model.family == Family::AbsPower) {
    Field f{g, s.u, true};
    if (integral_F(f, model, R) < 0.0)
      for (double& v : s.u) v = -v;
  }
  desc.evaluate(s);

  std::vector<double> history;
  if (opts.record_history) history.push_back(s.E);
  int iter = 0;
  std::string why;
  bool converged = false;
  for (int round = 0; round < 4 && !converged; ++round) {
    if (!desc.run(s, iter, opts.record_history ? &history : nullptr, why))
      fail(ErrorCode::NoConvergence, why);
    desc.recenter_state(s);
    converged = s.res < opts.tol;
  }
  if (!converged) {
    std::ostringstream os;
    os << "recentering keeps the residual at " << s.res << " above tol " << opts.tol;
    fail(ErrorCode::NoConvergence, os.str());
  }

  WaveProfile pr;
  pr.model = model;
  pr.lambda = lambda;
  pr.phi = Field{g, s.u, true};
  pr.oversampling = R;
  pr.omega = s.omega;
  pr.iterations = iter;
  pr.energy = s.E;
  pr.el_residual = el_residual_second_order(pr);
  pr.parity_defect = parity_defect(pr.phi);
  pr.boundary_ratio = boundary_ratio(pr.phi);
  pr.energy_history = std::move(history);
  return pr;
}

WaveProfile minimize(const Model& model, double lambda, const Grid& grid, const SolverOptions& opts) {
  opts.validate();
  SeedVariant v = model.family == Family::SignedPower ? SeedVariant::J : SeedVariant::I;
  Field seed = initial_guess(grid, lambda, v, opts.seed_epsilon, opts.seed_alpha, model.p);
  if (opts.seed_shift != 0) seed = roll(seed, opts.seed_shift);
  return minimize_from(model, lambda, seed, opts);
}

double auto_half_length(double omega, double target_kappa_L) {
  double kappa = decay_rate_kappa(omega);
  return std::numbers::pi * std::ceil(target_kappa_L / (kappa * std::numbers::pi));
}

Field resample(const Field& f, const Grid& target) {
  Interpolant it(f);
  const double L = f.grid.half_length;
  Field out = make_field(target, [&](double x) {
    if (x < -L || x >= L) return 0.0;
    return it.eval(x)[0];
  });
  return project_zero_mean(out);
}

WaveProfile minimize_auto(const Model& model, double lambda, const GridSpec& spec,
                          const SolverOptions& opts) {
  if (spec.L > 0.0) return minimize(model, lambda, make_grid(spec.L, spec.n), opts);
  auto check_resolution = [&](double L) {
    double nyq = std::numbers::pi * spec.n / (2.0 * L);
    if (nyq < 3.0) {
      std::ostringstream os;
      os << "decay needs L = " << L << " but n = " << spec.n
         << " then resolves wavenumbers only up to " << nyq << " (< 3)";
      fail(ErrorCode::ResolutionLimit, os.str());
    }
  };
  double L = 16.0 * std::numbers::pi;
  std::optional<WaveProfile> prev;
  for (int attempt = 0; attempt <= spec.max_resolves; ++attempt) {
    check_resolution(L);
    Grid g = make_grid(L, spec.n);
    WaveProfile pr = prev ? minimize_from(model, lambda, resample(prev->phi, g), opts)
                          : minimize(model, lambda, g, opts);
    if (!(pr.omega < 2.0)) {
      // box too short to hold the decaying tail; the minimizer is box-periodic
      L *= 2.0;
      prev = std::move(pr);
      continue;
    }
    double kappa = decay_rate_kappa(pr.omega);
    if (L * kappa >= spec.kappa_L) return pr;
    double next = auto_half_length(pr.omega, spec.kappa_L + 0.5);
    L = std::max(next, L + std::numbers::pi);
    prev = std::move(pr);
  }
  fail(ErrorCode::ResolutionLimit, "box length did not settle within the re-solve budget");
}

bool CostCurve::complete() const {
  for (const auto& f : failures)
    if (!f.empty()) return false;
  return true;
}

CostCurve cost_curve(const Model& model, const std::vector<double>& lambdas, const GridSpec& spec,
                     const SolverOptions& opts, bool keep_profiles) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) fail(ErrorCode::Usage, "lambdas must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) fail(ErrorCode::Usage, "lambdas must be sorted");
  }
  CostCurve c;
  c.model = model;
  c.lambdas = lambdas;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double lam : lambdas) {
    try {
      WaveProfile pr = minimize_auto(model, lam, spec, opts);
      c.values.push_back(pr.energy);
      c.omegas.push_back(pr.omega);
      c.residuals.push_back(pr.el_residual);
      c.failures.emplace_back();
      if (keep_profiles) c.profiles.emplace_back(std::move(pr));
      else c.profiles.emplace_back(std::nullopt);
    } catch (const Error& e) {
      c.values.push_back(nan);
      c.omegas.push_back(nan);
      c.residuals.push_back(nan);
      c.failures.emplace_back(e.what());
      c.profiles.emplace_back(std::nullopt);
    }
  }
  return c;
}

SubadditivityReport check_subadditivity(const CostCurve& curve) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i)
    if (curve.ok(i) && std::isfinite(curve.values[i])) idx.push_back(i);
  if (idx.size() < 3) fail(ErrorCode::InsufficientSamples, "subadditivity needs at least 3 converged samples");

  SubadditivityReport rep;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    double lam = curve.lambdas[idx[a]];
    for (std::size_t b = 0; b < idx.size(); ++b) {
      double al = curve.lambdas[idx[b]];
      double rest = lam - al;
      if (!(rest > 0.0) || al > rest * (1.0 + 1e-12)) continue;
      for (std::size_t c = 0; c < idx.size(); ++c) {
        if (std::abs(curve.lambdas[idx[c]] - rest) > 1e-9 * lam) continue;
        SubadditivityTriple t;
        t.lambda = lam;
        t.alpha = al;
        t.rest = rest;
        t.margin = curve.values[idx[b]] + curve.values[idx[c]] - curve.values[idx[a]];
        t.pass = t.margin > 0.0;
        if (!t.pass) {
          std::ostringstream os;
          os << "m(" << lam << ") = " << curve.values[idx[a]] << " is not below m(" << al << ") + m("
             << rest << ") = " << curve.values[idx[b]] + curve.values[idx[c]];
          rep.failures.push_back(os.str());
        }
        rep.triples.push_back(t);
        break;
      }
    }
  }
  if (rep.triples.empty()) fail(ErrorCode::InsufficientSamples, "no representable splitting on the sample grid");
  rep.ratio_decreasing = true;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    rep.ratios.push_back(curve.values[idx[a]] / curve.lambdas[idx[a]]);
    if (a > 0 && !(rep.ratios[a] < rep.ratios[a - 1])) {
      rep.ratio_decreasing = false;
      std::ostringstream os;
      os << "m/lambda not strictly decreasing between lambda = " << curve.lambdas[idx[a - 1]] << " and "
         << curve.lambdas[idx[a]];
      rep.failures.push_back(os.str());
    }
  }
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace ostrovsky

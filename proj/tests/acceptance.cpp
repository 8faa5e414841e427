// Acceptance run over the reference test matrix. One PASS/FAIL line per criterion on
// stdout; per-cell detail goes to stderr.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ostrovsky/io.hpp"

using namespace ostrovsky;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Cell {
  Family family;
  double p;
  double lambda;
  std::optional<WaveProfile> profile;
  std::string error;
  double solve_seconds = 0.0;
  std::optional<SpectrumReport> spectrum;
  std::string spectrum_error;
};

std::string tag(Family f, double p, double lambda) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s p=%g lambda=%g", to_string(f), p, lambda);
  return buf;
}

std::string tag(const Cell& c) { return tag(c.family, c.p, c.lambda); }

struct Criterion {
  bool pass = true;
  int checked = 0;
  int failed = 0;
  std::string first_failure;

  void check(bool ok, const std::string& what) {
    ++checked;
    if (ok) return;
    ++failed;
    pass = false;
    if (first_failure.empty()) first_failure = what;
    std::fprintf(stderr, "    fail: %s\n", what.c_str());
  }
};

void report(int k, const Criterion& c, const std::string& summary) {
  std::printf("criterion %d: %s  (%d/%d checks passed) %s", k, c.pass ? "PASS" : "FAIL", c.checked - c.failed,
              c.checked, summary.c_str());
  if (!c.pass) std::printf(" first failure: %s", c.first_failure.c_str());
  std::printf("\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Field random_smooth(const Grid& g, std::mt19937_64& rng, double width) {
  std::normal_distribution<double> nd;
  Spectrum c(g.n / 2 + 1, 0.0);
  for (int k = 1; k < g.n / 2; ++k) {
    double d = (g.xi(k) - 1.0) / width;
    c[k] = cplx(nd(rng), nd(rng)) * std::exp(-0.5 * d * d);
  }
  Field f{g, irfft(c, g.n), true};
  return (1.0 / norm_l2(f)) * f;
}

}  // namespace

int main() {
  const auto t_start = Clock::now();
  const std::vector<std::pair<Family, double>> families{{Family::SignedPower, 2.0}, {Family::SignedPower, 3.0},
                                                        {Family::SignedPower, 4.0}, {Family::AbsPower, 1.5},
                                                        {Family::AbsPower, 2.0},    {Family::AbsPower, 2.5}};
  const std::vector<double> matrix_lambdas{0.5, 1.0, 2.0};

  // solves, one per (family, p, lambda); 1.5 is needed only for the subadditivity grid
  std::map<std::tuple<int, double, double>, Cell> cells;
  auto solve = [&](Family f, double p, double lambda) -> Cell& {
    auto key = std::make_tuple(static_cast<int>(f), p, lambda);
    auto it = cells.find(key);
    if (it != cells.end()) return it->second;
    Cell c{f, p, lambda, std::nullopt, "", 0.0, std::nullopt, ""};
    auto t0 = Clock::now();
    try {
      c.profile = minimize_auto(make_model(f, p), lambda, GridSpec{});
    } catch (const Error& e) {
      c.error = e.what();
    }
    c.solve_seconds = seconds_since(t0);
    if (c.profile)
      std::fprintf(stderr, "  solved %-28s omega=%.6f m=%.8f L=%.1f res=%.2e in %.1fs\n", tag(c).c_str(),
                   c.profile->omega, c.profile->energy, c.profile->phi.grid.half_length, c.profile->el_residual,
                   c.solve_seconds);
    else
      std::fprintf(stderr, "  solve failed %-22s %s (%.1fs)\n", tag(c).c_str(), c.error.c_str(), c.solve_seconds);
    return cells.emplace(key, std::move(c)).first->second;
  };

  std::vector<Cell*> matrix;
  std::fprintf(stderr, "solving the test matrix\n");
  for (auto [f, p] : families)
    for (double l : matrix_lambdas) matrix.push_back(&solve(f, p, l));

  std::fprintf(stderr, "stability of the test matrix\n");
  for (Cell* c : matrix) {
    if (!c->profile) continue;
    try {
      c->spectrum = analyze_stability(*c->profile);
      std::fprintf(stderr, "  %-28s n_minus=%d kernel=%d vk=%.4e verdict=%s\n", tag(*c).c_str(), c->spectrum->n_minus,
                   c->spectrum->kernel_dim, c->spectrum->vk_value, to_string(c->spectrum->verdict));
    } catch (const Error& e) {
      c->spectrum_error = e.what();
      std::fprintf(stderr, "  %-28s stability failed: %s\n", tag(*c).c_str(), e.what());
    }
  }

  int failed_criteria = 0;
  auto finish = [&](int k, const Criterion& c, const std::string& s) {
    report(k, c, s);
    failed_criteria += !c.pass;
  };

  // 1. existence and EL residuals
  {
    std::fprintf(stderr, "criterion 1\n");
    Criterion c;
    double worst2 = 0.0, worst4 = 0.0, slowest = 0.0;
    for (Cell* cell : matrix) {
      slowest = std::max(slowest, cell->solve_seconds);
      if (!cell->profile) {
        c.check(false, tag(*cell) + ": " + cell->error);
        continue;
      }
      double r2 = el_residual_second_order(*cell->profile), r4 = el_residual_fourth_order(*cell->profile);
      worst2 = std::max(worst2, r2);
      worst4 = std::max(worst4, r4);
      c.check(r2 <= 1e-7, tag(*cell) + fmt(": el2 = %.3e", r2));
      c.check(r4 <= 1e-6, tag(*cell) + fmt(": el4 = %.3e", r4));
      c.check(cell->solve_seconds <= 60.0, tag(*cell) + fmt(": solve took %.1f s", cell->solve_seconds));
    }
    finish(1, c, fmt("max el2 %.2e", worst2) + fmt(" max el4 %.2e", worst4) + fmt(" slowest solve %.1fs", slowest));
  }

  // 2. multiplier bound and m < lambda
  {
    std::fprintf(stderr, "criterion 2\n");
    Criterion c;
    double max_omega = -1e300;
    for (Cell* cell : matrix) {
      if (!cell->profile) {
        c.check(false, tag(*cell) + ": no profile");
        continue;
      }
      const WaveProfile& pr = *cell->profile;
      max_omega = std::max(max_omega, pr.omega);
      c.check(pr.omega < 2.0, tag(*cell) + fmt(": omega = %.8f", pr.omega));
      c.check(pr.energy < pr.lambda, tag(*cell) + fmt(": m = %.8f", pr.energy));
    }
    finish(2, c, fmt("max omega %.6f", max_omega));
  }

  // 3. Pohozaev, both variants
  {
    std::fprintf(stderr, "criterion 3\n");
    Criterion c;
    double worst = 0.0;
    for (Cell* cell : matrix) {
      if (!cell->profile) {
        c.check(false, tag(*cell) + ": no profile");
        continue;
      }
      try {
        PohozaevReport a = pohozaev_residuals(*cell->profile), b = pohozaev_fourth_order(*cell->profile);
        double m = std::max({a.r1, a.r2, b.r1, b.r2});
        worst = std::max(worst, m);
        c.check(m <= 1e-4, tag(*cell) + fmt(": max Pohozaev residual %.3e", m));
      } catch (const Error& e) {
        c.check(false, tag(*cell) + ": " + e.what());
      }
    }
    finish(3, c, fmt("max residual %.2e", worst));
  }

  // 4. decay rate, both tails
  {
    std::fprintf(stderr, "criterion 4\n");
    Criterion c;
    double worst = 0.0;
    for (Cell* cell : matrix) {
      if (!cell->profile) {
        c.check(false, tag(*cell) + ": no profile");
        continue;
      }
      try {
        DecayFit d = fit_decay(*cell->profile);
        worst = std::max(worst, d.rel_dev);
        c.check(d.rel_dev_left <= 0.1, tag(*cell) + fmt(": left tail deviation %.3f", d.rel_dev_left));
        c.check(d.rel_dev_right <= 0.1, tag(*cell) + fmt(": right tail deviation %.3f", d.rel_dev_right));
      } catch (const Error& e) {
        c.check(false, tag(*cell) + ": " + e.what());
      }
    }
    finish(4, c, fmt("max relative deviation %.4f", worst));
  }

  // 5. linearized operator
  {
    std::fprintf(stderr, "criterion 5\n");
    Criterion c;
    double worst_tr = 0.0, worst_q = 0.0, worst_ov = 0.0;
    for (Cell* cell : matrix) {
      if (!cell->spectrum) {
        c.check(false, tag(*cell) + ": " + (cell->profile ? cell->spectrum_error : cell->error));
        continue;
      }
      const SpectrumReport& s = *cell->spectrum;
      double q = std::abs(s.quadratic_form - s.quadratic_form_ref) / std::abs(s.quadratic_form_ref);
      worst_tr = std::max(worst_tr, s.translation_residual);
      worst_q = std::max(worst_q, q);
      worst_ov = std::max(worst_ov, s.kernel_overlap);
      c.check(s.n_minus == 1, tag(*cell) + ": n_minus = " + std::to_string(s.n_minus));
      c.check(s.translation_residual <= 1e-5, tag(*cell) + fmt(": translation residual %.3e", s.translation_residual));
      c.check(q <= 1e-6, tag(*cell) + fmt(": quadratic form deviation %.3e", q));
      c.check(s.kernel_overlap <= 1e-4, tag(*cell) + fmt(": kernel overlap %.3e", s.kernel_overlap));
    }
    finish(5, c,
           fmt("max translation residual %.2e", worst_tr) + fmt(" max form deviation %.2e", worst_q) +
               fmt(" max overlap %.2e", worst_ov));
  }

  // 6. VK, verdict and the full spectrum
  {
    std::fprintf(stderr, "criterion 6\n");
    Criterion c;
    double worst_re = -1e300;
    for (Cell* cell : matrix) {
      if (!cell->spectrum) {
        c.check(false, tag(*cell) + ": " + (cell->profile ? cell->spectrum_error : cell->error));
        continue;
      }
      const SpectrumReport& s = *cell->spectrum;
      c.check(s.vk_value < 0.0, tag(*cell) + fmt(": vk = %.4e", s.vk_value));
      c.check(s.verdict == Verdict::Stable, tag(*cell) + ": verdict " + to_string(s.verdict) + " (" + s.reason + ")");
      double rel = s.full.max_real_localized / s.full.scale;
      worst_re = std::max(worst_re, rel);
      c.check(s.full_computed && rel <= 1e-6, tag(*cell) + fmt(": max localized Re / scale = %.3e", rel));
    }
    finish(6, c, fmt("max localized Re/scale %.2e", worst_re));
  }

  // 7. dynamics on the signed p = 2 cell
  {
    std::fprintf(stderr, "criterion 7\n");
    Criterion c;
    std::string summary;
    Cell& cell = solve(Family::SignedPower, 2.0, 1.0);
    if (!cell.profile) {
      c.check(false, "reference cell: " + cell.error);
    } else {
      const WaveProfile& pr = *cell.profile;
      auto t0 = Clock::now();
      PerturbationResult tw = perturbation_experiment(pr, 0.0, 10.0, 1e-3, 0);
      PerturbationResult pe = perturbation_experiment(pr, 1e-3, 50.0, 1e-3, 20240601);
      double secs = seconds_since(t0);
      c.check(!tw.trace.blowup_time && !pe.trace.blowup_time, "blowup detected");
      c.check(tw.max_traveling_error <= 1e-4, fmt("traveling-wave error %.3e", tw.max_traveling_error));
      c.check(tw.trace.mass_drift() <= 1e-9, fmt("mass drift %.3e", tw.trace.mass_drift()));
      c.check(tw.trace.energy_drift() <= 1e-6, fmt("energy drift %.3e", tw.trace.energy_drift()));
      c.check(pe.ratio <= 10.0, fmt("perturbation ratio %.3f", pe.ratio));
      c.check(secs <= 300.0, fmt("runtime %.1f s", secs));
      summary = fmt("tw error %.2e", tw.max_traveling_error) + fmt(" mass drift %.2e", tw.trace.mass_drift()) +
                fmt(" energy drift %.2e", tw.trace.energy_drift()) + fmt(" ratio %.3f", pe.ratio) +
                fmt(" in %.0fs", secs);
    }
    finish(7, c, summary);
  }

  // 8. subadditivity on {0.5, 1, 1.5, 2} for each family and exponent
  {
    std::fprintf(stderr, "criterion 8\n");
    Criterion c;
    const std::vector<double> grid{0.5, 1.0, 1.5, 2.0};
    int curves_ok = 0;
    for (auto [f, p] : families) {
      CostCurve curve;
      curve.model = make_model(f, p);
      for (double l : grid) {
        Cell& cell = solve(f, p, l);
        curve.lambdas.push_back(l);
        curve.values.push_back(cell.profile ? cell.profile->energy : std::nan(""));
        curve.omegas.push_back(cell.profile ? cell.profile->omega : std::nan(""));
        curve.residuals.push_back(cell.profile ? cell.profile->el_residual : std::nan(""));
        curve.profiles.push_back(std::nullopt);
        curve.failures.push_back(cell.error);
      }
      std::string name = tag(f, p, 0.0);
      name = name.substr(0, name.find(" lambda"));
      for (std::size_t i = 0; i < grid.size(); ++i)
        c.check(curve.ok(i), name + fmt(": m(%g) unavailable, ", grid[i]) + curve.failures[i]);
      if (!curve.complete()) continue;
      SubadditivityReport r = check_subadditivity(curve);
      double min_margin = 1e300;
      for (const auto& t : r.triples) min_margin = std::min(min_margin, t.margin);
      std::fprintf(stderr, "  %s: %zu triples, min margin %.4e, m/lambda %s\n", name.c_str(), r.triples.size(),
                   min_margin, r.ratio_decreasing ? "decreasing" : "NOT decreasing");
      c.check(r.ratio_decreasing, name + ": m/lambda not strictly decreasing");
      c.check(r.pass, name + ": " + (r.failures.empty() ? std::string("triple failed") : r.failures.front()));
      curves_ok += r.pass && r.ratio_decreasing;
    }
    finish(8, c, std::to_string(curves_ok) + "/" + std::to_string(families.size()) + " curves pass");
  }

  // 9. sampling estimate
  {
    std::fprintf(stderr, "criterion 9\n");
    Criterion c;
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int Ns[] = {2, 3, 5, 8};
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      int terms = 1 + static_cast<int>(U(rng) * 4);
      std::vector<double> amp(terms), mu(terms), sig(terms);
      for (int i = 0; i < terms; ++i) {
        amp[i] = 2.0 * U(rng) - 0.5;
        mu[i] = 6.0 * U(rng) - 3.0;
        sig[i] = 0.2 + 1.5 * U(rng);
      }
      auto f = [&](double x) {
        double s = 0.0;
        for (int i = 0; i < terms; ++i) s += amp[i] * std::exp(-0.5 * std::pow((x - mu[i]) / sig[i], 2));
        return s;
      };
      auto df = [&](double x) {
        double s = 0.0;
        for (int i = 0; i < terms; ++i) {
          double z = (x - mu[i]) / sig[i];
          s -= amp[i] * z / sig[i] * std::exp(-0.5 * z * z);
        }
        return s;
      };
      double eps = 0.01 + 0.49 * U(rng);
      int N = Ns[t % 4];
      SamplingResult r = sampling_check(f, df, eps, N, -15.0, 15.0);
      worst = std::max(worst, r.lhs / r.rhs_bound);
      c.check(r.pass, "case " + std::to_string(t) + fmt(": lhs/rhs = %.3f", r.lhs / r.rhs_bound));
      // eps -> 0: the sampled sum approaches int f / N within the bound
      if (t % 10 == 0) {
        for (double e : {0.2, 0.1, 0.05, 0.025}) {
          SamplingResult s = sampling_check(f, df, e, N, -15.0, 15.0);
          c.check(std::abs(s.partial_sum - s.full_integral / N) <= s.rhs_bound,
                  "case " + std::to_string(t) + fmt(": limit check at eps %g", e));
        }
      }
    }
    finish(9, c, fmt("max lhs/rhs %.3e", worst));
  }

  // 10. numerical hygiene
  {
    std::fprintf(stderr, "criterion 10\n");
    Criterion c;
    std::mt19937_64 rng(1010);
    Grid g = make_grid(25.0, 256);
    double worst_fd = 0.0, worst_iv = 0.0;
    for (Family f : {Family::SignedPower, Family::AbsPower}) {
      std::vector<double> ps;
      for (auto [ff, p] : families)
        if (ff == f) ps.push_back(p);
      for (int t = 0; t < 20; ++t) {
        Model m = make_model(f, ps[t % ps.size()]);
        Field u = 2.0 * random_smooth(g, rng, 1.0);
        Field h = random_smooth(g, rng, 1.5);
        const double d = 1e-5;
        double num = (energy_second_order(u + d * h, m) - energy_second_order(u - d * h, m)) / (2.0 * d);
        double ana = inner(gradient_second_order(u, m), h);
        double rel = std::abs(num - ana) / std::abs(ana);
        worst_fd = std::max(worst_fd, rel);
        c.check(rel <= 1e-6, std::string(to_string(f)) + fmt(" gradient check %.3e", rel));

        Field v = 0.8 * random_smooth(g, rng, 0.7);
        double I = energy_fourth_order(v, m), J = energy_second_order(deriv(v, 1), m);
        double iv = std::abs(I - J) / std::max(1.0, std::abs(I));
        worst_iv = std::max(worst_iv, iv);
        c.check(iv <= 1e-10, std::string(to_string(f)) + fmt(" I[v] vs J[v'] %.3e", iv));
      }
    }

    std::string grid_summary;
    Cell& cell = solve(Family::SignedPower, 2.0, 1.0);
    if (!cell.profile) {
      c.check(false, "reference cell: " + cell.error);
    } else {
      const WaveProfile& a = *cell.profile;
      try {
        WaveProfile b = minimize(a.model, a.lambda, make_grid(a.phi.grid.half_length, 2 * a.phi.grid.n));
        StabilityOptions so;
        so.full_spectrum = false;
        SpectrumReport sa = analyze_stability(a, so), sb = analyze_stability(b, so);
        double d_omega = std::abs(b.omega - a.omega) / std::abs(a.omega);
        double d_vk = std::abs(sb.vk_value - sa.vk_value) / std::abs(sa.vk_value);
        // the kernel eigenvalues sit at rounding level, so each change is measured
        // against max(|mu_i|, |mu_min|)
        double scale_min = std::abs(sa.eigenvalues_lplus.front());
        double d_eig = 0.0;
        for (int i = 0; i < 5; ++i) {
          double ea = sa.eigenvalues_lplus[i], eb = sb.eigenvalues_lplus[i];
          d_eig = std::max(d_eig, std::abs(eb - ea) / std::max(std::abs(ea), scale_min));
        }
        c.check(d_omega <= 1e-5, fmt("grid doubling changes omega by %.3e", d_omega));
        c.check(d_vk <= 1e-5, fmt("grid doubling changes vk by %.3e", d_vk));
        c.check(d_eig <= 1e-5, fmt("grid doubling changes the low eigenvalues by %.3e", d_eig));
        grid_summary = fmt(" grid doubling: omega %.1e", d_omega) + fmt(" vk %.1e", d_vk) + fmt(" eigenvalues %.1e", d_eig);
      } catch (const Error& e) {
        c.check(false, std::string("grid doubling: ") + e.what());
      }
    }
    finish(10, c, fmt("max gradient error %.2e", worst_fd) + fmt(" max I-J %.2e", worst_iv) + grid_summary);
  }

  std::printf("acceptance: %d of 10 criteria failed (%.0f s)\n", failed_criteria, seconds_since(t_start));
  return failed_criteria == 0 ? 0 : 1;
}

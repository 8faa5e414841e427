#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ostrovsky/functionals.hpp"

namespace ostrovsky {

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 50000;
  double step0 = 1.0;
  double backtrack = 0.5;
  int recenter_every = 200;
  double seed_epsilon = 0.3;
  std::optional<double> seed_alpha;  // AbsPower seed exponent; midpoint of the admissible range if unset
  int oversampling = 0;              // 0 selects default_oversampling(model)
  double sigma_min = 1e-3;           // floor of the preconditioner shift 2 - omega
  int seed_shift = 0;                // roll the seed by this many nodes
  bool record_history = false;

  void validate() const;
};

enum class SeedVariant { J, I };

// Admissible open interval for the AbsPower seed exponent alpha.
std::pair<double, double> seed_alpha_range(double p);

// 2 sqrt(eps) chi(eps x) cos x  (J)  or  2 sqrt(eps) chi(eps x)(cos x + eps^alpha cos 2x)  (I),
// chi(y) = exp(-y^2/2); mean-projected and scaled to ||v||^2 = lambda.
Field initial_guess(const Grid& grid, double lambda, SeedVariant variant, double eps,
                    std::optional<double> alpha = std::nullopt, double p = 2.0);

// Sub-grid location of max |f| through Newton steps on the trigonometric interpolant.
double peak_location(const Field& f);
// translate so that max |f| sits at x = 0
Field recenter(const Field& f);
// ||f(x) - f(-x)|| / ||f||
double parity_defect(const Field& f);
// max over the outer 5% of the box of |f|, relative to max |f|
double boundary_ratio(const Field& f);

WaveProfile minimize(const Model& model, double lambda, const Grid& grid,
                     const SolverOptions& opts = {});
// Continue descent from a given starting field (rescaled to the constraint).
WaveProfile minimize_from(const Model& model, double lambda, const Field& start,
                          const SolverOptions& opts = {});

struct GridSpec {
  double L = 0.0;  // 0 selects the box automatically from the decay rate
  int n = 1024;
  double kappa_L = 12.0;     // required L * kappa
  int max_resolves = 6;
};

// Box length giving L * kappa >= target, rounded up to a multiple of pi.
double auto_half_length(double omega, double target_kappa_L);

// minimize on a box chosen from the decay rate; re-solves on a larger box
// when L * kappa falls short.  ResolutionLimit when the box needed for the
// decay is too coarse for the n nodes (Nyquist wavenumber below 3).
WaveProfile minimize_auto(const Model& model, double lambda, const GridSpec& spec,
                          const SolverOptions& opts = {});

// Sample the trigonometric interpolant of f on a new grid; zero outside the old box.
Field resample(const Field& f, const Grid& target);

struct CostCurve {
  Model model;
  std::vector<double> lambdas;
  std::vector<double> values;      // m(lambda), NaN where the solve failed
  std::vector<double> omegas;
  std::vector<double> residuals;
  std::vector<std::optional<WaveProfile>> profiles;
  std::vector<std::string> failures;  // empty string when the solve succeeded

  bool ok(std::size_t i) const { return failures[i].empty(); }
  bool complete() const;
};

CostCurve cost_curve(const Model& model, const std::vector<double>& lambdas, const GridSpec& spec,
                     const SolverOptions& opts = {}, bool keep_profiles = true);

struct SubadditivityTriple {
  double lambda = 0.0, alpha = 0.0, rest = 0.0;
  double margin = 0.0;  // m(alpha) + m(lambda - alpha) - m(lambda)
  bool pass = false;
};

struct SubadditivityReport {
  std::vector<SubadditivityTriple> triples;
  std::vector<double> ratios;  // m(lambda)/lambda on the usable samples
  bool ratio_decreasing = false;
  bool pass = false;
  std::vector<std::string> failures;
};

SubadditivityReport check_subadditivity(const CostCurve& curve);

}  // namespace ostrovsky

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "ostrovsky/functionals.hpp"

namespace ostrovsky {

struct PohozaevReport {
  double r1 = 0.0;
  double r2 = 0.0;
  std::string variant_note;
  // integrals entering the identities
  double grad_sq = 0.0;    // ||phi'||^2
  double anti_sq = 0.0;    // ||d^{-1} phi||^2
  double nonlinear = 0.0;  // int F(phi)
  double lambda = 0.0;     // ||phi||^2
  double omega = 0.0;
  // AbsPower only: nonlinearity read as d/dx(|phi|^p), whose moment against phi vanishes
  std::optional<double> alt_r1;
  std::optional<double> alt_r2;
};

// Both identities for a field and multiplier, without convergence checks.
PohozaevReport pohozaev_identities(const Field& phi, const Model& model, double omega, int R = 0);
// Same integrals computed through vphi = d^{-1} phi.
PohozaevReport pohozaev_identities_fourth_order(const Field& phi, const Model& model, double omega,
                                                int R = 0);

// NotConverged unless the EL residual is at most 1e-6.
PohozaevReport pohozaev_residuals(const WaveProfile& profile);
PohozaevReport pohozaev_fourth_order(const WaveProfile& profile);

struct DecayFit {
  double kappa_left = 0.0;
  double kappa_right = 0.0;
  double kappa_fit = 0.0;  // mean of the two tails
  double kappa_ref = 0.0;
  double rel_dev_left = 0.0;
  double rel_dev_right = 0.0;
  double rel_dev = 0.0;    // max over tails
  double window_lo = 0.0;  // distance from the peak
  double window_hi = 0.0;
  int samples_left = 0;
  int samples_right = 0;
};

// Least-squares slope of log|f| over [3/kappa, min(0.8 L, 10/kappa)] from the peak,
// on both sides.  Oscillatory tails are fitted through the local maxima of |f|.
DecayFit fit_decay(const Field& f, double kappa_ref, bool oscillatory);
DecayFit fit_decay(const WaveProfile& profile);

struct SamplingResult {
  double partial_sum = 0.0;    // sum_n int_{n eps}^{n eps + eps/N} f
  double full_integral = 0.0;  // int f
  double lhs = 0.0;            // |partial_sum - full_integral / N|
  double rhs_bound = 0.0;      // (eps/N) int |f'|
  bool pass = false;
};

// Evaluates both sides of the sampling estimate on [a, b] by Gauss-Legendre quadrature
// on cells of width eps/N.
SamplingResult sampling_check(const std::function<double(double)>& f,
                              const std::function<double(double)>& df, double eps, int N, double a,
                              double b);

}  // namespace ostrovsky

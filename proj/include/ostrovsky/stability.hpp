#pragma once

#include <string>
#include <vector>

#include "ostrovsky/functionals.hpp"

namespace ostrovsky {

// Dense column-major n x n matrix of L+ = -d^2 - d^{-2} - omega - V acting on nodal
// values of mean-free fields.  The potential term is the Galerkin product
// down(V(up phi) up h), so M is the exact Jacobian of the discrete gradient.
struct OperatorMatrix {
  Grid grid;
  int dimension = 0;
  std::vector<double> entries;
  double omega = 0.0;
  Field potential;           // V(phi) at the nodes
  int oversampling = 1;
  double symmetry_defect = 0.0;  // max|M - M^T| / max|M| before symmetrization

  double operator()(int i, int j) const { return entries[i + static_cast<std::size_t>(j) * dimension]; }
  Field apply(const Field& h) const;
};

// matrix-free application of L+ about a profile
Field apply_lplus(const WaveProfile& profile, const Field& h);

OperatorMatrix assemble_lplus(const WaveProfile& profile);
// L+ about an arbitrary field phi (no convergence check); V = model.V(phi)
OperatorMatrix assemble_operator(const Field& phi, const Model& model, double omega, int R);

struct SymmetricSpectrum {
  int dimension = 0;                 // n - 1 (mean mode excluded)
  std::vector<double> eigenvalues;   // ascending
  std::vector<double> eigenvectors;  // column-major n x dimension, unit Euclidean norm
  double theta = 0.0;
  int n_minus = 0;
  int kernel_dim = 0;
  int positive = 0;
  std::vector<int> kernel_indices;

  std::vector<double> vector(int i) const;
};

// theta < 0 selects 1e-6 * max|eigenvalue|, capped at 1e-3 * (2 - omega)
SymmetricSpectrum symmetric_spectrum(const OperatorMatrix& M, double theta = -1.0);

// max |<phi, psi>| / (||phi|| ||psi||) over the kernel vectors
double weak_nondegeneracy_check(const Field& phi, const SymmetricSpectrum& s);
double kernel_overlap(const std::vector<double>& phi, const std::vector<std::vector<double>>& kernel);

struct VKResult {
  double value = 0.0;            // <L+^{-1} phi, phi>
  double self_consistency = 0.0; // |<L+ Q, Q> - <Q, phi>| / |<Q, phi>|
  Field Q;
};

VKResult vk_quantity(const WaveProfile& profile, const OperatorMatrix& M, const SymmetricSpectrum& s,
                     double overlap_tol = 1e-4);
// Generic symmetric pseudo-solve: returns <A^+ b, b> with eigenvalues |mu| <= theta excluded.
double pseudo_inverse_form(const std::vector<double>& A, int n, const std::vector<double>& b,
                           double theta);

struct FullSpectrum {
  std::vector<double> re, im;
  std::vector<double> participation;  // per eigenvalue
  double scale = 0.0;                 // max |eigenvalue|
  double max_real_all = 0.0;
  double max_real_localized = 0.0;
  int unstable_localized = 0;         // localized eigenvalues with Re > 1e-6 * scale
  double symmetry_defect = 0.0;       // max distance of -conj(mu) to the spectrum, / scale
  double max_residual_top10 = 0.0;    // max ||(A - mu) z|| / ||z|| over the 10 largest |Re|
  std::vector<double> certificate;    // real part of the eigenvector of the largest localized Re
};

// Eigenvalues of d/dx L+ (D * M with D the spectral differentiation matrix).
FullSpectrum full_linearization_spectrum(const OperatorMatrix& M, double localized_pr = 0.25);

enum class Verdict { Stable, Inconclusive, Unstable };
const char* to_string(Verdict v);

struct VerdictInputs {
  int n_minus = 0;
  double kernel_overlap = 0.0;
  double vk_value = 0.0;
  double max_real_localized = 0.0;
  double tol_overlap = 1e-4;
  double tol_vk = 0.0;
  double tol_real = 0.0;
};

struct VerdictResult {
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

VerdictResult decide_verdict(const VerdictInputs& in);

struct SpectrumReport {
  std::vector<double> eigenvalues_lplus;
  int dimension = 0;
  int n_minus = 0;
  int kernel_dim = 0;
  int positive = 0;
  double theta = 0.0;
  double kernel_overlap = 0.0;
  double kernel_translation_alignment = 0.0;  // max |<psi, phi'>| / ||phi'|| over kernel vectors
  double translation_residual = 0.0;
  double quadratic_form = 0.0;      // <L+ phi, phi>
  double quadratic_form_ref = 0.0;  // -(p-1) int F(phi)
  double symmetry_defect = 0.0;
  double vk_value = 0.0;
  double vk_self_consistency = 0.0;
  double vk_tol = 0.0;
  bool nond_ok = false;
  bool full_computed = false;
  FullSpectrum full;
  double max_real_full = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

struct StabilityOptions {
  bool full_spectrum = true;
  double overlap_tol = 1e-4;
  double vk_rel_tol = 1e-8;     // tol_vk = vk_rel_tol * ||phi||^2
  double real_rel_tol = 1e-6;   // relative to the spectral scale of d/dx L+
  double localized_pr = 0.25;
};

SpectrumReport analyze_stability(const WaveProfile& profile, const StabilityOptions& opts = {});

}  // namespace ostrovsky

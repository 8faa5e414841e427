#include "ostrovsky/stability.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ostrovsky {

namespace {

struct LplusKernel {
  Grid g;
  double omega;
  int R;
  Oversampler os;
  std::vector<double> v_fine;
  std::vector<double> sym;

  LplusKernel(const Field& phi, const Model& model, double om, int R_)
      : g(phi.grid), omega(om), R(R_), os(phi.grid.n, R_), sym(phi.grid.n / 2 + 1, 0.0) {
    v_fine = os.up(rfft(phi.values));
    for (double& v : v_fine) v = model.V(v);
    for (int k = 1; k <= g.n / 2; ++k) {
      double xi = g.xi(k);
      sym[k] = xi * xi + 1.0 / (xi * xi);
    }
  }

  void apply(const double* h, double* out) const {
    const int n = g.n;
    Spectrum c = rfft(h, n);
    c[0] = 0.0;
    std::vector<double> f = os.up(c);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] *= v_fine[j];
    Spectrum vh = os.down(f);
    Spectrum o(n / 2 + 1);
    o[0] = 0.0;
    for (int k = 1; k <= n / 2; ++k) o[k] = (sym[k] - omega) * c[k] - vh[k];
    irfft(o, n, out);
  }
};

// V = p|phi|^(p-1) has a cusp for p < 2; the operator needs a finer quadrature than the energy
int operator_oversampling(const WaveProfile& pr) {
  int R = pr.oversampling > 0 ? pr.oversampling : default_oversampling(pr.model);
  if (!pr.model.polynomial() && pr.model.p < 2.0) R = std::max(R, 512);
  return R;
}

void require_converged(const WaveProfile& pr) {
  double res = el_residual_second_order(pr);
  if (!(res <= 1e-6) || pr.phi.max_abs() == 0.0) {
    std::ostringstream os;
    os << "profile EL residual " << res << " exceeds 1e-6";
    fail(ErrorCode::NotConverged, os.str());
  }
}

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

Field OperatorMatrix::apply(const Field& h) const {
  if (h.grid != grid) fail(ErrorCode::GridMismatch, "operator and field grids differ");
  const int n = dimension;
  Field out{grid, std::vector<double>(n, 0.0), true};
  for (int j = 0; j < n; ++j) {
    const double hj = h.values[j];
    if (hj == 0.0) continue;
    const double* col = entries.data() + static_cast<std::size_t>(j) * n;
    for (int i = 0; i < n; ++i) out.values[i] += col[i] * hj;
  }
  return out;
}

Field apply_lplus(const WaveProfile& pr, const Field& h) {
  require_same_grid(pr.phi, h);
  LplusKernel K(pr.phi, pr.model, pr.omega, operator_oversampling(pr));
  Field out{h.grid, std::vector<double>(h.grid.n), true};
  K.apply(h.values.data(), out.values.data());
  return out;
}

OperatorMatrix assemble_operator(const Field& phi, const Model& model, double omega, int R) {
  if (R <= 0) R = default_oversampling(model);
  LplusKernel K(phi, model, omega, R);
  const int n = phi.grid.n;
  OperatorMatrix M;
  M.grid = phi.grid;
  M.dimension = n;
  M.omega = omega;
  M.oversampling = R;
  M.potential = make_field(phi.grid, [](double) { return 0.0; });
  for (int j = 0; j < n; ++j) M.potential.values[j] = model.V(phi.values[j]);
  M.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    K.apply(e.data(), M.entries.data() + static_cast<std::size_t>(j) * n);
    e[j] = 0.0;
  }
  double amax = 0.0, dmax = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      amax = std::max(amax, std::abs(M(i, j)));
      dmax = std::max(dmax, std::abs(M(i, j) - M(j, i)));
    }
  M.symmetry_defect = amax > 0.0 ? dmax / amax : 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      double s = 0.5 * (M.entries[i + static_cast<std::size_t>(j) * n] + M.entries[j + static_cast<std::size_t>(i) * n]);
      M.entries[i + static_cast<std::size_t>(j) * n] = s;
      M.entries[j + static_cast<std::size_t>(i) * n] = s;
    }
  return M;
}

OperatorMatrix assemble_lplus(const WaveProfile& pr) {
  require_converged(pr);
  return assemble_operator(pr.phi, pr.model, pr.omega, operator_oversampling(pr));
}

std::vector<double> SymmetricSpectrum::vector(int i) const {
  const int n = dimension + 1;
  return std::vector<double>(eigenvectors.begin() + static_cast<std::size_t>(i) * n,
                             eigenvectors.begin() + static_cast<std::size_t>(i + 1) * n);
}

SymmetricSpectrum symmetric_spectrum(const OperatorMatrix& M, double theta) {
  const int n = M.dimension;
  std::vector<double> A = M.entries;
  // lift the constant (mean) direction above the rest of the spectrum
  double rowmax = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::abs(M(i, j));
    rowmax = std::max(rowmax, s);
  }
  const double shift = 2.0 * rowmax + 1.0;
  for (auto& a : A) a += shift / n;
  std::vector<double> w(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, A.data(), n, w.data());
  if (info != 0) fail(ErrorCode::EigenFailure, "dsyevd failed with info " + std::to_string(info));

  SymmetricSpectrum s;
  s.dimension = n - 1;
  s.eigenvalues.assign(w.begin(), w.begin() + (n - 1));
  s.eigenvectors.assign(A.begin(), A.begin() + static_cast<std::size_t>(n) * (n - 1));
  double emax = 0.0;
  for (double v : s.eigenvalues) emax = std::max(emax, std::abs(v));
  if (theta < 0.0) {
    theta = 1e-6 * emax;
    // on long boxes emax is set by the 1/xi^2 term at the lowest mode; keep
    // theta well inside the gap below the essential spectrum at 2 - omega
    if (M.omega < 2.0) theta = std::min(theta, 1e-3 * (2.0 - M.omega));
  }
  s.theta = theta;
  for (int i = 0; i < n - 1; ++i) {
    double v = s.eigenvalues[i];
    if (!std::isfinite(v)) fail(ErrorCode::EigenFailure, "non-finite eigenvalue");
    if (v < -s.theta) ++s.n_minus;
    else if (v <= s.theta) {
      ++s.kernel_dim;
      s.kernel_indices.push_back(i);
    } else ++s.positive;
  }
  return s;
}

double kernel_overlap(const std::vector<double>& phi, const std::vector<std::vector<double>>& kernel) {
  const int n = static_cast<int>(phi.size());
  double np = std::sqrt(dot(phi.data(), phi.data(), n));
  if (np == 0.0) return 0.0;
  double best = 0.0;
  for (const auto& psi : kernel) {
    double nq = std::sqrt(dot(psi.data(), psi.data(), n));
    if (nq == 0.0) continue;
    best = std::max(best, std::abs(dot(phi.data(), psi.data(), n)) / (np * nq));
  }
  return best;
}

double weak_nondegeneracy_check(const Field& phi, const SymmetricSpectrum& s) {
  std::vector<std::vector<double>> kernel;
  for (int i : s.kernel_indices) kernel.push_back(s.vector(i));
  return kernel_overlap(phi.values, kernel);
}

double pseudo_inverse_form(const std::vector<double>& A, int n, const std::vector<double>& b, double theta) {
  std::vector<double> a = A;
  std::vector<double> w(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) fail(ErrorCode::EigenFailure, "dsyevd failed with info " + std::to_string(info));
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(w[i]) <= theta) continue;
    double c = dot(a.data() + static_cast<std::size_t>(i) * n, b.data(), n);
    acc += c * c / w[i];
  }
  if (!std::isfinite(acc)) fail(ErrorCode::SolveFailure, "pseudo-solve produced a non-finite value");
  return acc;
}

VKResult vk_quantity(const WaveProfile& pr, const OperatorMatrix& M, const SymmetricSpectrum& s,
                     double overlap_tol) {
  double ov = weak_nondegeneracy_check(pr.phi, s);
  if (ov > overlap_tol) {
    std::ostringstream os;
    os << "profile overlaps the numerical kernel (" << ov << " > " << overlap_tol << ")";
    fail(ErrorCode::KernelContamination, os.str());
  }
  const int n = M.dimension;
  const double dx = M.grid.spacing;
  VKResult r;
  r.Q = Field{M.grid, std::vector<double>(n, 0.0), true};
  std::vector<char> kernel(s.dimension, 0);
  for (int i : s.kernel_indices) kernel[i] = 1;
  double acc = 0.0;
  for (int i = 0; i < s.dimension; ++i) {
    if (kernel[i]) continue;
    const double* v = s.eigenvectors.data() + static_cast<std::size_t>(i) * n;
    double c = dot(v, pr.phi.values.data(), n);
    double a = c / s.eigenvalues[i];
    acc += c * a;
    for (int j = 0; j < n; ++j) r.Q.values[j] += a * v[j];
  }
  r.value = acc * dx;
  if (!std::isfinite(r.value)) fail(ErrorCode::SolveFailure, "VK pseudo-solve is not finite");
  Field LQ = M.apply(r.Q);
  double lqq = inner(LQ, r.Q);
  r.self_consistency = std::abs(lqq - r.value) / std::max(std::abs(r.value), 1e-300);
  return r;
}

FullSpectrum full_linearization_spectrum(const OperatorMatrix& M, double localized_pr) {
  const int n = M.dimension;
  if (n > 4096) fail(ErrorCode::EigenFailure, "dense non-symmetric problem capped at n = 4096");
  std::vector<double> A(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    Field col{M.grid, std::vector<double>(M.entries.begin() + static_cast<std::size_t>(j) * n,
                                          M.entries.begin() + static_cast<std::size_t>(j + 1) * n),
              true};
    Field d = deriv(col, 1);
    std::copy(d.values.begin(), d.values.end(), A.begin() + static_cast<std::size_t>(j) * n);
  }
  std::vector<double> work = A;
  std::vector<double> wr(n), wi(n), vr(static_cast<std::size_t>(n) * n);
  lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, wr.data(), wi.data(),
                                  nullptr, n, vr.data(), n);
  if (info != 0) fail(ErrorCode::EigenFailure, "dgeev failed with info " + std::to_string(info));

  FullSpectrum fs;
  fs.re = wr;
  fs.im = wi;
  fs.participation.assign(n, 1.0);
  for (int i = 0; i < n; ++i) fs.scale = std::max(fs.scale, std::hypot(wr[i], wi[i]));

  // eigenvector i as (real, imag) columns
  auto vec = [&](int i, std::vector<double>& zr, std::vector<double>& zi) {
    zr.assign(n, 0.0);
    zi.assign(n, 0.0);
    if (wi[i] == 0.0) {
      std::copy_n(vr.begin() + static_cast<std::size_t>(i) * n, n, zr.begin());
    } else {
      int base = (i > 0 && wi[i - 1] == -wi[i] && wi[i] < 0.0) ? i - 1 : i;
      double sgn = base == i ? 1.0 : -1.0;
      std::copy_n(vr.begin() + static_cast<std::size_t>(base) * n, n, zr.begin());
      for (int j = 0; j < n; ++j) zi[j] = sgn * vr[static_cast<std::size_t>(base + 1) * n + j];
    }
  };
  std::vector<double> zr, zi;
  for (int i = 0; i < n; ++i) {
    vec(i, zr, zi);
    double s2 = 0.0, s4 = 0.0;
    for (int j = 0; j < n; ++j) {
      double m = zr[j] * zr[j] + zi[j] * zi[j];
      s2 += m;
      s4 += m * m;
    }
    fs.participation[i] = s4 > 0.0 ? s2 * s2 / (n * s4) : 1.0;
  }

  const double tol = 1e-6 * fs.scale;
  fs.max_real_all = -1e300;
  fs.max_real_localized = -1e300;
  int best = -1;
  for (int i = 0; i < n; ++i) {
    fs.max_real_all = std::max(fs.max_real_all, wr[i]);
    if (fs.participation[i] < localized_pr) {
      if (wr[i] > fs.max_real_localized) {
        fs.max_real_localized = wr[i];
        best = i;
      }
      if (wr[i] > tol) ++fs.unstable_localized;
    }
  }
  if (best < 0) fs.max_real_localized = 0.0;
  else {
    vec(best, zr, zi);
    fs.certificate = zr;
  }

  // Hamiltonian pairing: -conj(mu) must belong to the spectrum
  double defect = 0.0;
  for (int i = 0; i < n; ++i) {
    double best_d = 1e300;
    for (int k = 0; k < n; ++k) best_d = std::min(best_d, std::hypot(wr[k] + wr[i], wi[k] - wi[i]));
    defect = std::max(defect, best_d);
  }
  fs.symmetry_defect = fs.scale > 0.0 ? defect / fs.scale : 0.0;

  // residuals of the ten eigenpairs with largest |Re|
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(wr[a]) > std::abs(wr[b]); });
  for (int t = 0; t < std::min(10, n); ++t) {
    int i = order[t];
    vec(i, zr, zi);
    std::vector<double> ar(n, 0.0), ai(n, 0.0);
    for (int j = 0; j < n; ++j) {
      const double* col = A.data() + static_cast<std::size_t>(j) * n;
      for (int k = 0; k < n; ++k) {
        ar[k] += col[k] * zr[j];
        ai[k] += col[k] * zi[j];
      }
    }
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
      double rr = ar[k] - (wr[i] * zr[k] - wi[i] * zi[k]);
      double ri = ai[k] - (wr[i] * zi[k] + wi[i] * zr[k]);
      num += rr * rr + ri * ri;
      den += zr[k] * zr[k] + zi[k] * zi[k];
    }
    fs.max_residual_top10 = std::max(fs.max_residual_top10, std::sqrt(num / den));
  }
  return fs;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::Unstable: return "Unstable";
  }
  return "Inconclusive";
}

VerdictResult decide_verdict(const VerdictInputs& in) {
  VerdictResult r;
  std::ostringstream os;
  if (in.max_real_localized > in.tol_real) {
    r.verdict = Verdict::Unstable;
    os << "localized eigenvalue with Re = " << in.max_real_localized << " > " << in.tol_real;
  } else if (std::abs(in.vk_value) <= in.tol_vk) {
    r.verdict = Verdict::Inconclusive;
    os << "|vk| = " << std::abs(in.vk_value) << " within tolerance " << in.tol_vk << " of zero";
  } else if (in.n_minus != 1) {
    r.verdict = Verdict::Inconclusive;
    os << "Morse index " << in.n_minus << " differs from 1";
  } else if (in.kernel_overlap > in.tol_overlap) {
    r.verdict = Verdict::Inconclusive;
    os << "kernel overlap " << in.kernel_overlap << " exceeds " << in.tol_overlap;
  } else if (in.vk_value < -in.tol_vk) {
    r.verdict = Verdict::Stable;
    os << "n_minus = 1, weakly non-degenerate, vk < 0";
  } else {
    r.verdict = Verdict::Inconclusive;
    os << "vk = " << in.vk_value << " is positive";
  }
  r.reason = os.str();
  return r;
}

SpectrumReport analyze_stability(const WaveProfile& pr, const StabilityOptions& opts) {
  OperatorMatrix M = assemble_lplus(pr);
  SymmetricSpectrum s = symmetric_spectrum(M);
  SpectrumReport rep;
  rep.eigenvalues_lplus = s.eigenvalues;
  rep.dimension = s.dimension;
  rep.n_minus = s.n_minus;
  rep.kernel_dim = s.kernel_dim;
  rep.positive = s.positive;
  rep.theta = s.theta;
  rep.symmetry_defect = M.symmetry_defect;

  Field dphi = deriv(pr.phi, 1);
  rep.translation_residual = norm_l2(M.apply(dphi)) / norm_l2(dphi);
  rep.quadratic_form = inner(M.apply(pr.phi), pr.phi);
  rep.quadratic_form_ref = -(pr.model.p - 1.0) * integral_F(pr.phi, pr.model, M.oversampling);
  rep.kernel_overlap = weak_nondegeneracy_check(pr.phi, s);
  {
    std::vector<std::vector<double>> kernel;
    for (int i : s.kernel_indices) kernel.push_back(s.vector(i));
    rep.kernel_translation_alignment = kernel_overlap(dphi.values, kernel);
  }

  rep.vk_tol = opts.vk_rel_tol * inner(pr.phi, pr.phi);
  std::string vk_error;
  try {
    VKResult vk = vk_quantity(pr, M, s, opts.overlap_tol);
    rep.vk_value = vk.value;
    rep.vk_self_consistency = vk.self_consistency;
    rep.nond_ok = std::abs(vk.value) > rep.vk_tol;
  } catch (const Error& e) {
    vk_error = e.what();
    rep.nond_ok = false;
  }

  if (opts.full_spectrum) {
    rep.full = full_linearization_spectrum(M, opts.localized_pr);
    rep.full_computed = true;
    rep.max_real_full = rep.full.max_real_localized;
  }

  VerdictInputs in;
  in.n_minus = rep.n_minus;
  in.kernel_overlap = rep.kernel_overlap;
  in.vk_value = rep.vk_value;
  in.max_real_localized = rep.full_computed ? rep.full.max_real_localized : 0.0;
  in.tol_overlap = opts.overlap_tol;
  in.tol_vk = rep.vk_tol;
  in.tol_real = rep.full_computed ? opts.real_rel_tol * rep.full.scale : 1e300;
  VerdictResult v = decide_verdict(in);
  rep.verdict = v.verdict;
  rep.reason = vk_error.empty() ? v.reason : vk_error;
  if (!vk_error.empty() && v.verdict == Verdict::Stable) rep.verdict = Verdict::Inconclusive;
  return rep;
}

}  // namespace ostrovsky

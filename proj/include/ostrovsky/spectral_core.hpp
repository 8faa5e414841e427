#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "ostrovsky/error.hpp"

namespace ostrovsky {

using cplx = std::complex<double>;

// Half-complex spectrum of a real array of length n: entries k = 0..n/2,
// unnormalized forward transform (sum_j f_j e^{-2 pi i jk/n}).
using Spectrum = std::vector<cplx>;

struct Grid {
  double half_length = 0.0;  // domain is [-L, L)
  int n = 0;
  double spacing = 0.0;

  double x(int j) const { return -half_length + j * spacing; }
  std::vector<double> nodes() const;
  // xi_k = pi k / L for the half spectrum index k = 0..n/2
  double xi(int k) const;
  // all wavenumbers in the order k = -n/2 .. n/2-1
  std::vector<double> wavenumbers() const;
  double nyquist() const { return xi(n / 2); }

  bool operator==(const Grid& o) const { return half_length == o.half_length && n == o.n; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

Grid make_grid(double half_length, int n);

struct Field {
  Grid grid;
  std::vector<double> values;
  bool mean_free = false;

  double mean() const;
  double max_abs() const;
  int size() const { return grid.n; }
};

Field make_field(const Grid& grid, const std::function<double(double)>& f, bool mean_free = false);
Field zero_field(const Grid& grid);

// Thread-safe transforms with a shared plan cache.
Spectrum rfft(const std::vector<double>& f);
Spectrum rfft(const double* f, int n);
std::vector<double> irfft(const Spectrum& c, int n);
void irfft(const Spectrum& c, int n, double* out);

bool has_zero_mean(const Field& f);
void require_same_grid(const Field& a, const Field& b);

Field project_zero_mean(const Field& f);
Field deriv(const Field& f, int order);
Field apply_symbol(const Field& f, const std::function<double(double)>& symbol);
Field resolvent_biquadratic(const Field& f, double omega);
// (d^4 + omega d^2 + 1) f
Field biquadratic_operator(const Field& f, double omega);
double decay_rate_kappa(double omega);

double inner(const Field& f, const Field& g);
double norm_l2(const Field& f);
double norm_sobolev(const Field& f, double s);

// f(x - s), evaluated through the trigonometric interpolant
Field translate(const Field& f, double s);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double a, const Field& f);

}  // namespace ostrovsky

#pragma once

#include <string>
#include <vector>

#include "ostrovsky/spectral_core.hpp"

namespace ostrovsky {

// AbsPower: nonlinearity |u|^p, p in (1,3).  SignedPower: |u|^{p-1}u, p in (1,5).
enum class Family { AbsPower, SignedPower };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

struct Model {
  Family family = Family::SignedPower;
  double p = 2.0;

  double p_min() const { return 1.0; }
  double p_max() const { return family == Family::AbsPower ? 3.0 : 5.0; }
  // N(u), the term appearing in the profile equation
  double N(double u) const;
  // F(u) with F' = (p+1) N
  double F(double u) const;
  // V(u) = N'(u), the potential of the linearization
  double V(double u) const;
  // true when N is a polynomial in u
  bool polynomial() const;
};

Model make_model(Family family, double p);

// Oversampling factor used for quadrature of the nonlinear terms.
int default_oversampling(const Model& m);

// Galerkin transfer between the n-mode space and an R-times finer grid.
// down is the adjoint of up (scaled by 1/R) in the nodal inner products,
// so Galerkin operators assembled with it are exactly symmetric.
class Oversampler {
 public:
  Oversampler(int n, int R);
  int n() const { return n_; }
  int R() const { return R_; }
  int fine_size() const { return n_ * R_; }
  std::vector<double> up(const Spectrum& c) const;
  Spectrum down(const std::vector<double>& fine) const;

 private:
  int n_;
  int R_;
};

struct EnergyParts {
  double quadratic = 0.0;  // 1/2 (||u'||^2 + ||d^{-1}u||^2)
  double nonlinear = 0.0;  // 1/(p+1) int F(u)
  double total() const { return quadratic - nonlinear; }
};

// Oversampling R = 0 selects default_oversampling(model).
EnergyParts energy_parts_second_order(const Field& u, const Model& model, int R = 0);
double energy_second_order(const Field& u, const Model& model, int R = 0);
// I[v] = 1/2 int |v''|^2 + |v|^2 - 1/(p+1) int F(v').  Equals the second-order
// energy of v' when v is mean-free and carries no Nyquist content.
double energy_fourth_order(const Field& v, const Model& model, int R = 0);

// -u'' - d^{-2}u - P N(u)
Field gradient_second_order(const Field& u, const Model& model, int R = 0);
// Galerkin projection P N(u) of the nonlinearity onto the grid space
Field nonlinear_term(const Field& u, const Model& model, int R = 0);
// integral of F(u) with oversampled quadrature
double integral_F(const Field& u, const Model& model, int R = 0);

double omega_multiplier(const Field& u, double lambda, const Model& model, int R = 0);

struct WaveProfile {
  Model model;
  double lambda = 0.0;
  double omega = 0.0;
  Field phi;
  double el_residual = 0.0;
  int iterations = 0;
  int oversampling = 1;
  double energy = 0.0;
  double parity_defect = 0.0;
  double boundary_ratio = 0.0;
  std::vector<double> energy_history;
};

// phi'' + d^{-2}phi + omega phi + N(phi), mean-projected
Field el_residual_field(const WaveProfile& profile);
double el_residual_second_order(const WaveProfile& profile);
double el_residual_fourth_order(const WaveProfile& profile);

}  // namespace ostrovsky

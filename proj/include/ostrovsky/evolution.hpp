#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ostrovsky/functionals.hpp"

namespace ostrovsky {

struct EvolutionOptions {
  int oversampling = 0;         // 0: exact factor for polynomial N, else min(default, 8)
  double sample_interval = 0.05;
  bool linear_only = false;     // drop the nonlinearity
  double blowup_factor = 1e3;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> mass;              // int u^2 / 2
  std::vector<double> energy;
  std::vector<double> orbital_distance;  // present with a reference profile
  std::vector<double> traveling_error;   // ||u(t) - phi(x - omega t)|| / ||phi||, with a reference
  Field final_state;
  std::optional<double> blowup_time;
  int steps = 0;

  double mass_drift() const;    // max_t |m(t) - m(0)| / m(0)
  double energy_drift() const;  // max_t |E(t) - E(0)| / |E(0)|
};

// Exponential RK4 (Cox-Matthews) for u_t = u_xxx + d/dx N(u) + d^{-1} u; the
// dispersive part is propagated exactly.
EvolutionTrace integrate(const Field& u0, const Model& model, double T, double dt,
                         const WaveProfile* reference = nullptr, const EvolutionOptions& opts = {});

struct OrbitalDistance {
  double distance = 0.0;
  double shift = 0.0;  // u(x + shift) is closest to phi
};

OrbitalDistance orbital_distance(const Field& u, const Field& phi);

// ||u - phi(x - omega t)|| / ||phi||
double traveling_wave_error(const Field& u, const WaveProfile& profile, double t);

// Smooth mean-free random field of unit L2 norm.
Field smooth_noise(const Grid& grid, std::uint64_t seed, double xi_cut = 2.0);

struct PerturbationResult {
  double delta = 0.0;
  double ratio = 0.0;  // sup_t distance / (delta ||phi||); NaN in traveling-wave mode
  bool traveling_wave_mode = false;
  double max_traveling_error = 0.0;
  EvolutionTrace trace;
};

PerturbationResult perturbation_experiment(const WaveProfile& profile, double delta, double T, double dt,
                                           std::uint64_t seed, const EvolutionOptions& opts = {});

}  // namespace ostrovsky

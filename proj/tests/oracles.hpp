#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

// Reference computations that share no code with the library.
namespace oracle {

// Finite-difference weights for the derivative of order m at 0 on the integer
// stencil -r..r (Fornberg's recursion).
std::vector<double> fd_weights(int m, int r);

// Solve (d^4 + omega d^2 + 1) u = f on a periodic grid of spacing h with
// centered stencils of half-width r, by dense LU.
std::vector<double> fd_biquadratic_solve(const std::vector<double>& f, double h, double omega, int r = 6);

// Spectral derivative of order m (negative for antiderivatives, zero mode dropped)
// by direct O(n^2) trigonometric sums on [-L, L).
std::vector<double> dft_derivative(const std::vector<double>& f, double L, int m);

// Independent constrained minimizer on the even subspace u = sum_{k=1}^K a_k cos(pi k x / L):
// derivative-free coordinate search with parabolic line fits, starting from a random
// smooth seed.  The nonlinear integral uses a midpoint rule with M points.
struct CoarseMinimum {
  double energy = 0.0;
  std::vector<double> coeffs;
  int sweeps = 0;
};
CoarseMinimum coarse_minimize(bool signed_family, double p, double lambda, double L, int K, int M,
                              std::uint64_t seed, int max_sweeps = 4000, double tol = 1e-14);

// Composite Simpson rule with m panels.
double simpson(const std::function<double(double)>& f, double a, double b, int m);

// sum_{j} int_{j eps}^{j eps + eps/N} f restricted to [a, b], with fine Simpson panels per cell.
double partial_sampling_sum(const std::function<double(double)>& f, double eps, int N, double a, double b,
                            int panels_per_cell);

// Inverse of a 3x3 matrix through the adjugate.
std::array<double, 9> inverse3(const std::array<double, 9>& a);

}  // namespace oracle

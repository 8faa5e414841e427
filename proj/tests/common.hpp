#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <tuple>

#include "ostrovsky/io.hpp"

namespace testing_util {

using namespace ostrovsky;

// Converged profile on the automatic box, computed once per process.
inline const WaveProfile& profile(Family f, double p, double lambda) {
  static std::map<std::tuple<int, double, double>, WaveProfile> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(static_cast<int>(f), p, lambda);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, minimize_auto(make_model(f, p), lambda, GridSpec{})).first;
  return it->second;
}

inline const WaveProfile& reference_profile() { return profile(Family::SignedPower, 2.0, 1.0); }

// mean-free, Nyquist-free random field with Gaussian spectral envelope around xi0
inline Field random_smooth(const Grid& g, std::mt19937_64& rng, double xi0 = 1.0, double width = 1.0) {
  std::normal_distribution<double> nd;
  Spectrum c(g.n / 2 + 1, 0.0);
  for (int k = 1; k < g.n / 2; ++k) {
    double d = (g.xi(k) - xi0) / width;
    c[k] = cplx(nd(rng), nd(rng)) * std::exp(-0.5 * d * d);
  }
  Field f{g, irfft(c, g.n), true};
  return (1.0 / norm_l2(f)) * f;
}

inline Field reflect(const Field& f) {
  Field r = f;
  const int n = f.grid.n;
  for (int j = 0; j < n; ++j) r.values[j] = f.values[(n - j) % n];
  return r;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// code of the Error raised by fn, if any
template <class F>
std::optional<ErrorCode> error_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testing_util

#pragma once

// Closed forms and brute-force evaluators used as independent references.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bogolab/bogolab.hpp"

namespace bogolab::oracle {

// 1/(e^x - 1), written out instead of calling the library helper.
inline double n_bose(double x) { return 1.0 / (std::exp(x) - 1.0); }

// Free single-mode displaced oscillator -mu n - g (a + a*), mu < 0:
// pressure, <a>, <n>.
struct DisplacedOscillator {
  double beta, mu, g;
  double shift() const { return g * g / (-mu); }
  double log_z() const { return -std::log(1.0 - std::exp(beta * mu)) + beta * shift(); }
  double mean_a() const { return g / (-mu); }
  double mean_n() const { return mean_a() * mean_a() + n_bose(-beta * mu); }
};

// Free lattice gas pressure with all modes untruncated.
inline double free_pressure(int L, double t, double beta, double mu, double nu) {
  double log_z = 0.0;
  for (int j = 0; j < L; ++j) {
    const double k = 2.0 * M_PI * j / L;
    const double eps = 2.0 * t * (1.0 - std::cos(k));
    log_z += -std::log(1.0 - std::exp(-beta * (eps - mu)));
  }
  // Mode 0 sees the field g = nu sqrt(L).
  log_z += beta * nu * nu * L / (-mu);
  return log_z / (beta * L);
}

// <psi| U |psi> for an occupation state, evaluated in real space: the
// momentum state is expanded into site configurations by brute force and the
// pair potential sum_{x,y} phi(x-y) n_x (n_y - delta_xy) / 2 is averaged.
// Only the diagonal of U in the momentum basis is reachable this way, which
// is all the oracle needs.
inline double real_space_interaction_expectation(const LatticeModelSpec& spec, const std::vector<int>& occ) {
  const int L = spec.L;
  std::vector<int> modes;
  for (int k = 0; k < L; ++k) {
    for (int c = 0; c < occ[static_cast<std::size_t>(k)]; ++c) modes.push_back(k);
  }
  const int n = static_cast<int>(modes.size());
  // Amplitude of site tuple (x_1..x_n): sum over permutations of product of
  // plane waves, normalized below. Done by direct enumeration of ordered tuples.
  std::vector<int> x(static_cast<std::size_t>(n), 0);
  std::vector<int> perm(static_cast<std::size_t>(n));
  double norm = 0.0, energy = 0.0;
  std::size_t tuples = 1;
  for (int i = 0; i < n; ++i) tuples *= static_cast<std::size_t>(L);
  for (std::size_t code = 0; code < tuples; ++code) {
    std::size_t c = code;
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = static_cast<int>(c % static_cast<std::size_t>(L));
      c /= static_cast<std::size_t>(L);
    }
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::complex<double> amp = 0.0;
    do {
      std::complex<double> term = 1.0;
      for (int i = 0; i < n; ++i) {
        const double k = 2.0 * M_PI * modes[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] / L;
        term *= std::polar(1.0, k * x[static_cast<std::size_t>(i)]);
      }
      amp += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double w = std::norm(amp);
    double u = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) u += spec.phi_at(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
    }
    norm += w;
    energy += w * u;
  }
  return norm > 0.0 ? energy / norm : 0.0;
}

// Normalized complex Gaussian vector.
inline std::vector<Complex> random_unit_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(dim);
  double n2 = 0.0;
  for (auto& z : v) {
    z = {g(rng), g(rng)};
    n2 += std::norm(z);
  }
  for (auto& z : v) z /= std::sqrt(n2);
  return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace bogolab::oracle

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bogolab/error.hpp"

namespace bogolab {

inline constexpr std::size_t kDefaultDimLimit = 20000;

// One finite periodic lattice gas in a gauge-breaking field.
//
// The lattice has L sites, which plays the role of the volume. Mode j has
// momentum k_j = 2*pi*j/L; mode 0 is the uniform one-particle state 1/sqrt(L).
// The pair potential table phi[r] covers r = 0..floor(L/2) and is extended
// periodically, phi(r) = phi(L - r). Missing entries are zero; entries past
// floor(L/2) are ignored.
struct LatticeModelSpec {
  int L = 1;
  int n_cap = 1;
  double t = 0.0;
  std::vector<double> phi;
  double beta = 1.0;
  double mu = 0.0;
  double mu0 = 0.0;
  double nu = 0.0;

  void validate() const {
    std::ostringstream msg;
    if (L < 1) msg << "L must be >= 1 (got " << L << "). ";
    // n_cap = 0 is accepted as the degenerate vacuum-only space.
    if (n_cap < 0) msg << "n_cap must be >= 0 (got " << n_cap << "). ";
    if (n_cap > 65535) msg << "n_cap must fit in 16 bits (got " << n_cap << "). ";
    if (!(beta > 0.0) || !std::isfinite(beta)) msg << "beta must be positive and finite. ";
    for (double v : {t, mu, mu0, nu}) {
      if (!std::isfinite(v)) {
        msg << "couplings must be finite. ";
        break;
      }
    }
    for (double v : phi) {
      if (!std::isfinite(v)) {
        msg << "phi entries must be finite. ";
        break;
      }
    }
    if (!msg.str().empty()) throw ConfigError("invalid LatticeModelSpec: " + msg.str());
  }

  double volume() const { return static_cast<double>(L); }
  double sqrt_volume() const { return std::sqrt(static_cast<double>(L)); }

  // Periodic, reflection-symmetric lookup of the pair potential.
  double phi_at(int r) const {
    int m = ((r % L) + L) % L;
    m = std::min(m, L - m);
    return m < static_cast<int>(phi.size()) ? phi[static_cast<std::size_t>(m)] : 0.0;
  }

  bool is_free() const {
    for (int r = 0; r <= L / 2; ++r) {
      if (phi_at(r) != 0.0) return false;
    }
    return true;
  }

  double momentum(int j) const { return 2.0 * std::numbers::pi * j / L; }

  // eps_k = 2t(1 - cos k), mirrored so that eps_j == eps_{L-j} bit for bit.
  double dispersion(int j) const {
    int m = ((j % L) + L) % L;
    m = std::min(m, L - m);
    if (m == 0) return 0.0;
    return 2.0 * t * (1.0 - std::cos(momentum(m)));
  }

  // Fourier transform v_q = sum_r phi(r) e^{-iqr}; real because phi is even.
  std::vector<double> potential_fourier() const {
    std::vector<double> v(static_cast<std::size_t>(L), 0.0);
    for (int q = 0; q <= L / 2; ++q) {
      double s = 0.0;
      for (int r = 0; r < L; ++r) s += phi_at(r) * std::cos(momentum(q) * r);
      v[static_cast<std::size_t>(q)] = s;
      v[static_cast<std::size_t>((L - q) % L)] = s;
    }
    return v;
  }
};

// Bose occupation 1/(e^x - 1).
inline double bose_occupation(double x) { return 1.0 / std::expm1(x); }

}  // namespace bogolab

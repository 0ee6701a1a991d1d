#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "bogolab/error.hpp"
#include "bogolab/model.hpp"

namespace bogolab {

// Lower bound U >= -b n + a n^2 / L checked on sampled configurations.
struct SuperstabilityBound {
  double a = 0.0;
  double b = 0.0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::vector<int> worst_positions;
  long long configurations = 0;
  bool pass = false;
};

// Total pair energy sum_{i<j} phi(r_i - r_j) of particles at lattice sites.
inline double pair_energy(const LatticeModelSpec& spec, const std::vector<int>& positions) {
  double u = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) u += spec.phi_at(positions[i] - positions[j]);
  }
  return u;
}

inline double superstability_slack(const LatticeModelSpec& spec, double a, double b,
                                   const std::vector<int>& positions) {
  const double n = static_cast<double>(positions.size());
  return pair_energy(spec, positions) - (-b * n + a * n * n / spec.L);
}

// Constants a = phi(0)/2, b = phi(0)/2 + sum_{r != 0} |phi(r)| over the ring.
// Every n in [n_min, n_max] is tested with the all-on-one-site and the
// round-robin configurations plus samples_per_n uniform random placements.
inline SuperstabilityBound superstability_check(const LatticeModelSpec& spec, std::pair<int, int> n_range,
                                                int samples_per_n, std::uint64_t seed) {
  spec.validate();
  if (!(spec.phi_at(0) > 0.0)) {
    throw PreconditionError("superstability_check requires an on-site repulsion phi(0) > 0");
  }
  if (n_range.first < 0 || n_range.second < n_range.first) {
    throw PreconditionError("superstability_check: invalid particle-number range");
  }
  SuperstabilityBound out;
  out.a = spec.phi_at(0) / 2.0;
  double off = 0.0;
  for (int r = 1; r < spec.L; ++r) off += std::abs(spec.phi_at(r));
  out.b = spec.phi_at(0) / 2.0 + off;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> site(0, spec.L - 1);
  auto consider = [&](const std::vector<int>& pos) {
    const double s = superstability_slack(spec, out.a, out.b, pos);
    ++out.configurations;
    if (s < out.worst_slack) {
      out.worst_slack = s;
      out.worst_positions = pos;
    }
  };
  std::vector<int> pos;
  for (int n = n_range.first; n <= n_range.second; ++n) {
    pos.assign(static_cast<std::size_t>(n), 0);
    consider(pos);
    for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(i)] = i % spec.L;
    consider(pos);
    for (int s = 0; s < samples_per_n; ++s) {
      for (int& p : pos) p = site(rng);
      consider(pos);
    }
  }
  out.pass = out.worst_slack >= 0.0;
  return out;
}

}  // namespace bogolab

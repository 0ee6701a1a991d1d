#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "bogolab/error.hpp"
#include "bogolab/model.hpp"
#include "bogolab/operators.hpp"
#include "bogolab/sparse_operator.hpp"
#include "bogolab/spectrum.hpp"

namespace bogolab {

// log Tr e^{-beta H}, shifted by the ground energy so nothing overflows.
inline double log_partition(const Spectrum& s, double beta) {
  const double e0 = s.ground_energy();
  double sum = 0.0;
  for (double e : s.eigenvalues()) sum += std::exp(-beta * (e - e0));
  return std::log(sum) - beta * e0;
}

// (beta L)^{-1} log Tr e^{-beta H}
inline double pressure(const LatticeModelSpec& spec, const Spectrum& s) {
  return log_partition(s, spec.beta) / (spec.beta * spec.L);
}

// Gibbs weights e^{-beta E}/Z laid out like the spectrum's blocks.
class GibbsState {
 public:
  GibbsState(const Spectrum& s, double beta) : spectrum_(&s), beta_(beta) {
    if (!s.has_vectors()) throw PreconditionError("thermal averages need eigenvectors");
    const double e0 = s.ground_energy();
    double z = 0.0;
    for (double e : s.eigenvalues()) z += std::exp(-beta * (e - e0));
    weights_.reserve(s.blocks().size());
    for (const auto& b : s.blocks()) {
      Eigen::VectorXd w(b.energies.size());
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::exp(-beta * (b.energies(i) - e0)) / z;
      weights_.push_back(std::move(w));
    }
    location_ = s.locate();
  }

  double beta() const { return beta_; }

  // Tr(e^{-beta H} A) / Tr e^{-beta H}
  Complex expectation(const SparseOperator& a) const {
    if (a.dim() != spectrum_->dim()) {
      throw PreconditionError("thermal_expectation: operator dim " + std::to_string(a.dim()) +
                              " != spectrum dim " + std::to_string(spectrum_->dim()));
    }
    Complex acc = 0.0;
    const auto& blocks = spectrum_->blocks();
    for (const auto& e : a.entries()) {
      const auto [br, lr] = location_[e.row];
      const auto [bc, lc] = location_[e.col];
      if (br != bc) continue;
      const SpectralBlock& b = blocks[br];
      const Eigen::VectorXd& w = weights_[br];
      const auto r = static_cast<Eigen::Index>(lr);
      const auto c = static_cast<Eigen::Index>(lc);
      if (b.is_complex) {
        Complex s = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
          s += w(i) * std::conj(b.complex_vectors(r, i)) * b.complex_vectors(c, i);
        }
        acc += e.value * s;
      } else {
        double s = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) s += w(i) * b.vectors(r, i) * b.vectors(c, i);
        acc += e.value * s;
      }
    }
    return acc;
  }

 private:
  const Spectrum* spectrum_;
  double beta_;
  std::vector<Eigen::VectorXd> weights_;
  std::vector<std::pair<std::size_t, std::size_t>> location_;
};

inline Complex thermal_expectation(const Spectrum& s, const SparseOperator& a, double beta) {
  return GibbsState(s, beta).expectation(a);
}

struct ThermalObservables {
  double log_Z = 0.0;
  double Z = 0.0;  // may be +inf when log_Z is large; log_Z is authoritative
  double p_V = 0.0;
  Complex a0_mean = 0.0;
  double N0_mean = 0.0;
  double N_mean = 0.0;
  double b0_fluct = 0.0;  // <N0> - |<a0>|^2 = <b0* b0>
};

inline ThermalObservables observables_bundle(const LatticeModelSpec& spec, const Spectrum& s,
                                             const std::map<std::string, const SparseOperator*>& ops) {
  for (const char* key : {"a0", "N0", "N"}) {
    if (!ops.contains(key) || ops.at(key) == nullptr) {
      throw PreconditionError(std::string("observables_bundle: missing operator '") + key + "'");
    }
  }
  GibbsState g(s, spec.beta);
  ThermalObservables o;
  o.log_Z = log_partition(s, spec.beta);
  o.Z = std::exp(o.log_Z);
  o.p_V = o.log_Z / (spec.beta * spec.L);
  o.a0_mean = g.expectation(*ops.at("a0"));
  o.N0_mean = g.expectation(*ops.at("N0")).real();
  o.N_mean = g.expectation(*ops.at("N")).real();
  o.b0_fluct = o.N0_mean - std::norm(o.a0_mean);
  return o;
}

// One finite-volume derivative identity checked by central differences at
// steps h and h/2.
struct DerivativeIdentity {
  double exact = 0.0;          // thermal average side
  double fd_h = 0.0;           // derivative side at step h
  double fd_half = 0.0;        // derivative side at step h/2
  double residual_h = 0.0;     // |exact - fd_h|
  double residual_half = 0.0;  // |exact - fd_half|
  double ratio = 0.0;          // residual_h / residual_half, ~4 where smooth
  double error_bound = 0.0;    // C h^2 + 1e-8, C from step halving
  bool exact_to_roundoff = false;
  bool smooth = false;
  bool pass = false;
};

struct DerivativeIdentityReport {
  double h = 0.0;
  DerivativeIdentity nu;   // <a0>/sqrt(L) vs (1/2) dp'/dnu
  DerivativeIdentity mu0;  // <N0>/L vs dp'/dmu0
  bool pass() const { return nu.pass && mu0.pass; }
};

namespace detail {

inline constexpr double kRoundoffFloor = 1e-10;

inline DerivativeIdentity finish_identity(double exact, double fd_h, double fd_half) {
  DerivativeIdentity d;
  d.exact = exact;
  d.fd_h = fd_h;
  d.fd_half = fd_half;
  d.residual_h = std::abs(exact - fd_h);
  d.residual_half = std::abs(exact - fd_half);
  d.ratio = d.residual_half > 0.0 ? d.residual_h / d.residual_half
                                  : std::numeric_limits<double>::infinity();
  d.error_bound = 4.0 / 3.0 * std::abs(fd_h - fd_half) + 1e-8;
  // A locally quadratic pressure makes the central difference exact, and the
  // ratio is then pure round-off.
  d.exact_to_roundoff = d.residual_h <= kRoundoffFloor;
  d.smooth = d.exact_to_roundoff || (d.ratio >= 3.0 && d.ratio <= 5.0);
  d.pass = d.residual_h <= d.error_bound;
  return d;
}

}  // namespace detail

// Checks <a0>/sqrt(L) = (1/2) dp'_V/dnu and <N0>/L = dp'_V/dmu0 for the
// auxiliary Hamiltonian H' at (spec.mu, spec.mu0, spec.nu).
// A spectrum of H' at the point may be passed in to skip one diagonalization.
inline DerivativeIdentityReport derivative_identity_check(const LatticeModelSpec& spec,
                                                          const HamiltonianParts& parts, double h_step,
                                                          std::size_t block_limit = kDefaultDimLimit,
                                                          const Spectrum* at_point = nullptr) {
  if (!(h_step > 0.0)) throw PreconditionError("derivative_identity_check: h_step must be positive");
  auto p_at = [&](double mu0, double nu) {
    const SparseOperator hp = compose_hamiltonian(parts, Variant::Hprime, spec.mu, mu0, nu);
    DiagonalizeOptions opt;
    opt.vectors = false;
    opt.block_limit = block_limit;
    opt.label = "H'";
    return pressure(spec, diagonalize(hp, opt));
  };
  Spectrum own;
  if (at_point == nullptr) {
    const SparseOperator hp = compose_hamiltonian(parts, Variant::Hprime, spec.mu, spec.mu0, spec.nu);
    DiagonalizeOptions opt;
    opt.block_limit = block_limit;
    opt.label = "H'";
    own = diagonalize(hp, opt);
    at_point = &own;
  }
  GibbsState g(*at_point, spec.beta);

  // a0 = X / (2 sqrt L) on the real axis; Re<a0> = <X>/(2 sqrt L).
  const double a0 = g.expectation(parts.X).real() / (2.0 * spec.sqrt_volume());
  const double n0 = g.expectation(parts.N0).real();

  DerivativeIdentityReport r;
  r.h = h_step;
  const double h = h_step;
  const double h2 = h_step / 2.0;
  const double dnu_h = (p_at(spec.mu0, spec.nu + h) - p_at(spec.mu0, spec.nu - h)) / (2.0 * h);
  const double dnu_h2 = (p_at(spec.mu0, spec.nu + h2) - p_at(spec.mu0, spec.nu - h2)) / (2.0 * h2);
  const double dmu_h = (p_at(spec.mu0 + h, spec.nu) - p_at(spec.mu0 - h, spec.nu)) / (2.0 * h);
  const double dmu_h2 = (p_at(spec.mu0 + h2, spec.nu) - p_at(spec.mu0 - h2, spec.nu)) / (2.0 * h2);
  r.nu = detail::finish_identity(a0 / spec.sqrt_volume(), 0.5 * dnu_h, 0.5 * dnu_h2);
  r.mu0 = detail::finish_identity(n0 / spec.L, dmu_h, dmu_h2);
  return r;
}

}  // namespace bogolab

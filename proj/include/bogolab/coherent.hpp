#pragma once

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <span>
#include <unordered_map>
#include <string>
#include <vector>

#include "bogolab/error.hpp"
#include "bogolab/fock_basis.hpp"
#include "bogolab/model.hpp"
#include "bogolab/sparse_operator.hpp"
#include "bogolab/spectrum.hpp"

namespace bogolab {

inline constexpr double kDefaultTolTrunc = 1e-10;

// Coherent state |C> = e^{-C^2/2} sum_n C^n / sqrt(n!) |n> cut at n_cap and
// renormalized. tail_mass is the Poisson weight dropped by the cut.
struct CoherentVector {
  double C = 0.0;
  int n_cap = 0;
  std::vector<double> amplitudes;
  double tail_mass = 0.0;
  bool renormalized = false;
  double eigen_residual = 0.0;  // ||(a - C) v|| with the truncated ladder
  double eigen_bound = 0.0;     // 2 sqrt(tail_mass) (|C| + sqrt(n_cap + 1))

  double mean_annihilation() const {
    double s = 0.0;
    for (std::size_t n = 0; n + 1 < amplitudes.size(); ++n) {
      s += amplitudes[n] * amplitudes[n + 1] * std::sqrt(static_cast<double>(n + 1));
    }
    return s;
  }
};

namespace detail {

// Poisson weights e^{-C^2} C^{2n}/n! above n_cap, summed until negligible.
inline double coherent_tail(double C, int n_cap) {
  const double x = C * C;
  if (x == 0.0) return 0.0;
  // log weight of level n_cap + 1
  double logw = -x + (n_cap + 1) * std::log(x) - std::lgamma(n_cap + 2.0);
  double w = std::exp(logw);
  double tail = 0.0;
  for (int n = n_cap + 1; n < n_cap + 100000; ++n) {
    tail += w;
    w *= x / (n + 1);
    if (w <= tail * 1e-18 || w == 0.0) break;
  }
  return tail;
}

inline int required_cap(double C, double tol) {
  int cap = 0;
  while (coherent_tail(C, cap) >= tol) ++cap;
  return cap;
}

}  // namespace detail

inline CoherentVector coherent_vector(double C, int n_cap, double tol_trunc = kDefaultTolTrunc) {
  if (n_cap < 0) throw PreconditionError("coherent_vector: n_cap must be >= 0");
  CoherentVector v;
  v.C = C;
  v.n_cap = n_cap;
  v.tail_mass = detail::coherent_tail(C, n_cap);
  if (!(v.tail_mass < tol_trunc)) {
    const int need = detail::required_cap(C, tol_trunc);
    char msg[200];
    std::snprintf(msg, sizeof msg,
                  "coherent vector C=%.6g at n_cap=%d drops tail mass %.3g >= tol_trunc %.3g; n_cap >= %d required", C,
                  n_cap, v.tail_mass, tol_trunc, need);
    throw TruncationError(msg, need);
  }
  v.amplitudes.resize(static_cast<std::size_t>(n_cap) + 1);
  double c = std::exp(-0.5 * C * C);
  double norm2 = 0.0;
  for (int n = 0; n <= n_cap; ++n) {
    v.amplitudes[static_cast<std::size_t>(n)] = c;
    norm2 += c * c;
    c *= C / std::sqrt(static_cast<double>(n + 1));
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& a : v.amplitudes) a *= inv;
  v.renormalized = true;

  // (a - C) v: only the top level misses its partner under the cut.
  double r2 = 0.0;
  for (int n = 0; n <= n_cap; ++n) {
    const double lowered = n < n_cap ? v.amplitudes[static_cast<std::size_t>(n) + 1] * std::sqrt(n + 1.0) : 0.0;
    const double d = lowered - C * v.amplitudes[static_cast<std::size_t>(n)];
    r2 += d * d;
  }
  v.eigen_residual = std::sqrt(r2);
  v.eigen_bound = 2.0 * std::sqrt(v.tail_mass) * (std::abs(C) + std::sqrt(n_cap + 1.0));
  return v;
}

// psi (an Fprime vector) tensored with the coherent mode-0 vector, as a Full
// basis vector.
inline std::vector<Complex> embed_product(std::span<const Complex> psi, const FockBasis& fprime,
                                          const CoherentVector& cv, const FockBasis& full) {
  if (full.subspace() != Subspace::Full || fprime.subspace() != Subspace::Fprime) {
    throw PreconditionError("embed_product: expected an Fprime and a Full basis");
  }
  if (!full.same_shape(fprime) || cv.n_cap != full.n_cap()) {
    throw PreconditionError("embed_product: basis mismatch between " + fprime.id() + ", " + full.id() +
                            " and coherent cap " + std::to_string(cv.n_cap));
  }
  if (psi.size() != fprime.dim()) throw PreconditionError("embed_product: psi has the wrong dimension");
  std::vector<Complex> out(full.dim(), 0.0);
  for (int n0 = 0; n0 <= cv.n_cap; ++n0) {
    const double c = cv.amplitudes[static_cast<std::size_t>(n0)];
    if (c == 0.0) continue;
    for (std::size_t j = 0; j < psi.size(); ++j) out[full.full_index(j, n0)] = c * psi[j];
  }
  return out;
}


struct DisplacedTrace {
  double pressure = 0.0;   // (beta L)^{-1} log Tr W0(C)
  double log_trace = 0.0;  // log Tr W0(C)
  double tail_mass = 0.0;
};

// Tr W0(C) = sum over the Fprime basis of <psi x C| e^{-beta H} |psi x C>,
// evaluated as sum_i e^{-beta E_i} <v_i| (|C><C| x 1') |v_i>.
inline DisplacedTrace displaced_trace_pressure(const LatticeModelSpec& spec, const FockBasis& full,
                                               const Spectrum& s, double C,
                                               double tol_trunc = kDefaultTolTrunc) {
  if (full.subspace() != Subspace::Full) {
    throw PreconditionError("displaced_trace_pressure needs the Full basis, got " + full.id());
  }
  if (s.dim() != full.dim()) throw PreconditionError("displaced_trace_pressure: spectrum/basis mismatch");
  if (!s.has_vectors()) throw PreconditionError("displaced_trace_pressure needs eigenvectors");
  const CoherentVector cv = coherent_vector(C, full.n_cap(), tol_trunc);
  const std::size_t stride = full.full_index(0, 1);
  const double beta = spec.beta;
  const double e0 = s.ground_energy();

  double sum = 0.0;
  for (const auto& b : s.blocks()) {
    // Rows of the projection: the distinct Fprime ordinals reached by the block.
    std::unordered_map<std::size_t, Eigen::Index> row_of;
    std::vector<std::pair<Eigen::Index, double>> weight(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::size_t idx = b.indices[i];
      const std::size_t j = idx % stride;
      const auto n0 = static_cast<std::size_t>(idx / stride);
      auto [it, fresh] = row_of.try_emplace(j, static_cast<Eigen::Index>(row_of.size()));
      (void)fresh;
      weight[i] = {it->second, cv.amplitudes[n0]};
    }
    const auto rows = static_cast<Eigen::Index>(row_of.size());
    const auto m = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(rows, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& [r, c] = weight[static_cast<std::size_t>(i)];
      proj(r, i) = c;
    }
    Eigen::VectorXd overlap(m);
    if (b.is_complex) {
      overlap = (proj.cast<Complex>() * b.complex_vectors).colwise().squaredNorm().transpose();
    } else {
      overlap = (proj * b.vectors).colwise().squaredNorm().transpose();
    }
    for (Eigen::Index i = 0; i < m; ++i) sum += std::exp(-beta * (b.energies(i) - e0)) * overlap(i);
  }
  DisplacedTrace out;
  out.log_trace = std::log(sum) - beta * e0;
  out.pressure = out.log_trace / (beta * spec.L);
  out.tail_mass = cv.tail_mass;
  return out;
}

}  // namespace bogolab

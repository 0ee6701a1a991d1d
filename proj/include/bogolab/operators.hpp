#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bogolab/error.hpp"
#include "bogolab/fock_basis.hpp"
#include "bogolab/model.hpp"
#include "bogolab/sparse_operator.hpp"

namespace bogolab {

enum class LadderKind { Create, Annihilate };
enum class Variant { H, Hprime };

inline const char* to_string(Variant v) { return v == Variant::H ? "H" : "Hprime"; }

namespace detail {

// Applies a_{mode} (lower) or a*_{mode} (raise) in place. Returns the sqrt
// factor, or 0 when the result leaves the truncated space.
inline double ladder_in_place(std::vector<Occupation>& occ, int mode, LadderKind kind, int n_cap) {
  Occupation& n = occ[static_cast<std::size_t>(mode)];
  if (kind == LadderKind::Annihilate) {
    if (n == 0) return 0.0;
    const double f = std::sqrt(static_cast<double>(n));
    --n;
    return f;
  }
  if (n >= n_cap) return 0.0;
  ++n;
  return std::sqrt(static_cast<double>(n));
}

// One two-body term a*_{c1} a*_{c2} a_{a2} a_{a1} with its coefficient.
struct PairTerm {
  int c1, c2, a2, a1;
  double coefficient;
};

// All momentum-conserving terms of (1/2L) sum_{k,k',q} v_q a*_{k+q} a*_{k'-q} a_{k'} a_k.
inline std::vector<PairTerm> pair_terms(const LatticeModelSpec& spec) {
  std::vector<PairTerm> terms;
  const int L = spec.L;
  const std::vector<double> vq = spec.potential_fourier();
  for (int k = 0; k < L; ++k) {
    for (int kp = 0; kp < L; ++kp) {
      for (int q = 0; q < L; ++q) {
        const double c = vq[static_cast<std::size_t>(q)] / (2.0 * L);
        if (c == 0.0) continue;
        terms.push_back({(k + q) % L, ((kp - q) % L + L) % L, kp, k, c});
      }
    }
  }
  return terms;
}

}  // namespace detail

// Truncated ladder operator on one mode: a*|n> = sqrt(n+1)|n+1> for n < n_cap,
// a*|n_cap> = 0; Annihilate is the conjugate transpose.
inline SparseOperator mode_operator(const FockBasis& basis, int mode, LadderKind kind) {
  if (mode < 0 || mode >= basis.num_modes()) {
    throw PreconditionError("mode index " + std::to_string(mode) + " out of range [0, " +
                            std::to_string(basis.num_modes()) + ")");
  }
  std::vector<SparseOperator::Entry> t;
  std::vector<Occupation> occ(static_cast<std::size_t>(basis.num_modes()));
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    auto s = basis.state(i);
    occ.assign(s.begin(), s.end());
    const double f = detail::ladder_in_place(occ, mode, kind, basis.n_cap());
    if (f == 0.0) continue;
    if (auto j = basis.index_of(occ)) t.push_back({*j, i, f});
  }
  return SparseOperator::from_triplets(basis.dim(), std::move(t));
}

// Diagonal operator sum_j weight[j] n_j.
inline SparseOperator weighted_number(const FockBasis& basis, const std::vector<double>& weight) {
  std::vector<double> d(basis.dim(), 0.0);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    double s = 0.0;
    for (int j = 0; j < basis.num_modes(); ++j) {
      const int n = basis.occupation(i, j);
      if (n != 0) s += weight[static_cast<std::size_t>(j)] * n;
    }
    d[i] = s;
  }
  return SparseOperator::diagonal(d);
}

inline SparseOperator number_operator(const FockBasis& basis) {
  return weighted_number(basis, std::vector<double>(static_cast<std::size_t>(basis.num_modes()), 1.0));
}

inline SparseOperator mode_number_operator(const FockBasis& basis, int mode) {
  std::vector<double> w(static_cast<std::size_t>(basis.num_modes()), 0.0);
  w[static_cast<std::size_t>(mode)] = 1.0;
  return weighted_number(basis, w);
}

// (-1)^N; conjugation by it sends every a_k to -a_k.
inline SparseOperator parity_operator(const FockBasis& basis) {
  std::vector<double> d(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i) d[i] = basis.total_particles(i) % 2 == 0 ? 1.0 : -1.0;
  return SparseOperator::diagonal(d);
}

inline SparseOperator kinetic_operator(const LatticeModelSpec& spec, const FockBasis& basis) {
  std::vector<double> eps(static_cast<std::size_t>(spec.L));
  for (int j = 0; j < spec.L; ++j) eps[static_cast<std::size_t>(j)] = spec.dispersion(j);
  return weighted_number(basis, eps);
}

// Normal-ordered pair interaction in momentum space. Works on either subspace;
// on Fprime, terms touching mode 0 are dropped (they annihilate every state),
// which is the C = 0 substitution.
inline SparseOperator interaction_operator(const LatticeModelSpec& spec, const FockBasis& basis) {
  const auto terms = detail::pair_terms(spec);
  std::vector<SparseOperator::Entry> t;
  std::vector<Occupation> occ(static_cast<std::size_t>(basis.num_modes()));
  const int cap = basis.n_cap();
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    auto s = basis.state(i);
    for (const auto& term : terms) {
      occ.assign(s.begin(), s.end());
      double amp = detail::ladder_in_place(occ, term.a1, LadderKind::Annihilate, cap);
      if (amp == 0.0) continue;
      amp *= detail::ladder_in_place(occ, term.a2, LadderKind::Annihilate, cap);
      if (amp == 0.0) continue;
      amp *= detail::ladder_in_place(occ, term.c2, LadderKind::Create, cap);
      if (amp == 0.0) continue;
      amp *= detail::ladder_in_place(occ, term.c1, LadderKind::Create, cap);
      if (amp == 0.0) continue;
      if (auto j = basis.index_of(occ)) t.push_back({*j, i, term.coefficient * amp});
    }
  }
  return SparseOperator::from_triplets(basis.dim(), std::move(t), Symmetry::Hermitian);
}

// The separately exposed pieces of H and H'. X = sqrt(L)(a_0 + a_0*).
struct HamiltonianParts {
  SparseOperator T;
  SparseOperator U;
  SparseOperator N;
  SparseOperator N0;
  SparseOperator Nprime;
  SparseOperator X;
};

struct AssembledHamiltonian {
  SparseOperator op;
  HamiltonianParts parts;

  std::map<std::string, const SparseOperator*> named_parts() const {
    return {{"T", &parts.T}, {"U", &parts.U}, {"N", &parts.N},
            {"N0", &parts.N0}, {"Nprime", &parts.Nprime}, {"X", &parts.X}};
  }
};

inline HamiltonianParts assemble_parts(const LatticeModelSpec& spec, const FockBasis& basis) {
  if (basis.subspace() != Subspace::Full) {
    throw PreconditionError("assemble_hamiltonian requires the Full basis, got " + basis.id());
  }
  if (basis.num_modes() != spec.L || basis.n_cap() != spec.n_cap) {
    throw PreconditionError("basis " + basis.id() + " does not match the model spec");
  }
  HamiltonianParts p;
  p.T = kinetic_operator(spec, basis);
  p.U = spec.is_free() ? SparseOperator::from_triplets(basis.dim(), {}, Symmetry::Hermitian)
                       : interaction_operator(spec, basis);
  p.N = number_operator(basis);
  p.N0 = mode_number_operator(basis, 0);
  std::vector<double> wprime(static_cast<std::size_t>(spec.L), 1.0);
  wprime[0] = 0.0;
  p.Nprime = weighted_number(basis, wprime);

  std::vector<SparseOperator::Entry> x;
  const double sv = spec.sqrt_volume();
  const std::size_t stride = basis.full_index(0, 1);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const int n0 = basis.occupation(i, 0);
    if (n0 < basis.n_cap()) {
      const double f = sv * std::sqrt(static_cast<double>(n0 + 1));
      x.push_back({i + stride, i, f});
      x.push_back({i, i + stride, f});
    }
  }
  p.X = SparseOperator::from_triplets(basis.dim(), std::move(x), Symmetry::Hermitian);
  return p;
}

// H' = T + U - mu N' - mu0 N0 - nu X. The H variant is the same sum with
// mu0 = mu, so the two agree entry for entry when mu0 == mu.
inline SparseOperator compose_hamiltonian(const HamiltonianParts& p, Variant variant, double mu,
                                          double mu0, double nu) {
  const double mode0_mu = variant == Variant::H ? mu : mu0;
  SparseOperator h = SparseOperator::combine(
      {{1.0, &p.T}, {1.0, &p.U}, {-mu, &p.Nprime}, {-mode0_mu, &p.N0}, {-nu, &p.X}});
  for (const auto& e : h.entries()) {
    if (e.row == e.col && e.value.imag() != 0.0) {
      throw ConstructionError("assembled Hamiltonian has a non-real diagonal at " +
                              std::to_string(e.row));
    }
  }
  return h;
}

inline AssembledHamiltonian assemble_hamiltonian(const LatticeModelSpec& spec, const FockBasis& basis,
                                                 Variant variant) {
  AssembledHamiltonian out;
  out.parts = assemble_parts(spec, basis);
  out.op = compose_hamiltonian(out.parts, variant, spec.mu, spec.mu0, spec.nu);
  return out;
}

}  // namespace bogolab

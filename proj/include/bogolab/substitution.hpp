#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bogolab/error.hpp"
#include "bogolab/fock_basis.hpp"
#include "bogolab/model.hpp"
#include "bogolab/operators.hpp"
#include "bogolab/sparse_operator.hpp"
#include "bogolab/spectrum.hpp"
#include "bogolab/thermal.hpp"

namespace bogolab {

// H0(C) with mu0 = nu = 0 as a polynomial in C: sum_k C^k terms[k] on
// Fprime. terms[k] collects the pair terms with exactly k mode-0 factors;
// the kinetic and -mu N' pieces sit in terms[0].
struct SubstitutionExpansion {
  LatticeModelSpec spec;
  std::array<SparseOperator, 5> terms;

  SparseOperator base(double C) const {
    const double c2 = C * C;
    return SparseOperator::combine({{1.0, &terms[0]},
                                    {C, &terms[1]},
                                    {c2, &terms[2]},
                                    {c2 * C, &terms[3]},
                                    {c2 * c2, &terms[4]}});
  }
};

inline SubstitutionExpansion substitution_expansion(const LatticeModelSpec& spec, const FockBasis& fprime) {
  if (fprime.subspace() != Subspace::Fprime) {
    throw PreconditionError("substitution needs the Fprime basis, got " + fprime.id());
  }
  if (fprime.num_modes() != spec.L || fprime.n_cap() != spec.n_cap) {
    throw PreconditionError("basis " + fprime.id() + " does not match the model spec");
  }
  SubstitutionExpansion ex;
  ex.spec = spec;
  const std::size_t dim = fprime.dim();

  std::vector<double> eps(static_cast<std::size_t>(spec.L));
  for (int j = 0; j < spec.L; ++j) eps[static_cast<std::size_t>(j)] = spec.dispersion(j) - (j == 0 ? 0.0 : spec.mu);
  eps[0] = 0.0;
  const SparseOperator diag = weighted_number(fprime, eps);

  std::array<std::vector<SparseOperator::Entry>, 5> trip;
  for (const auto& e : diag.entries()) trip[0].push_back(e);
  if (!spec.is_free()) {
    const auto terms = detail::pair_terms(spec);
    const int cap = fprime.n_cap();
    std::vector<Occupation> occ(static_cast<std::size_t>(spec.L));
    for (std::size_t i = 0; i < dim; ++i) {
      auto s = fprime.state(i);
      for (const auto& term : terms) {
        // Mode-0 factors become the scalar C; the rest act on Fprime in the
        // original order.
        const std::array<std::pair<int, LadderKind>, 4> factors{{{term.a1, LadderKind::Annihilate},
                                                                 {term.a2, LadderKind::Annihilate},
                                                                 {term.c2, LadderKind::Create},
                                                                 {term.c1, LadderKind::Create}}};
        occ.assign(s.begin(), s.end());
        double amp = term.coefficient;
        int power = 0;
        for (const auto& [mode, kind] : factors) {
          if (mode == 0) {
            ++power;
            continue;
          }
          amp *= detail::ladder_in_place(occ, mode, kind, cap);
          if (amp == 0.0) break;
        }
        if (amp == 0.0) continue;
        if (auto j = fprime.index_of(occ)) trip[static_cast<std::size_t>(power)].push_back({*j, i, amp});
      }
    }
  }
  for (std::size_t k = 0; k < trip.size(); ++k) {
    ex.terms[k] = SparseOperator::from_triplets(dim, std::move(trip[k]), Symmetry::Hermitian);
  }
  return ex;
}

// H0(C) (variant H) or H0'(C) (variant Hprime) on Fprime. op = base + shift,
// with base the mu0 = nu = 0 generator and shift = mu0 * mu0_coefficient +
// nu * nu_coefficient a multiple of the identity.
struct SubstitutedHamiltonian {
  double C = 0.0;
  Variant variant = Variant::Hprime;
  double mu0 = 0.0;  // mode-0 chemical potential actually used (mu for variant H)
  double nu = 0.0;
  SparseOperator base;
  double mu0_coefficient = 0.0;  // -C^2
  double nu_coefficient = 0.0;   // -2 sqrt(L) C
  double shift = 0.0;

  SparseOperator op() const {
    const SparseOperator id = SparseOperator::identity(base.dim());
    return SparseOperator::combine({{1.0, &base}, {shift, &id}});
  }
};

// mu0 and nu may differ from ex.spec; the base only depends on mu and the
// couplings.
inline SubstitutedHamiltonian substitute_hamiltonian(const SubstitutionExpansion& ex, Variant variant, double C,
                                                     double mu0, double nu) {
  SubstitutedHamiltonian h;
  h.C = C;
  h.variant = variant;
  h.mu0 = variant == Variant::H ? ex.spec.mu : mu0;
  h.nu = nu;
  h.base = ex.base(C);
  h.mu0_coefficient = -C * C;
  h.nu_coefficient = -2.0 * ex.spec.sqrt_volume() * C;
  h.shift = h.mu0 * h.mu0_coefficient + h.nu * h.nu_coefficient;
  return h;
}

inline SubstitutedHamiltonian substitute_hamiltonian(const SubstitutionExpansion& ex, Variant variant, double C) {
  return substitute_hamiltonian(ex, variant, C, ex.spec.mu0, ex.spec.nu);
}

inline SubstitutedHamiltonian substitute_hamiltonian(const LatticeModelSpec& spec, Variant variant, double C,
                                                     const FockBasis& fprime) {
  return substitute_hamiltonian(substitution_expansion(spec, fprime), variant, C);
}

// p0(C) = (beta L)^{-1} log Tr' e^{-beta H0(C)}. The scalar shift is added
// after the log so the decomposition in (mu0, nu) is exact.
inline double pressure0(const LatticeModelSpec& spec, const SubstitutedHamiltonian& sub,
                        std::size_t block_limit = kDefaultDimLimit) {
  DiagonalizeOptions opt;
  opt.vectors = false;
  opt.block_limit = block_limit;
  opt.label = "H0(C)";
  const Spectrum s = diagonalize(sub.base, opt);
  return (log_partition(s, spec.beta) - spec.beta * sub.shift) / (spec.beta * spec.L);
}

}  // namespace bogolab

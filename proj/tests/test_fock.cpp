#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bogolab/bogolab.hpp"
#include "support/oracles.hpp"

using namespace bogolab;

namespace {

LatticeModelSpec make_spec(int L, int n_cap, double t = 0.0, std::vector<double> phi = {}) {
  LatticeModelSpec s;
  s.L = L;
  s.n_cap = n_cap;
  s.t = t;
  s.phi = std::move(phi);
  return s;
}

std::vector<double> sorted_eigenvalues(const SparseOperator& h) {
  DiagonalizeOptions opt;
  opt.vectors = false;
  return diagonalize(h, opt).eigenvalues();
}

}  // namespace

TEST(FockBasis, TwoModesCapOneEnumeratesLexicographically) {
  const FockBasis b = FockBasis::build(make_spec(2, 1), Subspace::Full);
  ASSERT_EQ(b.dim(), 4u);
  const std::vector<std::vector<int>> want{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(b.occupation(i, 0), want[i][0]);
    EXPECT_EQ(b.occupation(i, 1), want[i][1]);
  }
}

TEST(FockBasis, CapZeroIsVacuumOnly) {
  const FockBasis b = FockBasis::build(make_spec(1, 0), Subspace::Full);
  EXPECT_EQ(b.dim(), 1u);
  EXPECT_EQ(b.total_particles(0), 0);
}

TEST(FockBasis, FprimePinsModeZero) {
  const FockBasis b = FockBasis::build(make_spec(3, 2), Subspace::Fprime);
  ASSERT_EQ(b.dim(), 9u);
  for (std::size_t i = 0; i < b.dim(); ++i) EXPECT_EQ(b.occupation(i, 0), 0);
}

TEST(FockBasis, IndexOfInvertsState) {
  const FockBasis b = FockBasis::build(make_spec(3, 3), Subspace::Full);
  for (std::size_t i = 0; i < b.dim(); ++i) {
    const auto j = b.index_of(b.state(i));
    ASSERT_TRUE(j.has_value());
    EXPECT_EQ(*j, i);
  }
  const std::vector<Occupation> too_big{4, 0, 0};
  EXPECT_FALSE(b.index_of(too_big).has_value());
}

TEST(FockBasis, FprimeOrdinalIsFullOrdinal) {
  const LatticeModelSpec s = make_spec(3, 2);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  for (std::size_t j = 0; j < fp.dim(); ++j) {
    EXPECT_EQ(full.index_of(fp.state(j)).value(), j);
    EXPECT_EQ(full.full_index(j, 0), j);
  }
}

TEST(FockBasis, DimensionGuardRaisesSizeError) {
  EXPECT_THROW(FockBasis::build(make_spec(4, 20), Subspace::Full, 1000), SizeError);
}

TEST(FockBasis, InvalidSpecRejected) {
  EXPECT_THROW(FockBasis::build(make_spec(0, 2), Subspace::Full), ConfigError);
  EXPECT_THROW(FockBasis::build(make_spec(2, -1), Subspace::Full), ConfigError);
}

TEST(ModeOperator, TruncatedLadderSingleMode) {
  const FockBasis b = FockBasis::build(make_spec(1, 2), Subspace::Full);
  const SparseOperator up = mode_operator(b, 0, LadderKind::Create);
  EXPECT_DOUBLE_EQ(up.at(2, 1).real(), std::sqrt(2.0));
  for (std::size_t r = 0; r < b.dim(); ++r) EXPECT_EQ(up.at(r, 2), Complex(0.0));
}

TEST(ModeOperator, AnnihilateIsAdjointOfCreate) {
  const FockBasis b = FockBasis::build(make_spec(2, 3), Subspace::Full);
  for (int j = 0; j < 2; ++j) {
    const SparseOperator up = mode_operator(b, j, LadderKind::Create);
    const SparseOperator down = mode_operator(b, j, LadderKind::Annihilate);
    EXPECT_EQ((down - up.adjoint()).max_abs(), 0.0);
  }
}

TEST(ModeOperator, CanonicalCommutatorBelowCap) {
  const FockBasis b = FockBasis::build(make_spec(2, 4), Subspace::Full);
  const SparseOperator a = mode_operator(b, 1, LadderKind::Annihilate);
  const SparseOperator ad = mode_operator(b, 1, LadderKind::Create);
  const SparseOperator comm = commutator(a, ad);
  for (std::size_t i = 0; i < b.dim(); ++i) {
    if (b.occupation(i, 1) >= b.n_cap()) continue;
    std::vector<Complex> e(b.dim(), 0.0);
    e[i] = 1.0;
    const auto out = comm.apply(e);
    for (std::size_t r = 0; r < b.dim(); ++r) EXPECT_NEAR(std::abs(out[r] - e[r]), 0.0, 1e-14);
  }
}

TEST(ModeOperator, OutOfRangeModeThrows) {
  const FockBasis b = FockBasis::build(make_spec(2, 1), Subspace::Full);
  EXPECT_THROW(mode_operator(b, 2, LadderKind::Create), PreconditionError);
}

TEST(Hamiltonian, HprimeAtMu0EqualsMuIsH) {
  LatticeModelSpec s = make_spec(3, 3, 1.0, {0.5, 0.1});
  s.mu = -0.7;
  s.mu0 = -0.7;
  s.nu = 0.2;
  const FockBasis b = FockBasis::build(s, Subspace::Full);
  const auto h = assemble_hamiltonian(s, b, Variant::H);
  const auto hp = assemble_hamiltonian(s, b, Variant::Hprime);
  EXPECT_EQ((h.op - hp.op).max_abs(), 0.0);
}

TEST(Hamiltonian, SingleModeFreeIsDisplacedOscillator) {
  LatticeModelSpec s = make_spec(1, 6, 3.0);
  s.mu = -1.3;
  s.nu = 0.4;
  const FockBasis b = FockBasis::build(s, Subspace::Full);
  const auto h = assemble_hamiltonian(s, b, Variant::H);
  const SparseOperator n = mode_number_operator(b, 0);
  const SparseOperator a = mode_operator(b, 0, LadderKind::Annihilate);
  const SparseOperator ad = mode_operator(b, 0, LadderKind::Create);
  const SparseOperator want = SparseOperator::combine({{-s.mu, &n}, {-s.nu, &a}, {-s.nu, &ad}});
  EXPECT_LT((h.op - want).max_abs(), 1e-15);
}

TEST(Hamiltonian, InteractionMatchesRealSpaceOracle) {
  // Two particles on two sites, on-site repulsion only.
  LatticeModelSpec s = make_spec(2, 2, 0.0, {0.5, 0.0});
  const FockBasis b = FockBasis::build(s, Subspace::Full);
  const auto parts = assemble_parts(s, b);
  for (const std::vector<int> occ : {std::vector<int>{1, 1}, {2, 0}, {0, 2}}) {
    std::vector<Occupation> o(occ.begin(), occ.end());
    const std::size_t i = b.index_of(o).value();
    EXPECT_NEAR(parts.U.at(i, i).real(), oracle::real_space_interaction_expectation(s, occ), 1e-13);
  }
}

TEST(Hamiltonian, InteractionMatchesRealSpaceOracleWithNeighbourTerm) {
  LatticeModelSpec s = make_spec(3, 3, 0.0, {0.7, -0.2});
  const FockBasis b = FockBasis::build(s, Subspace::Full);
  const auto parts = assemble_parts(s, b);
  for (std::size_t i = 0; i < b.dim(); ++i) {
    if (b.total_particles(i) > 3) continue;
    std::vector<int> occ(b.state(i).begin(), b.state(i).end());
    EXPECT_NEAR(parts.U.at(i, i).real(), oracle::real_space_interaction_expectation(s, occ), 1e-12);
  }
}

TEST(Hamiltonian, ExactlyHermitianAndNumberSplit) {
  LatticeModelSpec s = make_spec(3, 3, 1.0, {0.5, 0.2});
  s.mu = -1.0;
  s.mu0 = -0.4;
  s.nu = 0.3;
  const FockBasis b = FockBasis::build(s, Subspace::Full);
  const auto h = assemble_hamiltonian(s, b, Variant::Hprime);
  EXPECT_TRUE(h.op.is_exactly_hermitian());
  EXPECT_TRUE(h.parts.U.is_exactly_hermitian());
  EXPECT_EQ((h.parts.N - h.parts.Nprime - h.parts.N0).max_abs(), 0.0);
}

TEST(Hamiltonian, GaugeSymmetryAtZeroField) {
  LatticeModelSpec s = make_spec(3, 3, 1.0, {0.5, 0.2});
  s.mu = -1.0;
  const FockBasis b = FockBasis::build(s, Subspace::Full);
  const auto h = assemble_hamiltonian(s, b, Variant::H);
  // Pair scattering into mode 0 changes N0 once phi != 0, so N0 is only a
  // conserved quantity of the free model.
  EXPECT_LE(commutator(h.op, h.parts.N).max_abs(), 1e-12 * h.op.max_abs());

  LatticeModelSpec f = make_spec(3, 3, 1.0);
  f.mu = -1.0;
  const auto hf = assemble_hamiltonian(f, b, Variant::H);
  EXPECT_LE(commutator(hf.op, hf.parts.N0).max_abs(), 1e-12 * hf.op.max_abs());
}

TEST(Hamiltonian, FieldParityLeavesSpectrumInvariant) {
  LatticeModelSpec s = make_spec(2, 5, 1.0, {0.5});
  s.mu = -1.0;
  s.mu0 = -0.8;
  s.nu = 0.35;
  const FockBasis b = FockBasis::build(s, Subspace::Full);
  const auto plus = sorted_eigenvalues(assemble_hamiltonian(s, b, Variant::Hprime).op);
  s.nu = -s.nu;
  const auto minus = sorted_eigenvalues(assemble_hamiltonian(s, b, Variant::Hprime).op);
  EXPECT_LE(oracle::max_abs_diff(plus, minus), 1e-10);
}

TEST(Hamiltonian, FprimeStatesAnnihilatedByA0) {
  const LatticeModelSpec s = make_spec(3, 2);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  const SparseOperator a0 = mode_operator(full, 0, LadderKind::Annihilate);
  for (std::size_t j = 0; j < fp.dim(); ++j) {
    std::vector<Complex> e(full.dim(), 0.0);
    e[full.full_index(j, 0)] = 1.0;
    for (const Complex& z : a0.apply(e)) EXPECT_EQ(z, Complex(0.0));
  }
}

TEST(Hamiltonian, RequiresFullBasis) {
  const LatticeModelSpec s = make_spec(2, 2);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  EXPECT_THROW(assemble_hamiltonian(s, fp, Variant::H), PreconditionError);
}

TEST(Superstability, OnSiteEqualityCase) {
  const LatticeModelSpec s = make_spec(3, 1, 0.0, {1.0});
  for (int n = 0; n <= 6; ++n) {
    std::vector<int> all_on_zero(static_cast<std::size_t>(n), 0);
    EXPECT_NEAR(pair_energy(s, all_on_zero), n * (n - 1) / 2.0, 1e-15);
  }
  const auto r = superstability_check(s, {0, 6}, 20, 3);
  EXPECT_TRUE(r.pass);
}

TEST(Superstability, ExhaustiveSmallRingMatchesSampledVerdict) {
  const LatticeModelSpec s = make_spec(4, 1, 0.0, {1.0, 0.1});
  const double a = 0.5, b = 0.5 + 2 * 0.1 + 0.0;
  double worst = 1e300;
  for (int n = 0; n <= 4; ++n) {
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 4;
    for (int code = 0; code < total; ++code) {
      std::vector<int> pos;
      for (int c = code, i = 0; i < n; ++i, c /= 4) pos.push_back(c % 4);
      double u = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const int d = std::abs(pos[static_cast<std::size_t>(i)] - pos[static_cast<std::size_t>(j)]);
          u += d == 0 ? 1.0 : (d == 1 || d == 3) ? 0.1 : 0.0;
        }
      }
      worst = std::min(worst, u - (-b * n + a * n * n / 4.0));
    }
  }
  EXPECT_GE(worst, 0.0);
  const auto r = superstability_check(s, {0, 4}, 50, 11);
  EXPECT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(r.a, a);
  EXPECT_DOUBLE_EQ(r.b, b);
  EXPECT_GE(r.worst_slack, worst - 1e-12);
}

TEST(Superstability, NeedsOnSiteRepulsion) {
  const LatticeModelSpec s = make_spec(3, 1, 0.0, {0.0, 0.2});
  EXPECT_THROW(superstability_check(s, {0, 3}, 5, 1), PreconditionError);
}

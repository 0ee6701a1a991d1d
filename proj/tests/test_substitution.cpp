#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bogolab/bogolab.hpp"
#include "support/oracles.hpp"

using namespace bogolab;

namespace {

LatticeModelSpec free_single_mode(int n_cap) {
  LatticeModelSpec s;
  s.L = 1;
  s.n_cap = n_cap;
  s.beta = 1.0;
  s.mu = -1.0;
  s.mu0 = -1.0;
  s.nu = 0.5;
  return s;
}

LatticeModelSpec interacting_pair(int n_cap) {
  LatticeModelSpec s;
  s.L = 2;
  s.n_cap = n_cap;
  s.t = 1.0;
  s.phi = {0.5};
  s.beta = 1.0;
  s.mu = -1.0;
  s.mu0 = -1.0;
  s.nu = 0.3;
  return s;
}

}  // namespace

TEST(CoherentVector, ZeroIsVacuum) {
  const CoherentVector v = coherent_vector(0.0, 5);
  EXPECT_EQ(v.tail_mass, 0.0);
  EXPECT_EQ(v.amplitudes[0], 1.0);
  for (std::size_t n = 1; n < v.amplitudes.size(); ++n) EXPECT_EQ(v.amplitudes[n], 0.0);
}

TEST(CoherentVector, TailMassMatchesPoissonSum) {
  const CoherentVector v = coherent_vector(0.5, 12);
  // Independent tail: 1 - sum_{n <= 12} e^{-x} x^n / n!.
  const double x = 0.25;
  double head = 0.0, term = std::exp(-x);
  for (int n = 0; n <= 12; ++n) {
    head += term;
    term *= x / (n + 1);
  }
  EXPECT_LT(v.tail_mass, 1e-12);
  double tail = 0.0;
  for (int n = 13; n < 40; ++n) {
    tail += term;
    term *= x / (n + 1);
  }
  EXPECT_NEAR(v.tail_mass / tail, 1.0, 1e-10);
  EXPECT_NEAR(head, 1.0, 1e-12);
}

TEST(CoherentVector, NormalizedAndNearEigenvector) {
  const CoherentVector v = coherent_vector(0.5, 12);
  double n2 = 0.0;
  for (double a : v.amplitudes) n2 += a * a;
  EXPECT_NEAR(n2, 1.0, 1e-15);
  EXPECT_LE(v.eigen_residual, v.eigen_bound);
  EXPECT_NEAR(v.mean_annihilation(), 0.5, 1e-12);
}

TEST(CoherentVector, TruncationNamesRequiredCap) {
  try {
    coherent_vector(2.0, 4);
    FAIL() << "expected a truncation error";
  } catch (const TruncationError& e) {
    EXPECT_GT(e.required_n_cap(), 4);
    EXPECT_NO_THROW(coherent_vector(2.0, e.required_n_cap()));
    EXPECT_THROW(coherent_vector(2.0, e.required_n_cap() - 1), TruncationError);
  }
}

TEST(EmbedProduct, VacuumTimesZeroIsFullVacuum) {
  const LatticeModelSpec s = interacting_pair(3);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  std::vector<Complex> psi(fp.dim(), 0.0);
  psi[0] = 1.0;
  const auto out = embed_product(psi, fp, coherent_vector(0.0, 3), full);
  EXPECT_EQ(out[0], Complex(1.0));
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_EQ(out[i], Complex(0.0));
}

TEST(EmbedProduct, PreservesNorm) {
  const LatticeModelSpec s = interacting_pair(8);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  std::mt19937_64 rng(5);
  const auto psi = oracle::random_unit_vector(fp.dim(), rng);
  const auto out = embed_product(psi, fp, coherent_vector(0.4, 8), full);
  double n2 = 0.0;
  for (const auto& z : out) n2 += std::norm(z);
  EXPECT_NEAR(n2, 1.0, 1e-14);
}

TEST(DisplacedTrace, ZeroCSingleModeIsVacuumElement) {
  const LatticeModelSpec s = free_single_mode(30);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  const auto h = assemble_hamiltonian(s, full, Variant::H);
  const Spectrum sp = diagonalize(h.op);
  const DisplacedTrace dt = displaced_trace_pressure(s, full, sp, 0.0);
  // <0| e^{-beta H} |0> by brute force over eigenvectors.
  double w = 0.0;
  const auto& b = sp.blocks()[0];
  for (Eigen::Index i = 0; i < b.energies.size(); ++i) w += std::exp(-b.energies(i)) * b.vectors(0, i) * b.vectors(0, i);
  EXPECT_NEAR(dt.log_trace, std::log(w), 1e-12);
  EXPECT_LE(dt.pressure, pressure(s, sp));
}

TEST(DisplacedTrace, SandwichedBetweenP0AndPressure) {
  const LatticeModelSpec s = free_single_mode(30);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  const Spectrum sp = diagonalize(assemble_hamiltonian(s, full, Variant::H).op);
  const double tw = displaced_trace_pressure(s, full, sp, 0.5).pressure;
  EXPECT_GE(tw, 0.25 - 1e-9);
  EXPECT_LE(tw, 0.7086751 + 1e-7);
}

TEST(Substitution, SingleModeScalar) {
  LatticeModelSpec s = free_single_mode(5);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  const auto sub = substitute_hamiltonian(s, Variant::Hprime, 0.5, fp);
  ASSERT_EQ(sub.base.dim(), 1u);
  EXPECT_DOUBLE_EQ(sub.op().at(0, 0).real(), -0.25);
  EXPECT_DOUBLE_EQ(pressure0(s, sub), 0.25);
}

TEST(Substitution, ZeroCIsRestrictionToFprime) {
  LatticeModelSpec s = interacting_pair(4);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  const auto h = assemble_hamiltonian(s, full, Variant::H);
  const auto sub = substitute_hamiltonian(s, Variant::H, 0.0, fp);
  const SparseOperator op = sub.op();
  for (std::size_t i = 0; i < fp.dim(); ++i) {
    for (std::size_t j = 0; j < fp.dim(); ++j) EXPECT_EQ(op.at(i, j), h.op.at(i, j));
  }
}

TEST(Substitution, ShiftDecompositionExact) {
  LatticeModelSpec s = interacting_pair(5);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  const auto ex = substitution_expansion(s, fp);
  const double C = 0.7;
  const double ref = pressure0(s, substitute_hamiltonian(ex, Variant::Hprime, C, 0.0, 0.0));
  for (double mu0 : {-1.2, -0.9, -0.6}) {
    for (double nu : {0.1, 0.3, 0.5}) {
      const double p = pressure0(s, substitute_hamiltonian(ex, Variant::Hprime, C, mu0, nu));
      EXPECT_NEAR(p - ref - mu0 * C * C / s.L - 2.0 * nu * C / std::sqrt(2.0), 0.0, 1e-12);
    }
  }
}

TEST(Substitution, MatrixElementIdentityAtConvergedCap) {
  LatticeModelSpec s = interacting_pair(12);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  const auto h = assemble_hamiltonian(s, full, Variant::H);
  const auto sub = substitute_hamiltonian(s, Variant::H, 0.7, fp);
  const SparseOperator h0 = sub.op();
  const CoherentVector cv = coherent_vector(0.7, 12);
  std::mt19937_64 rng(17);
  for (int k = 0; k < 10; ++k) {
    const auto a = oracle::random_unit_vector(fp.dim(), rng);
    const auto b = oracle::random_unit_vector(fp.dim(), rng);
    const Complex lhs = h.op.matrix_element(embed_product(a, fp, cv, full), embed_product(b, fp, cv, full));
    EXPECT_LE(std::abs(lhs - h0.matrix_element(a, b)), 1e-10);
  }
}

TEST(Substitution, RejectsFullBasis) {
  LatticeModelSpec s = interacting_pair(3);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  EXPECT_THROW(substitution_expansion(s, full), PreconditionError);
}

TEST(Maximize, SingleModeClosedForm) {
  const auto m = maximize_over_C(free_single_mode(5), Variant::Hprime);
  EXPECT_NEAR(m.C_max, 0.5, 1e-6);
  EXPECT_NEAR(m.p0_sup, 0.25, 1e-8);
  EXPECT_TRUE(m.interior);
  EXPECT_TRUE(m.sign_consistent);
  EXPECT_LE(m.stationarity_residual, 1e-6);
  EXPECT_LT(m.bracket.second - m.bracket.first, 1e-8 * std::max(1.0, std::abs(m.C_max)));
}

TEST(Maximize, ZeroFieldGivesZero) {
  LatticeModelSpec s = free_single_mode(5);
  s.nu = 0.0;
  const auto m = maximize_over_C(s, Variant::Hprime);
  EXPECT_EQ(m.C_max, 0.0);
  EXPECT_NEAR(m.p0_sup, 0.0, 1e-15);
}

TEST(Maximize, NegativeFieldReflects) {
  LatticeModelSpec s = free_single_mode(5);
  s.nu = -0.5;
  const auto m = maximize_over_C(s, Variant::Hprime);
  EXPECT_NEAR(m.C_max, -0.5, 1e-6);
  EXPECT_NEAR(m.p0_sup, 0.25, 1e-8);
  EXPECT_TRUE(m.sign_consistent);
}

TEST(Maximize, UnboundedDirectionRaises) {
  // mu0 > 0 makes -mu0 C^2 unbounded below, so p0 grows without limit.
  LatticeModelSpec s = free_single_mode(3);
  s.mu0 = 0.5;
  MaximizeOptions opt;
  opt.max_doublings = 3;
  EXPECT_THROW(maximize_over_C(s, Variant::Hprime, opt), SolverError);
}

TEST(Maximize, ChainHoldsAtMaximizer) {
  LatticeModelSpec s = interacting_pair(10);
  const auto m = maximize_over_C(s, Variant::H);
  const FockBasis full = FockBasis::build(s, Subspace::Full);
  const Spectrum sp = diagonalize(assemble_hamiltonian(s, full, Variant::H).op);
  const DisplacedTrace dt = displaced_trace_pressure(s, full, sp, m.C_max);
  const double slack_tol = 1e-9 + 10.0 * dt.tail_mass;
  EXPECT_GE(dt.pressure - m.p0_sup, -slack_tol);
  EXPECT_GE(pressure(s, sp) - dt.pressure, -slack_tol);
}

TEST(Maximize, HintReproducesColdStart) {
  LatticeModelSpec s = interacting_pair(6);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  const auto ex = substitution_expansion(s, fp);
  const auto cold = maximize_over_C(ex, s, Variant::Hprime);
  MaximizeOptions opt;
  opt.hint = std::pair{0.5 * cold.C_max, 1.5 * cold.C_max + 0.1};
  const auto warm = maximize_over_C(ex, s, Variant::Hprime, opt);
  EXPECT_NEAR(warm.C_max, cold.C_max, 1e-7);
  EXPECT_NEAR(warm.p0_sup, cold.p0_sup, 1e-13);
  EXPECT_LT(warm.evaluations, cold.evaluations);
}

TEST(Maximize, ExpansionFromOtherModelRejected) {
  LatticeModelSpec s = interacting_pair(4);
  const FockBasis fp = FockBasis::build(s, Subspace::Fprime);
  const auto ex = substitution_expansion(s, fp);
  LatticeModelSpec other = s;
  other.mu = -0.5;
  EXPECT_THROW(maximize_over_C(ex, other, Variant::Hprime), PreconditionError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "bogolab/bogolab.hpp"
#include "bogolab/convex.hpp"

using namespace bogolab;

namespace {

std::vector<double> symmetric_grid(double lo, double hi, int n) {
  std::vector<double> pos;
  for (int i = 0; i < n; ++i) pos.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  std::vector<double> xs;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) xs.push_back(-*it);
  xs.push_back(0.0);
  xs.insert(xs.end(), pos.begin(), pos.end());
  return xs;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

SampledSurface closed_form_surface(double h) {
  SampledSurface s;
  const int nx = static_cast<int>(std::lround(1.5 / h)) + 1;
  const int ny = static_cast<int>(std::lround(0.9 / h)) + 1;
  s.xs = linspace(-2.0, -0.5, nx);
  s.ys = linspace(0.1, 1.0, ny);
  s.values.resize(nx, ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) s.values(i, j) = -s.ys[j] * s.ys[j] / s.xs[i];
  }
  return s;
}


// Residual of the refined surface on the nodes it shares with the coarse one,
// so both maxima are taken over the same points.
double refined_on_shared_nodes(const SampledSurface& fine) {
  const auto nx = static_cast<Eigen::Index>(fine.xs.size());
  const auto ny = static_cast<Eigen::Index>(fine.ys.size());
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(nx, ny);
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < ny; ++j) mask(i, j) = i % 2 == 0 && j % 2 == 0;
  }
  return pde_residual(fine, mask).max_abs;
}

}  // namespace

TEST(SampledFunction, RejectsBadGrids) {
  EXPECT_THROW(SampledFunction({0.0, 0.0, 1.0}, {1, 2, 3}), PreconditionError);
  EXPECT_THROW(SampledFunction({0.0, 1.0}, {1.0}), PreconditionError);
}

TEST(OneSidedDerivative, AbsoluteValueKink) {
  const auto f = SampledFunction::tabulate(symmetric_grid(1e-3, 1.0, 20), [](double x) { return std::abs(x); });
  const auto d = one_sided_derivative(f, 0.0);
  EXPECT_DOUBLE_EQ(d.left, -1.0);
  EXPECT_DOUBLE_EQ(d.right, 1.0);
  EXPECT_TRUE(d.kink);
}

TEST(OneSidedDerivative, SmoothQuadratic) {
  const auto f = SampledFunction::tabulate(linspace(0.0, 1.0, 201), [](double x) { return x * x; });
  const auto d = one_sided_derivative(f, 0.5);
  EXPECT_NEAR(d.left, 1.0, 0.006);
  EXPECT_NEAR(d.right, 1.0, 0.006);
  EXPECT_LE(d.left, d.right);
  EXPECT_FALSE(d.kink);
}

TEST(OneSidedDerivative, FreePressureInFieldIsEven) {
  LatticeModelSpec s;
  s.L = 1;
  s.n_cap = 30;
  s.mu = -1.0;
  const FockBasis b = FockBasis::build(s, Subspace::Full);
  const auto parts = assemble_parts(s, b);
  DiagonalizeOptions opt;
  opt.vectors = false;
  const auto f = SampledFunction::tabulate(linspace(-0.2, 0.2, 41), [&](double nu) {
    return pressure(s, diagonalize(compose_hamiltonian(parts, Variant::H, s.mu, s.mu, nu), opt));
  });
  const auto d = one_sided_derivative(f, 0.0);
  EXPECT_NEAR(d.left, -d.right, 1e-10);
  // Secants of nu^2/|mu| over one step h = 0.01: +-h.
  EXPECT_NEAR(d.right, 0.01, 1e-8);
}

TEST(OneSidedDerivative, OutsideGridRejected) {
  const auto f = SampledFunction::tabulate(linspace(0.0, 1.0, 5), [](double x) { return x; });
  EXPECT_THROW(one_sided_derivative(f, 0.0), PreconditionError);
  EXPECT_THROW(one_sided_derivative(f, 2.0), PreconditionError);
}

TEST(Griffiths, SmoothedKinkFamily) {
  const auto xs = symmetric_grid(1e-3, 1.0, 20);
  std::vector<SampledFunction> fam;
  for (double n : {10.0, 100.0, 1000.0}) {
    fam.push_back(SampledFunction::tabulate(xs, [n](double x) { return std::sqrt(x * x + 1.0 / n); }));
  }
  const auto f = SampledFunction::tabulate(xs, [](double x) { return std::abs(x); });
  const auto r = griffiths_check(fam, f, 0.0);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.liminf_proxy, -1.0);
  EXPECT_LE(r.limsup_proxy, 1.0);
}

TEST(Griffiths, ConstantFamilyPassesTrivially) {
  const auto xs = linspace(-1.0, 1.0, 21);
  const auto f = SampledFunction::tabulate(xs, [](double x) { return x * x; });
  const auto r = griffiths_check({f, f, f}, f, 0.3);
  EXPECT_TRUE(r.pass);
}

TEST(Griffiths, GridMismatchAndShortFamilyRejected) {
  const auto f = SampledFunction::tabulate(linspace(-1.0, 1.0, 21), [](double x) { return x * x; });
  const auto g = SampledFunction::tabulate(linspace(-1.0, 1.0, 11), [](double x) { return x * x; });
  EXPECT_THROW(griffiths_check({f, f, g}, f, 0.0), PreconditionError);
  EXPECT_THROW(griffiths_check({f, f}, f, 0.0), PreconditionError);
}

TEST(Griffiths, DetectsDerivativesOutsideSandwich) {
  const auto xs = linspace(-1.0, 1.0, 21);
  const auto f = SampledFunction::tabulate(xs, [](double x) { return x * x; });
  const auto g = SampledFunction::tabulate(xs, [](double x) { return x * x + 0.5 * x; });
  EXPECT_FALSE(griffiths_check({g, g, g}, f, 0.0).pass);
}

TEST(Convexity, QuarticIsConvexAndEven) {
  const auto f = SampledFunction::tabulate(linspace(-1.0, 1.0, 41), [](double x) { return std::pow(x, 4); });
  const auto r = convexity_and_parity_audit(f, Parity::Even);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.mirrored_pairs, 21u);
}

TEST(Convexity, SineReportsViolatingTriple) {
  const auto f = SampledFunction::tabulate(linspace(0.0, 3.0, 31), [](double x) { return std::sin(x); });
  const auto r = convexity_and_parity_audit(f, Parity::None);
  EXPECT_FALSE(r.convex);
  ASSERT_FALSE(r.violations.empty());
  EXPECT_LT(r.violations.front().second_difference, 0.0);
  EXPECT_GE(r.violations.front().i, 1u);
}

TEST(Convexity, OddFunctionFailsParity) {
  const auto f = SampledFunction::tabulate(linspace(-1.0, 1.0, 21), [](double x) { return std::exp(x); });
  const auto r = convexity_and_parity_audit(f, Parity::Even);
  EXPECT_TRUE(r.convex);
  EXPECT_FALSE(r.even);
}

TEST(PdeResidual, ClosedFormConvergesAtSecondOrder) {
  const auto coarse = pde_residual(closed_form_surface(0.05));
  const double fine = refined_on_shared_nodes(closed_form_surface(0.025));
  const double ratio = coarse.max_abs / fine;
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
  EXPECT_LT(fine, 1e-2);
}

TEST(PdeResidual, FieldIndependentSurfaceIsZero) {
  SampledSurface s;
  s.xs = linspace(-2.0, -1.0, 5);
  s.ys = linspace(0.0, 1.0, 5);
  s.values = Eigen::MatrixXd::Constant(5, 5, 3.0);
  const auto r = pde_residual(s);
  EXPECT_EQ(r.max_abs, 0.0);
  EXPECT_EQ(r.nodes, 9u);
}

TEST(PdeResidual, MaskSkipsNodes) {
  auto s = closed_form_surface(0.1);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(s.xs.size(), s.ys.size());
  mask.setConstant(false);
  mask(2, 2) = true;
  const auto r = pde_residual(s, mask);
  EXPECT_EQ(r.nodes, 1u);
  EXPECT_TRUE(std::isnan(r.residual(3, 3)));
}

TEST(SampledCsv, RoundTripsBitForBit) {
  const auto f = SampledFunction::tabulate(linspace(-1.0, 1.0, 7), [](double x) { return std::exp(x) / 3.0; }, "a");
  const auto g = SampledFunction::tabulate(linspace(0.0, 1.0, 4), [](double x) { return std::sqrt(x); }, "b");
  const auto path = (std::filesystem::temp_directory_path() / "bogolab_sampled_roundtrip.csv").string();
  write_sampled_csv(path, {f, g});
  const auto back = read_sampled_csv(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].label(), "a");
  EXPECT_EQ(back[0].xs(), f.xs());
  EXPECT_EQ(back[0].ys(), f.ys());
  EXPECT_EQ(back[1].ys(), g.ys());
  std::filesystem::remove(path);
}

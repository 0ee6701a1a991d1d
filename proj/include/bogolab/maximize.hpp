#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bogolab/error.hpp"
#include "bogolab/fock_basis.hpp"
#include "bogolab/model.hpp"
#include "bogolab/substitution.hpp"

namespace bogolab {

struct BogoliubovMaximum {
  double C_max = 0.0;
  double p0_sup = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  int evaluations = 0;
  bool sign_consistent = true;
  bool interior = false;
  double stationarity_residual = 0.0;              // |dp0/dC| at C_max, central difference
  std::vector<std::pair<double, double>> local_maxima;  // (C, p0) per refined bracket
  std::vector<std::string> warnings;
};

struct MaximizeOptions {
  int grid_points = 48;
  int max_doublings = 12;
  double rel_bracket = 1e-8;
  double tie_tolerance = 1e-12;
  std::size_t block_limit = kDefaultDimLimit;
  // Optional |C| bracket known to hold an interior maximum; the grid scan is
  // skipped unless the refined point lands on the bracket edge.
  std::optional<std::pair<double, double>> hint;
};

// Maximizes p0(C) (or p0'(C)) over the ray sgn C = sgn nu at the point
// (spec.mu0, spec.nu). The expansion must come from the same L, n_cap, mu and
// couplings; repeated calls at different (mu0, nu) share it.
inline BogoliubovMaximum maximize_over_C(const SubstitutionExpansion& ex, const LatticeModelSpec& spec,
                                         Variant variant, const MaximizeOptions& opt = {}) {
  if (spec.L != ex.spec.L || spec.n_cap != ex.spec.n_cap || spec.mu != ex.spec.mu || spec.t != ex.spec.t ||
      spec.phi != ex.spec.phi || spec.beta != ex.spec.beta) {
    throw PreconditionError("maximize_over_C: expansion built for a different model");
  }
  const double sign = spec.nu < 0.0 ? -1.0 : 1.0;
  const double mu0 = variant == Variant::H ? spec.mu : spec.mu0;

  BogoliubovMaximum out;
  std::map<double, double> memo;  // keyed by |C|
  auto g = [&](double r) {
    if (auto it = memo.find(r); it != memo.end()) return it->second;
    ++out.evaluations;
    const double v = pressure0(spec, substitute_hamiltonian(ex, variant, sign * r, spec.mu0, spec.nu), opt.block_limit);
    memo.emplace(r, v);
    return v;
  };

  constexpr double kInvPhi = 0.6180339887498949;
  auto golden = [&](double a, double b) {
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double gc = g(c), gd = g(d);
    while (b - a >= opt.rel_bracket * std::max(1.0, 0.5 * (a + b))) {
      if (gc >= gd) {
        b = d;
        d = c;
        gd = gc;
        c = b - kInvPhi * (b - a);
        gc = g(c);
      } else {
        a = c;
        c = d;
        gc = gd;
        d = a + kInvPhi * (b - a);
        gd = g(d);
      }
    }
    return std::pair{a, b};
  };
  struct Candidate {
    double r, p, lo, hi;
    bool interior;
  };
  std::vector<Candidate> cands;

  if (opt.hint && opt.hint->first >= 0.0 && opt.hint->second > opt.hint->first) {
    const auto [lo, hi] = *opt.hint;
    const auto [a, b] = golden(lo, hi);
    const double r = 0.5 * (a + b);
    const double margin = 1e-3 * (hi - lo);
    if (r - lo > margin && hi - r > margin) cands.push_back({r, g(r), a, b, true});
  }

  if (cands.empty()) {
    double hi = std::max(1.0, 4.0 * std::abs(spec.nu) * spec.sqrt_volume() / std::max(std::abs(mu0), 0.1));
    const int n = std::max(opt.grid_points, 4);
    std::vector<double> xs, ys;
    for (int doubling = 0;; ++doubling) {
      xs.resize(static_cast<std::size_t>(n) + 1);
      ys.resize(xs.size());
      for (int i = 0; i <= n; ++i) {
        xs[static_cast<std::size_t>(i)] = hi * i / n;
        ys[static_cast<std::size_t>(i)] = g(xs[static_cast<std::size_t>(i)]);
      }
      const auto best = std::max_element(ys.begin(), ys.end());
      if (best != ys.end() - 1) break;
      if (doubling == opt.max_doublings) {
        throw SolverError("maximize_over_C: maximum sits at the expansion limit |C| = " + std::to_string(hi) +
                          "; a larger C_hi is required (p0 may be unbounded at mu0 = " + std::to_string(mu0) + ")");
      }
      hi *= 2.0;
    }

    // Grid-local maxima, each refined by golden section on its neighbours.
    if (ys[0] >= ys[1]) cands.push_back({0.0, ys[0], 0.0, 0.0, false});
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      if (!(ys[i] >= ys[i - 1] && ys[i] > ys[i + 1])) continue;
      const auto [a, b] = golden(xs[i - 1], xs[i + 1]);
      const double r = 0.5 * (a + b);
      // A bracket squeezed onto C = 0 is the boundary maximum.
      if (a == 0.0 && r < opt.rel_bracket) {
        cands.push_back({0.0, g(0.0), 0.0, 0.0, false});
      } else {
        cands.push_back({r, g(r), a, b, true});
      }
    }
  }
  if (cands.empty()) throw SolverError("maximize_over_C: no local maximum found on the C grid");

  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.r < y.r; });
  const Candidate* best = &cands.front();
  for (const auto& c : cands) {
    out.local_maxima.emplace_back(sign * c.r, c.p);
    if (c.p > best->p + opt.tie_tolerance) best = &c;
  }
  if (cands.size() > 1) {
    out.warnings.push_back("p0(C) has " + std::to_string(cands.size()) + " local maxima on the ray");
  }

  out.C_max = best->r == 0.0 ? 0.0 : sign * best->r;
  out.p0_sup = best->p;
  out.bracket = {sign * best->lo, sign * best->hi};
  if (out.bracket.first > out.bracket.second) std::swap(out.bracket.first, out.bracket.second);
  out.interior = best->interior;
  const double h = 1e-4 * std::max(1.0, best->r);
  if (best->interior) {
    out.stationarity_residual = std::abs(g(best->r + h) - g(best->r - h)) / (2.0 * h);
  } else {
    out.stationarity_residual = std::abs(g(h) - g(0.0)) / h;  // one-sided slope at the boundary
  }
  out.sign_consistent = out.C_max == 0.0 || (spec.nu != 0.0 && (out.C_max > 0.0) == (spec.nu > 0.0));
  return out;
}

inline BogoliubovMaximum maximize_over_C(const LatticeModelSpec& spec, Variant variant,
                                         const MaximizeOptions& opt = {}) {
  spec.validate();
  const FockBasis fprime = FockBasis::build(spec, Subspace::Fprime, opt.block_limit);
  return maximize_over_C(substitution_expansion(spec, fprime), spec, variant, opt);
}

inline BogoliubovMaximum maximize_over_C(const SubstitutionExpansion& ex, Variant variant,
                                         const MaximizeOptions& opt = {}) {
  return maximize_over_C(ex, ex.spec, variant, opt);
}

}  // namespace bogolab

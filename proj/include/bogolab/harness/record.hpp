#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bogolab/bogolab.hpp"
#include "bogolab/harness/config.hpp"

namespace bogolab::harness {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One parameter point's full audit. Slacks are pressure (or density)
// differences that must stay non-negative; NaN means "not evaluated".
struct SweepRecord {
  int L = 0;
  int n_cap = 0;
  double beta = kNaN, mu = kNaN, mu0 = kNaN, nu = kNaN;

  double p_V = kNaN;
  double p_prime_V = kNaN;
  double a0_mean_re = kNaN;
  double a0_mean_im = kNaN;
  double N0_mean = kNaN;
  double N_mean = kNaN;
  double b0_fluct = kNaN;
  double C_max = kNaN;
  double p0_sup = kNaN;
  double trW0_pressure = kNaN;

  double slack_eq8 = kNaN;    // p'_V - Tr W0 pressure
  double slack_eq11 = kNaN;   // Tr W0 pressure - p0'(C_max)
  double slack_eq12 = kNaN;   // p'_V - p0'_sup
  double slack_schwarz = kNaN;
  double slack_mono_mu0 = kNaN;  // <N0>(mu0 + h) - <N0>(mu0)

  double resid_eq15 = kNaN;  // |<a0>/sqrt L - (1/2) dp'/dnu|
  double resid_eq16 = kNaN;  // |<N0>/L - dp'/dmu0|
  double resid_envelope_nu = kNaN;
  double resid_envelope_mu0 = kNaN;
  double resid_pde = kNaN;

  double gap_delta = kNaN;
  double gap_subst = kNaN;
  double tail_mass = kNaN;

  // Appended after the frozen columns.
  double bound_nu = kNaN;
  double bound_mu0 = kNaN;
  double ratio_nu = kNaN;
  double ratio_mu0 = kNaN;
  double stability_drift = kNaN;
  std::string status = "ok";

  auto key() const { return std::make_tuple(L, n_cap, beta, mu, mu0, nu); }
};

// Everything about one ladder entry that does not depend on (beta, mu0, nu).
struct LadderContext {
  LadderEntry entry;
  FockBasis full;
  FockBasis fprime;
  HamiltonianParts parts;
  SparseOperator a0;
  std::map<double, std::shared_ptr<const SubstitutionExpansion>> expansions;  // keyed by mu

  static LadderContext build(const SweepConfig& c, const LadderEntry& e, const std::vector<double>& mus) {
    const LatticeModelSpec base = c.spec_for(e, 1.0, 0.0, 0.0, 0.0);
    LadderContext ctx{e, FockBasis::build(base, Subspace::Full, c.dim_guard),
                      FockBasis::build(base, Subspace::Fprime, c.dim_guard), {}, {}, {}};
    ctx.parts = assemble_parts(base, ctx.full);
    ctx.a0 = mode_operator(ctx.full, 0, LadderKind::Annihilate);
    for (double mu : mus) {
      LatticeModelSpec s = base;
      s.mu = mu;
      ctx.expansions.emplace(mu, std::make_shared<const SubstitutionExpansion>(substitution_expansion(s, ctx.fprime)));
    }
    return ctx;
  }
};

namespace detail {

struct PointThermal {
  double p = kNaN;
  Complex a0 = 0.0;
  double N0 = kNaN;
  double N = kNaN;
};

inline PointThermal thermal_at(const LatticeModelSpec& spec, const HamiltonianParts& parts, const SparseOperator& a0,
                               std::size_t block_limit, Spectrum* keep = nullptr) {
  DiagonalizeOptions opt;
  opt.block_limit = block_limit;
  opt.label = "H'";
  const SparseOperator h = compose_hamiltonian(parts, Variant::Hprime, spec.mu, spec.mu0, spec.nu);
  Spectrum s = diagonalize(h, opt);
  const GibbsState g(s, spec.beta);
  PointThermal t;
  t.p = pressure(spec, s);
  t.a0 = g.expectation(a0);
  t.N0 = g.expectation(parts.N0).real();
  t.N = g.expectation(parts.N).real();
  if (keep) *keep = std::move(s);
  return t;
}

inline double relative_drift(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), 1e-12);
}

}  // namespace detail

inline SweepRecord compute_record(const SweepConfig& c, const LadderContext& ctx, double beta, double mu, double mu0,
                                  double nu) {
  SweepRecord r;
  r.L = ctx.entry.L;
  r.n_cap = ctx.entry.n_cap;
  r.beta = beta;
  r.mu = mu;
  r.mu0 = mu0;
  r.nu = nu;
  std::vector<std::string> notes;
  const LatticeModelSpec spec = c.spec_for(ctx.entry, beta, mu, mu0, nu);
  const std::size_t blim = c.dense_block_limit;
  const double h = c.tol.fd_step;
  const double L = spec.volume();
  const double sqrtL = spec.sqrt_volume();

  try {
    Spectrum sp;
    const auto th = detail::thermal_at(spec, ctx.parts, ctx.a0, blim, &sp);
    r.p_prime_V = th.p;
    r.a0_mean_re = th.a0.real();
    r.a0_mean_im = th.a0.imag();
    r.N0_mean = th.N0;
    r.N_mean = th.N;
    r.b0_fluct = th.N0 - std::norm(th.a0);
    if (mu0 == mu) {
      r.p_V = r.p_prime_V;  // the same matrix
    } else {
      DiagonalizeOptions opt;
      opt.vectors = false;
      opt.block_limit = blim;
      opt.label = "H";
      r.p_V = pressure(spec, diagonalize(compose_hamiltonian(ctx.parts, Variant::H, mu, mu0, nu), opt));
    }
    r.slack_schwarz = r.b0_fluct / L;
    r.gap_delta = r.b0_fluct / L;

    MaximizeOptions mopt;
    mopt.block_limit = blim;
    const SubstitutionExpansion& ex = *ctx.expansions.at(mu);
    const BogoliubovMaximum m = maximize_over_C(ex, spec, Variant::Hprime, mopt);
    r.C_max = m.C_max;
    r.p0_sup = m.p0_sup;
    r.slack_eq12 = r.p_prime_V - r.p0_sup;
    r.gap_subst = (std::abs(th.a0) - std::abs(m.C_max)) / sqrtL;
    for (const auto& w : m.warnings) notes.push_back(w);

    if (c.audits.chain) {
      try {
        const DisplacedTrace dt = displaced_trace_pressure(spec, ctx.full, sp, m.C_max, c.tol.tol_trunc);
        r.trW0_pressure = dt.pressure;
        r.tail_mass = dt.tail_mass;
        r.slack_eq8 = r.p_prime_V - dt.pressure;
        r.slack_eq11 = dt.pressure - r.p0_sup;
      } catch (const TruncationError& e) {
        notes.push_back(std::string("chain skipped: ") + e.what());
      }
    }

    if (c.audits.monotonicity) {
      LatticeModelSpec up = spec;
      up.mu0 = mu0 + h;
      r.slack_mono_mu0 = detail::thermal_at(up, ctx.parts, ctx.a0, blim).N0 - th.N0;
    }

    if (c.audits.derivative_identities) {
      const DerivativeIdentityReport d = derivative_identity_check(spec, ctx.parts, h, blim, &sp);
      r.resid_eq15 = d.nu.residual_h;
      r.resid_eq16 = d.mu0.residual_h;
      r.bound_nu = d.nu.error_bound;
      r.bound_mu0 = d.mu0.error_bound;
      r.ratio_nu = d.nu.ratio;
      r.ratio_mu0 = d.mu0.ratio;
      if (!d.nu.smooth || !d.mu0.smooth) notes.push_back("non-smooth point: step-halving ratio outside [3, 5]");
    }

    if (c.audits.envelope && nu != 0.0 && m.interior && std::abs(nu) > h) {
      MaximizeOptions hopt = mopt;
      const double cm = std::abs(m.C_max);
      hopt.hint = std::pair{0.5 * cm, 1.5 * cm + 0.1};
      auto sup_at = [&](double mu0_v, double nu_v) {
        LatticeModelSpec s = spec;
        s.mu0 = mu0_v;
        s.nu = nu_v;
        return maximize_over_C(ex, s, Variant::Hprime, hopt).p0_sup;
      };
      const double dnu = (sup_at(mu0, nu + h) - sup_at(mu0, nu - h)) / (2.0 * h);
      const double dmu0 = (sup_at(mu0 + h, nu) - sup_at(mu0 - h, nu)) / (2.0 * h);
      const double sgn = nu > 0.0 ? 1.0 : -1.0;
      r.resid_envelope_nu = std::abs(dnu - 2.0 * sgn * cm / sqrtL);
      r.resid_envelope_mu0 = std::abs(dmu0 - m.C_max * m.C_max / L);
      r.resid_pde = std::abs(dmu0 - 0.25 * dnu * dnu);
    }

    if (c.audits.stability_recheck) {
      LadderEntry bigger = ctx.entry;
      bigger.n_cap += 2;
      LatticeModelSpec s2 = c.spec_for(bigger, beta, mu, mu0, nu);
      const FockBasis full2 = FockBasis::build(s2, Subspace::Full, c.dim_guard);
      const HamiltonianParts parts2 = assemble_parts(s2, full2);
      const SparseOperator a02 = mode_operator(full2, 0, LadderKind::Annihilate);
      const auto th2 = detail::thermal_at(s2, parts2, a02, blim);
      r.stability_drift = std::max({detail::relative_drift(th.p, th2.p), detail::relative_drift(th.N0, th2.N0),
                                    detail::relative_drift(std::abs(th.a0), std::abs(th2.a0))});
    }
  } catch (const Error& e) {
    notes.insert(notes.begin(), std::string("failed: ") + e.what());
  }

  if (!notes.empty()) {
    std::string s;
    for (const auto& n : notes) s += (s.empty() ? "" : " | ") + n;
    for (char& ch : s) {
      if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
    }
    r.status = s;
  }
  return r;
}

}  // namespace bogolab::harness

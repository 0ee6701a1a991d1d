#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "bogolab/convex.hpp"
#include "bogolab/harness/config.hpp"
#include "bogolab/harness/export.hpp"
#include "bogolab/harness/record.hpp"

namespace bogolab::harness {

inline constexpr const char* kLibraryVersion = "1.0.0";

namespace detail {

inline bool failed(const SweepRecord& r) { return r.status.rfind("failed", 0) == 0; }

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// "strictly decreasing" / "decreasing with <=1 inversion" / "fail".
inline std::pair<std::string, int> trend_verdict(const std::vector<double>& seq) {
  int inversions = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (!(seq[i] < seq[i - 1])) ++inversions;
  }
  if (inversions == 0) return {"strictly decreasing", 0};
  if (inversions == 1) return {"decreasing with <=1 inversion", 1};
  return {"fail", inversions};
}

// Per L, the record with the largest n_cap.
inline std::vector<const SweepRecord*> by_size(std::vector<const SweepRecord*> rs) {
  std::sort(rs.begin(), rs.end(), [](auto* a, auto* b) { return std::tie(a->L, a->n_cap) < std::tie(b->L, b->n_cap); });
  std::vector<const SweepRecord*> out;
  for (auto* r : rs) {
    if (!out.empty() && out.back()->L == r->L) {
      out.back() = r;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

struct ClassTally {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst = std::numeric_limits<double>::infinity();  // min slack, or -max excess
  Json violations = Json::array();

  void add(bool ok, double margin, const SweepRecord* r) {
    ++checked;
    worst = std::min(worst, margin);
    if (!ok) {
      ++failed;
      if (violations.size() < 20 && r) {
        violations.push_back({{"L", r->L}, {"n_cap", r->n_cap}, {"beta", r->beta}, {"mu", r->mu},
                              {"mu0", r->mu0}, {"nu", r->nu}, {"margin", real_to_json(margin)}});
      }
    }
  }
  bool pass() const { return failed == 0; }
  Json json(double tolerance) const {
    return {{"checked", checked},
            {"failed", failed},
            {"worst_margin", checked ? real_to_json(worst) : Json(nullptr)},
            {"tolerance", tolerance},
            {"pass", pass()},
            {"violations", violations}};
  }
};

}  // namespace detail

// Delta(L) per (beta, mu, nu) at mu0 = mu, with the closed-form comparison
// for the free model. Throws when no group spans three ladder sizes.
inline Json equivalence_gap_trend(const std::vector<SweepRecord>& records, bool free_model) {
  std::map<std::tuple<double, double, double>, std::vector<const SweepRecord*>> groups;
  for (const auto& r : records) {
    if (r.mu0 != r.mu || detail::failed(r)) continue;
    groups[{r.beta, r.mu, r.nu}].push_back(&r);
  }
  Json out = Json::array();
  bool any = false;
  for (const auto& [key, members] : groups) {
    const auto [beta, mu, nu] = key;
    const auto seq = detail::by_size(members);
    Json g = {{"beta", beta}, {"mu", mu}, {"nu", nu}, {"sizes", seq.size()}};
    if (seq.size() < 3) {
      g["verdict"] = "insufficient ladder";
      g["pass"] = nullptr;
      out.push_back(g);
      continue;
    }
    any = true;
    std::vector<double> delta, subst;
    Json rows = Json::array();
    bool closed_ok = true;
    for (auto* r : seq) {
      delta.push_back(r->gap_delta);
      subst.push_back(std::abs(r->gap_subst));
      Json row = {{"L", r->L}, {"n_cap", r->n_cap}, {"gap_delta", detail::real_to_json(r->gap_delta)},
                  {"gap_subst", detail::real_to_json(r->gap_subst)}};
      if (free_model && mu < 0.0) {
        const double expect = bose_occupation(beta * std::abs(mu)) / r->L;
        const double rel = std::abs(r->gap_delta - expect) / expect;
        row["closed_form"] = expect;
        row["relative_error"] = rel;
        closed_ok = closed_ok && rel <= 1e-6;
      }
      rows.push_back(row);
    }
    g["sequence"] = rows;
    const auto [verdict, inversions] = detail::trend_verdict(delta);
    g["verdict"] = verdict;
    g["inversions"] = inversions;
    g["subst_gap_verdict"] = detail::trend_verdict(subst).first;
    if (nu == 0.0) {
      g["note"] = "nu = 0: no equivalence claim";
      g["pass"] = nullptr;
    } else if (free_model) {
      g["closed_form_pass"] = mu < 0.0 ? Json(closed_ok) : Json(nullptr);
      g["pass"] = inversions == 0 && (mu >= 0.0 || closed_ok);
    } else {
      g["pass"] = inversions <= 1;
    }
    out.push_back(g);
  }
  if (!any) throw PreconditionError("equivalence_gap_trend: insufficient ladder (need >= 3 sizes at mu0 = mu)");
  return out;
}

inline Json inequality_audit(const std::vector<SweepRecord>& records, const SweepConfig& c) {
  detail::ClassTally trace_upper, trace_lower, sup_bound, schwarz, mono, mono_grid, same_p, ident_nu, ident_mu0, env_nu, env_mu0, pde, stab, parity;
  std::size_t non_smooth = 0;
  const double h = c.tol.fd_step;
  const double env_tol = std::max(1e-5, 5.0 * h * h);
  const double pde_tol = std::max(1e-4, 10.0 * h * h);
  for (const auto& r : records) {
    if (detail::failed(r)) continue;
    const double tail = std::isnan(r.tail_mass) ? 0.0 : r.tail_mass;
    const double chain_tol = c.tol.tol_ineq + 10.0 * tail;
    auto slack = [&](detail::ClassTally& t, double s, double tol) {
      if (!std::isnan(s)) t.add(s >= -tol, s, &r);
    };
    slack(trace_upper, r.slack_eq8, chain_tol);
    slack(trace_lower, r.slack_eq11, chain_tol);
    slack(sup_bound, r.slack_eq12, chain_tol);
    slack(schwarz, r.slack_schwarz, 1e-10);
    slack(mono, r.slack_mono_mu0, 1e-10);
    if (r.mu0 == r.mu) same_p.add(std::abs(r.p_V - r.p_prime_V) <= 1e-12, -std::abs(r.p_V - r.p_prime_V), &r);
    auto smooth = [](double ratio, double resid) { return resid <= 1e-10 || (ratio >= 3.0 && ratio <= 5.0); };
    if (!std::isnan(r.resid_eq15)) {
      if (smooth(r.ratio_nu, r.resid_eq15)) {
        ident_nu.add(r.resid_eq15 <= r.bound_nu, r.bound_nu - r.resid_eq15, &r);
      } else {
        ++non_smooth;
      }
    }
    if (!std::isnan(r.resid_eq16)) {
      if (smooth(r.ratio_mu0, r.resid_eq16)) {
        ident_mu0.add(r.resid_eq16 <= r.bound_mu0, r.bound_mu0 - r.resid_eq16, &r);
      } else {
        ++non_smooth;
      }
    }
    if (!std::isnan(r.resid_envelope_nu)) env_nu.add(r.resid_envelope_nu <= env_tol, env_tol - r.resid_envelope_nu, &r);
    if (!std::isnan(r.resid_envelope_mu0)) env_mu0.add(r.resid_envelope_mu0 <= env_tol, env_tol - r.resid_envelope_mu0, &r);
    if (!std::isnan(r.resid_pde)) pde.add(r.resid_pde <= pde_tol, pde_tol - r.resid_pde, &r);
    if (!std::isnan(r.stability_drift)) stab.add(r.stability_drift < 1e-6, 1e-6 - r.stability_drift, &r);
  }

  // <N0> along each mu0 grid.
  std::map<std::tuple<int, int, double, double, double>, std::vector<const SweepRecord*>> lines;
  for (const auto& r : records) {
    if (!detail::failed(r)) lines[{r.L, r.n_cap, r.beta, r.mu, r.nu}].push_back(&r);
  }
  for (auto& [k, v] : lines) {
    std::sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->mu0 < b->mu0; });
    for (std::size_t i = 1; i < v.size(); ++i) {
      const double d = v[i]->N0_mean - v[i - 1]->N0_mean;
      mono_grid.add(d >= -1e-10, d, v[i]);
    }
  }

  if (c.audits.parity) {
    std::map<std::tuple<int, int, double, double, double, double>, const SweepRecord*> at;
    for (const auto& r : records) {
      if (!detail::failed(r)) at[{r.L, r.n_cap, r.beta, r.mu, r.mu0, r.nu}] = &r;
    }
    for (const auto& [k, r] : at) {
      if (r->nu <= 0.0) continue;
      auto it = at.find({r->L, r->n_cap, r->beta, r->mu, r->mu0, -r->nu});
      if (it == at.end()) continue;
      const double dp = std::abs(r->p_V - it->second->p_V);
      const double da = std::abs(std::abs(r->a0_mean_re) - std::abs(it->second->a0_mean_re));
      parity.add(dp <= 1e-10 && da <= 1e-10, -std::max(dp, da), r);
    }
  }

  Json j = {{"slack_eq8", trace_upper.json(c.tol.tol_ineq)},
            {"slack_eq11", trace_lower.json(c.tol.tol_ineq)},
            {"slack_eq12", sup_bound.json(c.tol.tol_ineq)},
            {"slack_schwarz", schwarz.json(1e-10)},
            {"slack_mono_mu0", mono.json(1e-10)},
            {"mono_mu0_grid", mono_grid.json(1e-10)},
            {"p_prime_equals_p", same_p.json(1e-12)},
            {"resid_eq15", ident_nu.json(0.0)},
            {"resid_eq16", ident_mu0.json(0.0)},
            {"non_smooth_points", non_smooth},
            {"resid_envelope_nu", env_nu.json(env_tol)},
            {"resid_envelope_mu0", env_mu0.json(env_tol)},
            {"resid_pde", pde.json(pde_tol)},
            {"stability", stab.json(1e-6)}};
  if (c.audits.parity) j["parity_nu"] = parity.json(1e-10);
  return j;
}

// The two finite-size inequalities sqrt(<N0>_{mu0}/L) >= sqrt(<N0>_{mu}/L) >=
// |<a0>_{mu}|/sqrt(L) for mu0 >= mu, and how both gaps move along the ladder.
inline Json interchange_limits_probe(const std::vector<SweepRecord>& records) {
  std::map<std::tuple<int, int, double, double, double>, std::vector<const SweepRecord*>> lines;
  for (const auto& r : records) {
    if (!detail::failed(r)) lines[{r.L, r.n_cap, r.beta, r.mu, r.nu}].push_back(&r);
  }
  Json rows = Json::array();
  detail::ClassTally ineq;
  // (beta, mu, nu, mu0) -> per-size (L, left gap, right gap)
  std::map<std::tuple<double, double, double, double>, std::vector<std::tuple<int, int, double, double>>> ladders;
  for (const auto& [k, v] : lines) {
    const SweepRecord* base = nullptr;
    for (auto* r : v) {
      if (r->mu0 == r->mu) base = r;
    }
    if (!base) continue;
    const double L = base->L;
    const double mid = std::sqrt(std::max(base->N0_mean, 0.0) / L);
    const double right = std::abs(Complex(base->a0_mean_re, base->a0_mean_im)) / std::sqrt(L);
    for (auto* r : v) {
      if (r->mu0 < r->mu) continue;
      const double left = std::sqrt(std::max(r->N0_mean, 0.0) / L);
      const double g1 = left - mid, g2 = mid - right;
      const bool ok = g1 >= -1e-10 && g2 >= -1e-10;
      ineq.add(ok, std::min(g1, g2), r);
      rows.push_back({{"L", r->L}, {"n_cap", r->n_cap}, {"beta", r->beta}, {"mu", r->mu}, {"nu", r->nu},
                      {"mu0", r->mu0}, {"sqrt_N0_mu0", left}, {"sqrt_N0_mu", mid}, {"abs_a0", right},
                      {"gap_left", g1}, {"gap_right", g2}, {"pass", ok}});
      if (r->mu0 > r->mu) ladders[{r->beta, r->mu, r->nu, r->mu0}].emplace_back(r->L, r->n_cap, g1, g2);
    }
  }
  if (ladders.empty()) throw PreconditionError("interchange_limits_probe: missing mu0 ladder (need mu0 > mu rows)");
  Json trends = Json::array();
  for (auto& [k, v] : ladders) {
    std::sort(v.begin(), v.end());
    std::vector<double> left, right;
    Json seq = Json::array();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto [L, cap, g1, g2] = v[i];
      if (i + 1 < v.size() && std::get<0>(v[i + 1]) == L) continue;  // largest cap per L
      left.push_back(g1);
      right.push_back(g2);
      seq.push_back({{"L", L}, {"n_cap", cap}, {"gap_left", g1}, {"gap_right", g2}});
    }
    const auto [b, mu, nu, mu0] = k;
    trends.push_back({{"beta", b}, {"mu", mu}, {"nu", nu}, {"mu0", mu0}, {"sequence", seq},
                      {"gap_left_verdict", left.size() >= 2 ? detail::trend_verdict(left).first : "single size"},
                      {"gap_right_verdict", right.size() >= 2 ? detail::trend_verdict(right).first : "single size"}});
  }
  return {{"inequalities", ineq.json(1e-10)}, {"rows", rows}, {"size_trends", trends}};
}

inline bool is_free_model(const SweepConfig& c) {
  for (double v : c.phi) {
    if (v != 0.0) return false;
  }
  return true;
}

inline std::string provenance_compiler() {
#if defined(__clang__)
  return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  return std::string("gcc ") + __VERSION__;
#else
  return "unknown";
#endif
}

// The full report. Deterministic in (records, config).
inline Json build_report(const std::vector<SweepRecord>& records, const SweepConfig& c) {
  Json rep;
  rep["config"] = effective_json(c);
  rep["config_hash"] = config_hash(c);
  rep["provenance"] = {{"library", std::string("bogolab ") + kLibraryVersion},
                       {"compiler", provenance_compiler()},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                     "." + std::to_string(EIGEN_MINOR_VERSION)},
                       {"records", records.size()}};
  Json sections;
  Json matrix;
  bool all = true;

  std::size_t failures = 0;
  Json failed_points = Json::array();
  for (const auto& r : records) {
    if (detail::failed(r)) {
      ++failures;
      failed_points.push_back({{"L", r.L}, {"n_cap", r.n_cap}, {"beta", r.beta}, {"mu", r.mu}, {"mu0", r.mu0},
                               {"nu", r.nu}, {"status", r.status}});
    }
  }
  sections["point_failures"] = failed_points;
  matrix["point_failures"] = {{"checked", records.size()}, {"failed", failures}, {"pass", failures == 0}};
  all = all && failures == 0;

  const Json ineq = inequality_audit(records, c);
  sections["inequality_audit"] = ineq;
  for (const auto& [k, v] : ineq.items()) {
    if (!v.is_object()) continue;
    matrix[k] = {{"checked", v["checked"]}, {"failed", v["failed"]}, {"pass", v["pass"]}};
    all = all && v["pass"].get<bool>();
  }

  try {
    const Json trend = equivalence_gap_trend(records, is_free_model(c));
    sections["equivalence_gap_trend"] = trend;
    std::size_t checked = 0, bad = 0;
    for (const auto& g : trend) {
      if (g["pass"].is_null()) continue;
      ++checked;
      if (!g["pass"].get<bool>()) ++bad;
    }
    matrix["equivalence_gap_trend"] = {{"checked", checked}, {"failed", bad}, {"pass", bad == 0}};
    all = all && bad == 0;
  } catch (const PreconditionError& e) {
    sections["equivalence_gap_trend"] = {{"not_applicable", e.what()}};
  }

  try {
    const Json probe = interchange_limits_probe(records);
    sections["interchange_limits_probe"] = probe;
    const Json& q = probe["inequalities"];
    matrix["interchange_limits_probe"] = {{"checked", q["checked"]}, {"failed", q["failed"]}, {"pass", q["pass"]}};
    all = all && q["pass"].get<bool>();
  } catch (const PreconditionError& e) {
    sections["interchange_limits_probe"] = {{"not_applicable", e.what()}};
  }

  rep["sections"] = sections;
  rep["audit_matrix"] = matrix;
  rep["pass"] = all;
  return rep;
}

// Curves for the convex-analysis audits: p_V(nu), p'_V(mu0) and p0'-sup(mu0)
// per remaining parameter tuple. Labels carry no commas.
inline std::vector<SampledFunction> build_curves(const std::vector<SweepRecord>& records) {
  using detail::fmt;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : records) {
    if (detail::failed(r)) continue;
    const std::string size = "L=" + std::to_string(r.L) + " n_cap=" + std::to_string(r.n_cap);
    const std::string bm = " beta=" + fmt(r.beta) + " mu=" + fmt(r.mu);
    if (r.mu0 == r.mu) series["p_V(nu) " + size + bm].emplace_back(r.nu, r.p_V);
    series["p_prime_V(mu0) " + size + bm + " nu=" + fmt(r.nu)].emplace_back(r.mu0, r.p_prime_V);
    series["p0_sup(mu0) " + size + bm + " nu=" + fmt(r.nu)].emplace_back(r.mu0, r.p0_sup);
  }
  std::vector<SampledFunction> out;
  for (auto& [label, pts] : series) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> xs, ys;
    for (const auto& [x, y] : pts) {
      if (!xs.empty() && xs.back() == x) continue;
      if (std::isnan(y)) continue;
      xs.push_back(x);
      ys.push_back(y);
    }
    if (xs.size() >= 2) out.emplace_back(xs, ys, label);
  }
  return out;
}

}  // namespace bogolab::harness

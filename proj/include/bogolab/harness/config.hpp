#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bogolab/coherent.hpp"
#include "bogolab/error.hpp"
#include "bogolab/model.hpp"

namespace bogolab::harness {

using Json = nlohmann::json;

struct LadderEntry {
  int L = 1;
  int n_cap = 1;
  bool operator==(const LadderEntry&) const = default;
};

struct Tolerances {
  double tol_trunc = kDefaultTolTrunc;
  double tol_ineq = 1e-9;
  double fd_step = 1e-3;
};

struct AuditSwitches {
  bool chain = true;                  // p0 <= Tr W0 <= p at C_max
  bool derivative_identities = true;  // <a0>, <N0> against finite differences of p'
  bool envelope = true;               // derivatives of the sup surface and the PDE residual
  bool monotonicity = true;           // <N0> forward difference in mu0
  bool parity = false;                // requires a nu grid symmetric about 0
  bool stability_recheck = false;     // recompute at n_cap + 2
};

struct SweepConfig {
  std::string name = "sweep";
  double t = 0.0;
  std::vector<double> phi;
  std::vector<LadderEntry> size_ladder;
  std::vector<double> beta{1.0};
  std::vector<double> mu;
  // Exactly one of mu0 (absolute) and mu0_offset (added to mu) is used.
  std::vector<double> mu0;
  std::vector<double> mu0_offset{0.0};
  bool mu0_absolute = false;
  std::vector<double> nu;
  Tolerances tol;
  AuditSwitches audits;
  std::size_t dim_guard = kDefaultDimLimit;
  std::size_t dense_block_limit = kDefaultDimLimit;
  int parallelism = 1;
  std::string out_dir = "run";
  std::string format = "csv";

  std::vector<double> mu0_values(double mu_value) const {
    if (mu0_absolute) return mu0;
    std::vector<double> v;
    for (double d : mu0_offset) v.push_back(mu_value + d);
    return v;
  }

  LatticeModelSpec spec_for(const LadderEntry& e, double beta_v, double mu_v, double mu0_v, double nu_v) const {
    LatticeModelSpec s;
    s.L = e.L;
    s.n_cap = e.n_cap;
    s.t = t;
    s.phi = phi;
    s.beta = beta_v;
    s.mu = mu_v;
    s.mu0 = mu0_v;
    s.nu = nu_v;
    return s;
  }

  // Dimension of the largest basis the sweep will build.
  static std::size_t full_dim(const LadderEntry& e, int extra_cap = 0) {
    const double d = std::pow(static_cast<double>(e.n_cap + extra_cap + 1), e.L);
    return d > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(d);
  }

  void validate() const {
    std::ostringstream err;
    if (size_ladder.empty()) err << "size_ladder is empty. ";
    if (beta.empty()) err << "beta grid is empty. ";
    if (mu.empty()) err << "mu grid is empty. ";
    if (nu.empty()) err << "nu grid is empty. ";
    if (mu0_absolute ? mu0.empty() : mu0_offset.empty()) err << "mu0 grid is empty. ";
    for (double b : beta) {
      if (!(b > 0.0) || !std::isfinite(b)) err << "beta values must be positive. ";
    }
    for (const auto* g : {&mu, &nu, &mu0, &mu0_offset, &phi}) {
      for (double v : *g) {
        if (!std::isfinite(v)) err << "grid values must be finite. ";
      }
    }
    if (!std::isfinite(t)) err << "t must be finite. ";
    if (!(tol.tol_trunc > 0.0)) err << "tol_trunc must be positive. ";
    if (!(tol.tol_ineq >= 0.0)) err << "tol_ineq must be non-negative. ";
    if (!(tol.fd_step > 0.0)) err << "fd_step must be positive. ";
    if (parallelism < 1) err << "parallelism must be >= 1. ";
    if (format != "csv" && format != "json") err << "format must be csv or json. ";
    if (audits.parity) {
      std::multiset<double> a(nu.begin(), nu.end()), b;
      for (double v : nu) b.insert(-v);
      if (a != b) err << "parity audit needs a nu grid symmetric about 0. ";
    }
    if (!err.str().empty()) throw ConfigError("invalid sweep config: " + err.str());
    for (const auto& e : size_ladder) {
      if (e.L < 1 || e.n_cap < 0) throw ConfigError("invalid ladder entry L=" + std::to_string(e.L));
      const int extra = audits.stability_recheck ? 2 : 0;
      const std::size_t d = full_dim(e, extra);
      if (d > dim_guard) {
        throw SizeError("ladder entry L=" + std::to_string(e.L) + ", n_cap=" + std::to_string(e.n_cap) +
                        (extra ? " (with the n_cap+2 recheck)" : "") + " needs dimension " + std::to_string(d) +
                        " > dim_guard " + std::to_string(dim_guard));
      }
    }
  }
};

// The effective configuration, every default spelled out. Execution-only
// settings (parallelism, output location, format) are left out so reports do
// not depend on them.
inline Json effective_json(const SweepConfig& c) {
  Json ladder = Json::array();
  for (const auto& e : c.size_ladder) ladder.push_back({{"L", e.L}, {"n_cap", e.n_cap}});
  Json grids = {{"beta", c.beta}, {"mu", c.mu}, {"nu", c.nu}};
  if (c.mu0_absolute) {
    grids["mu0"] = c.mu0;
  } else {
    grids["mu0_offset"] = c.mu0_offset;
  }
  return {
      {"name", c.name},
      {"model", {{"t", c.t}, {"phi", c.phi}}},
      {"size_ladder", ladder},
      {"grids", grids},
      {"tolerances", {{"tol_trunc", c.tol.tol_trunc}, {"tol_ineq", c.tol.tol_ineq}, {"fd_step", c.tol.fd_step}}},
      {"audits",
       {{"chain", c.audits.chain},
        {"derivative_identities", c.audits.derivative_identities},
        {"envelope", c.audits.envelope},
        {"monotonicity", c.audits.monotonicity},
        {"parity", c.audits.parity},
        {"stability_recheck", c.audits.stability_recheck}}},
      {"limits", {{"dim_guard", c.dim_guard}, {"dense_block_limit", c.dense_block_limit}}},
  };
}

// FNV-1a over the compact dump of the effective config.
inline std::string config_hash(const SweepConfig& c) {
  const std::string text = effective_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read_opt(const Json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace detail

inline SweepConfig parse_config(const Json& j) {
  using detail::read_opt;
  using detail::reject_unknown;
  SweepConfig c;
  reject_unknown(j,
                 {"name", "model", "size_ladder", "grids", "tolerances", "audits", "limits", "parallelism", "output"},
                 "config");
  read_opt(j, "name", c.name, "config");
  if (j.contains("model")) {
    const Json& m = j.at("model");
    reject_unknown(m, {"t", "phi"}, "model");
    read_opt(m, "t", c.t, "model");
    read_opt(m, "phi", c.phi, "model");
  }
  if (!j.contains("size_ladder") || !j.at("size_ladder").is_array()) {
    throw ConfigError("config needs a size_ladder array");
  }
  for (const auto& e : j.at("size_ladder")) {
    reject_unknown(e, {"L", "n_cap"}, "size_ladder entry");
    if (!e.contains("L") || !e.contains("n_cap")) throw ConfigError("size_ladder entries need L and n_cap");
    LadderEntry le;
    read_opt(e, "L", le.L, "size_ladder");
    read_opt(e, "n_cap", le.n_cap, "size_ladder");
    c.size_ladder.push_back(le);
  }
  if (!j.contains("grids")) throw ConfigError("config needs a grids section");
  const Json& g = j.at("grids");
  reject_unknown(g, {"beta", "mu", "mu0", "mu0_offset", "nu"}, "grids");
  if (g.contains("mu0") && g.contains("mu0_offset")) throw ConfigError("grids: give mu0 or mu0_offset, not both");
  read_opt(g, "beta", c.beta, "grids");
  read_opt(g, "mu", c.mu, "grids");
  read_opt(g, "nu", c.nu, "grids");
  if (g.contains("mu0")) {
    c.mu0_absolute = true;
    read_opt(g, "mu0", c.mu0, "grids");
  }
  read_opt(g, "mu0_offset", c.mu0_offset, "grids");
  if (!g.contains("nu")) throw ConfigError("grids: nu grid is missing");
  if (!g.contains("mu")) throw ConfigError("grids: mu grid is missing");
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    reject_unknown(t, {"tol_trunc", "tol_ineq", "fd_step"}, "tolerances");
    read_opt(t, "tol_trunc", c.tol.tol_trunc, "tolerances");
    read_opt(t, "tol_ineq", c.tol.tol_ineq, "tolerances");
    read_opt(t, "fd_step", c.tol.fd_step, "tolerances");
  }
  if (j.contains("audits")) {
    const Json& a = j.at("audits");
    reject_unknown(a, {"chain", "derivative_identities", "envelope", "monotonicity", "parity", "stability_recheck"},
                   "audits");
    read_opt(a, "chain", c.audits.chain, "audits");
    read_opt(a, "derivative_identities", c.audits.derivative_identities, "audits");
    read_opt(a, "envelope", c.audits.envelope, "audits");
    read_opt(a, "monotonicity", c.audits.monotonicity, "audits");
    read_opt(a, "parity", c.audits.parity, "audits");
    read_opt(a, "stability_recheck", c.audits.stability_recheck, "audits");
  }
  if (j.contains("limits")) {
    const Json& l = j.at("limits");
    reject_unknown(l, {"dim_guard", "dense_block_limit"}, "limits");
    read_opt(l, "dim_guard", c.dim_guard, "limits");
    read_opt(l, "dense_block_limit", c.dense_block_limit, "limits");
  }
  read_opt(j, "parallelism", c.parallelism, "config");
  if (j.contains("output")) {
    const Json& o = j.at("output");
    reject_unknown(o, {"dir", "format"}, "output");
    read_opt(o, "dir", c.out_dir, "output");
    read_opt(o, "format", c.format, "output");
  }
  return c;
}

inline SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

}  // namespace bogolab::harness

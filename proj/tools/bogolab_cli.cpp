// bogolab: command-line front end for the lattice Bogoliubov laboratory.
//
//   bogolab check [--spec FILE | model flags]
//   bogolab sweep CONFIG
//   bogolab griffiths CONFIG
//   bogolab report RUN_DIR
//
// Exit codes: 0 all verdicts pass, 1 an audit failed, 2 configuration or
// guard error, 3 I/O error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bogolab/bogolab.hpp"
#include "bogolab/convex.hpp"
#include "bogolab/harness/config.hpp"
#include "bogolab/harness/export.hpp"
#include "bogolab/harness/report.hpp"
#include "bogolab/harness/sweep.hpp"

namespace fs = std::filesystem;
using namespace bogolab;
using namespace bogolab::harness;

namespace {

enum Exit { kPass = 0, kAuditFail = 1, kConfig = 2, kIo = 3 };

struct Common {
  std::string out;
  std::string format = "json";
  int parallel = 0;
  std::optional<double> tol_ineq;
  std::optional<double> fd_step;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output file (check, griffiths, report) or run directory (sweep)");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--parallel", c.parallel, "Worker threads for independent parameter points")
      ->check(CLI::PositiveNumber);
  app->add_option("--tol-ineq", c.tol_ineq, "Inequality tolerance")->check(CLI::NonNegativeNumber);
  app->add_option("--fd-step", c.fd_step, "Finite-difference step")->check(CLI::PositiveNumber);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text(c.out, text);
  }
}

// A flat table of (name, value, pass) rows as CSV.
std::string rows_csv(const Json& rows) {
  std::ostringstream s;
  s << "check,value,pass\n";
  for (const auto& r : rows) {
    std::string v = r["value"].is_string() ? r["value"].get<std::string>() : r["value"].dump();
    std::replace(v.begin(), v.end(), ',', ';');
    s << r["check"].get<std::string>() << ',' << v << ',' << (r["pass"].get<bool>() ? "pass" : "FAIL") << '\n';
  }
  return s.str();
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  std::string spec_file;
  LatticeModelSpec spec;
  std::vector<double> phi;
  std::size_t dim_limit = kDefaultDimLimit;
  int samples = 200;
  int n_max = 12;
  std::uint64_t seed = 12345;
};

LatticeModelSpec spec_from_json(const Json& j) {
  harness::detail::reject_unknown(j, {"L", "n_cap", "t", "phi", "beta", "mu", "mu0", "nu"}, "spec");
  LatticeModelSpec s;
  harness::detail::read_opt(j, "L", s.L, "spec");
  harness::detail::read_opt(j, "n_cap", s.n_cap, "spec");
  harness::detail::read_opt(j, "t", s.t, "spec");
  harness::detail::read_opt(j, "phi", s.phi, "spec");
  harness::detail::read_opt(j, "beta", s.beta, "spec");
  harness::detail::read_opt(j, "mu", s.mu, "spec");
  harness::detail::read_opt(j, "mu0", s.mu0, "spec");
  harness::detail::read_opt(j, "nu", s.nu, "spec");
  return s;
}

int run_check(CheckArgs& a, const Common& c) {
  LatticeModelSpec spec = a.spec;
  if (!a.spec_file.empty()) {
    try {
      spec = spec_from_json(parse_json_file(a.spec_file));
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("spec file: ") + e.what());
    }
  } else {
    spec.phi = a.phi;
  }
  spec.validate();
  Json rows = Json::array();
  bool all = true;
  auto row = [&](const std::string& name, Json value, bool pass) {
    rows.push_back({{"check", name}, {"value", value}, {"pass", pass}});
    all = all && pass;
  };

  const FockBasis full = FockBasis::build(spec, Subspace::Full, a.dim_limit);
  const FockBasis fprime = FockBasis::build(spec, Subspace::Fprime, a.dim_limit);
  row("basis_full_dim", full.dim(), true);
  row("basis_fprime_dim", fprime.dim(), true);

  bool roundtrip = true;
  for (std::size_t i = 0; i < full.dim(); ++i) roundtrip = roundtrip && full.index_of(full.state(i)) == i;
  row("basis_roundtrip", roundtrip, roundtrip);

  const AssembledHamiltonian h = assemble_hamiltonian(spec, full, Variant::H);
  const SparseOperator hp = compose_hamiltonian(h.parts, Variant::Hprime, spec.mu, spec.mu0, spec.nu);
  row("H_exactly_hermitian", h.op.is_exactly_hermitian(), h.op.is_exactly_hermitian());
  row("Hprime_exactly_hermitian", hp.is_exactly_hermitian(), hp.is_exactly_hermitian());
  const double nsplit = (h.parts.N - h.parts.Nprime - h.parts.N0).max_abs();
  row("N_equals_Nprime_plus_N0", nsplit, nsplit == 0.0);
  const SparseOperator hsame = compose_hamiltonian(h.parts, Variant::Hprime, spec.mu, spec.mu, spec.nu);
  const double same = (hsame - h.op).max_abs();
  row("Hprime_at_mu0_eq_mu_equals_H", same, same == 0.0);

  const double hnorm = std::max(1.0, h.op.max_abs());
  if (spec.nu == 0.0) {
    const double cn = commutator(h.op, h.parts.N).max_abs();
    row("commutator_H_N_at_nu0", cn, cn <= 1e-12 * hnorm);
    if (spec.is_free()) {
      const double c0 = commutator(h.op, h.parts.N0).max_abs();
      row("commutator_H_N0_at_nu0_free", c0, c0 <= 1e-12 * hnorm);
    }
  }

  // Fprime states embedded in Full are annihilated by a0.
  const SparseOperator a0 = mode_operator(full, 0, LadderKind::Annihilate);
  double a0_on_fprime = 0.0;
  for (const auto& e : a0.entries()) {
    if (full.occupation(e.col, 0) == 0) a0_on_fprime = std::max(a0_on_fprime, std::abs(e.value));
  }
  row("a0_annihilates_fprime", a0_on_fprime, a0_on_fprime == 0.0);

  DiagonalizeOptions opt;
  opt.block_limit = a.dim_limit;
  const Spectrum s = diagonalize(h.op, opt);
  const double recon = reconstruction_residual(h.op, s);
  row("reconstruction_residual", recon, recon <= 1e-9 * hnorm);
  const double ortho = orthonormality_residual(s);
  row("orthonormality_residual", ortho, ortho <= 1e-10);

  opt.vectors = false;
  const AssembledHamiltonian hm = [&] {
    LatticeModelSpec m = spec;
    m.nu = -spec.nu;
    return assemble_hamiltonian(m, full, Variant::H);
  }();
  const Spectrum sm = diagonalize(hm.op, opt);
  double spread = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) spread = std::max(spread, std::abs(s.eigenvalues()[i] - sm.eigenvalues()[i]));
  row("spectrum_nu_parity", spread, spread <= 1e-10);

  const Spectrum sp = diagonalize(hp, {.vectors = true, .block_limit = a.dim_limit, .label = "H'", .basis_ref = full.id()});
  const auto obs = observables_bundle(spec, sp, {{"a0", &a0}, {"N0", &h.parts.N0}, {"N", &h.parts.N}});
  row("p_prime_V", obs.p_V, std::isfinite(obs.p_V));
  row("a0_mean_re", obs.a0_mean.real(), true);
  row("a0_mean_im", obs.a0_mean.imag(), std::abs(obs.a0_mean.imag()) <= 1e-10);
  row("b0_fluct", obs.b0_fluct, obs.b0_fluct >= -1e-10);

  if (spec.phi_at(0) > 0.0) {
    const auto sb = superstability_check(spec, {0, a.n_max}, a.samples, a.seed);
    row("superstability_a", sb.a, true);
    row("superstability_b", sb.b, true);
    row("superstability_worst_slack", sb.worst_slack, sb.pass);
  } else {
    row("superstability", "skipped: phi(0) <= 0", true);
  }

  if (c.format == "csv") {
    emit(c, rows_csv(rows));
  } else {
    emit(c, emit_json({{"spec",
                        {{"L", spec.L}, {"n_cap", spec.n_cap}, {"t", spec.t}, {"phi", spec.phi}, {"beta", spec.beta},
                         {"mu", spec.mu}, {"mu0", spec.mu0}, {"nu", spec.nu}}},
                       {"checks", rows},
                       {"pass", all}}));
  }
  return all ? kPass : kAuditFail;
}

// ---------------------------------------------------------------- sweep

void apply_overrides(SweepConfig& cfg, const Common& c) {
  if (c.parallel > 0) cfg.parallelism = c.parallel;
  if (c.tol_ineq) cfg.tol.tol_ineq = *c.tol_ineq;
  if (c.fd_step) cfg.tol.fd_step = *c.fd_step;
}

int run_sweep_cmd(const std::string& config_path, const Common& c, bool format_given) {
  SweepConfig cfg = load_config(config_path);
  apply_overrides(cfg, c);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (format_given) cfg.format = c.format;
  cfg.validate();

  const auto records = run_sweep(cfg, [](std::size_t done, std::size_t total) {
    std::fprintf(stderr, "\r[sweep] %zu/%zu points", done, total);
    if (done == total) std::fputc('\n', stderr);
  });
  const Json report = build_report(records, cfg);
  const fs::path dir(cfg.out_dir);
  if (cfg.format == "csv") {
    write_records_csv((dir / "records.csv").string(), records);
  } else {
    write_text((dir / "records.json").string(), emit_json({{"records", records_to_json(records)}}));
  }
  write_text((dir / "report.json").string(), emit_json(report));
  Json cfg_echo = effective_json(cfg);
  cfg_echo["parallelism"] = cfg.parallelism;
  cfg_echo["output"] = {{"dir", cfg.out_dir}, {"format", cfg.format}};
  write_text((dir / "config.json").string(), emit_json(cfg_echo));
  write_sampled_csv((dir / "curves.csv").string(), build_curves(records));

  std::printf("records: %zu  config_hash: %s  verdict: %s\n", records.size(),
              report["config_hash"].get<std::string>().c_str(), report["pass"].get<bool>() ? "pass" : "FAIL");
  for (const auto& [k, v] : report["audit_matrix"].items()) {
    std::printf("  %-26s checked=%-5s failed=%-4s %s\n", k.c_str(), v["checked"].dump().c_str(),
                v["failed"].dump().c_str(), v["pass"].get<bool>() ? "pass" : "FAIL");
  }
  return report["pass"].get<bool>() ? kPass : kAuditFail;
}

// ---------------------------------------------------------------- report

int run_report_cmd(const std::string& run_dir, const Common& c) {
  const fs::path dir(run_dir);
  const Json cfg_json = parse_json_file((dir / "config.json").string());
  Json stripped = cfg_json;
  stripped.erase("parallelism");
  stripped.erase("output");
  SweepConfig cfg = parse_config(stripped);
  apply_overrides(cfg, c);
  std::vector<SweepRecord> records;
  if (fs::exists(dir / "records.csv")) {
    records = read_records_csv((dir / "records.csv").string());
  } else if (fs::exists(dir / "records.json")) {
    records = records_from_json(parse_json_file((dir / "records.json").string()).at("records"));
  } else {
    throw IoError("no records.csv or records.json in '" + run_dir + "'");
  }
  const Json report = build_report(records, cfg);
  if (c.format == "csv") {
    Json rows = Json::array();
    for (const auto& [k, v] : report["audit_matrix"].items()) {
      rows.push_back({{"check", k}, {"value", v["failed"]}, {"pass", v["pass"]}});
    }
    emit(c, rows_csv(rows));
  } else {
    emit(c, emit_json(report));
  }
  return report["pass"].get<bool>() ? kPass : kAuditFail;
}

// ---------------------------------------------------------------- griffiths

// {
//   "curves": "path/to/curves.csv",          relative to the config file
//   "convexity": [{"label": "...", "parity": "even"|"none"}],
//   "griffiths": [{"family": ["..."], "limit": "...", "x": [..], "tolerance": t, "warn_only": bool}]
// }
int run_griffiths_cmd(const std::string& config_path, const Common& c) {
  Json g;
  try {
    g = parse_json_file(config_path);
    harness::detail::reject_unknown(g, {"curves", "convexity", "griffiths"}, "griffiths config");
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("griffiths config: ") + e.what());
  }
  if (!g.contains("curves")) throw ConfigError("griffiths config needs a 'curves' path");
  fs::path curves = g["curves"].get<std::string>();
  if (curves.is_relative()) curves = fs::path(config_path).parent_path() / curves;
  const auto fns = read_sampled_csv(curves.string());
  auto find = [&](const std::string& label) -> const SampledFunction& {
    for (const auto& f : fns) {
      if (f.label() == label) return f;
    }
    throw ConfigError("no curve labelled '" + label + "' in " + curves.string());
  };

  Json rows = Json::array();
  bool all = true;
  for (const auto& item : g.value("convexity", Json::array())) {
    const auto& f = find(item.at("label").get<std::string>());
    const std::string par = item.value("parity", std::string("none"));
    if (par != "even" && par != "none") throw ConfigError("parity must be even or none");
    const auto r = convexity_and_parity_audit(f, par == "even" ? Parity::Even : Parity::None);
    rows.push_back({{"check", "convexity " + f.label()}, {"value", r.min_second_difference}, {"pass", r.convex}});
    all = all && r.convex;
    if (r.parity_checked) {
      rows.push_back({{"check", "parity " + f.label()}, {"value", r.max_parity_defect}, {"pass", r.even}});
      all = all && r.even;
    }
  }
  for (const auto& item : g.value("griffiths", Json::array())) {
    std::vector<SampledFunction> family;
    for (const auto& l : item.at("family")) family.push_back(find(l.get<std::string>()));
    const auto& f = find(item.at("limit").get<std::string>());
    const bool warn_only = item.value("warn_only", false);
    const double tol = item.value("tolerance", -1.0);
    for (const auto& xv : item.at("x")) {
      const double x = xv.get<double>();
      const auto r = griffiths_check(family, f, x, tol);
      const std::string what = "griffiths x=" + harness::detail::fmt(x) + " limit=" + f.label();
      std::ostringstream v;
      v.precision(10);
      v << "[" << r.f_prime_left << " <= " << r.liminf_proxy << " <= " << r.limsup_proxy << " <= "
        << r.f_prime_right << "] tol " << r.tolerance;
      rows.push_back({{"check", what + (warn_only && !r.pass ? " (finite-size warning)" : "")},
                      {"value", v.str()},
                      {"pass", r.pass || warn_only}});
      all = all && (r.pass || warn_only);
    }
  }
  if (c.format == "csv") {
    emit(c, rows_csv(rows));
  } else {
    emit(c, emit_json({{"checks", rows}, {"pass", all}}));
  }
  return all ? kPass : kAuditFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice Bogoliubov laboratory"};
  app.require_subcommand(1);

  Common common;
  CheckArgs check;
  auto* cmd_check = app.add_subcommand("check", "Build one system and audit its operators and superstability");
  add_common(cmd_check, common);
  cmd_check->add_option("--spec", check.spec_file, "JSON file with L, n_cap, t, phi, beta, mu, mu0, nu");
  cmd_check->add_option("--L", check.spec.L, "Lattice sites");
  cmd_check->add_option("--n-cap", check.spec.n_cap, "Per-mode occupation cap");
  cmd_check->add_option("--t", check.spec.t, "Hopping");
  cmd_check->add_option("--phi", check.phi, "Pair potential phi(0), phi(1), ...")->delimiter(',');
  cmd_check->add_option("--beta", check.spec.beta, "Inverse temperature");
  cmd_check->add_option("--mu", check.spec.mu, "Chemical potential");
  cmd_check->add_option("--mu0", check.spec.mu0, "Mode-0 chemical potential of H'");
  cmd_check->add_option("--nu", check.spec.nu, "Symmetry-breaking field");
  cmd_check->add_option("--dim-limit", check.dim_limit, "Basis dimension guard");
  cmd_check->add_option("--samples", check.samples, "Random placements per particle number");
  cmd_check->add_option("--n-max", check.n_max, "Largest particle number for the superstability check");
  cmd_check->add_option("--seed", check.seed, "Sampling seed");

  std::string sweep_config;
  auto* cmd_sweep = app.add_subcommand("sweep", "Run the full audit pipeline over a parameter sweep");
  add_common(cmd_sweep, common);
  cmd_sweep->add_option("config", sweep_config, "Sweep config (JSON)")->required();

  std::string griffiths_config;
  auto* cmd_grif = app.add_subcommand("griffiths", "Convexity, parity and Griffiths audits on curve CSVs");
  add_common(cmd_grif, common);
  cmd_grif->add_option("config", griffiths_config, "Audit config (JSON)")->required();

  std::string run_dir;
  auto* cmd_report = app.add_subcommand("report", "Recompute verdicts from a finished run directory");
  add_common(cmd_report, common);
  cmd_report->add_option("run_dir", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  try {
    if (*cmd_check) return run_check(check, common);
    if (*cmd_sweep) return run_sweep_cmd(sweep_config, common, cmd_sweep->count("--format") > 0);
    if (*cmd_grif) return run_griffiths_cmd(griffiths_config, common);
    if (*cmd_report) return run_report_cmd(run_dir, common);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kAuditFail;
  }
  return kConfig;
}

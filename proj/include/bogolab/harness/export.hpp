#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bogolab/error.hpp"
#include "bogolab/harness/record.hpp"

namespace bogolab::harness {

// Frozen column order; new columns are only ever appended.
inline const std::vector<std::string>& frozen_columns() {
  static const std::vector<std::string> cols{
      "L",          "n_cap",         "beta",          "mu",           "mu0",          "nu",
      "p_V",        "p_prime_V",     "a0_mean_re",    "N0_mean",      "N_mean",       "b0_fluct",
      "C_max",      "p0_sup",        "trW0_pressure", "slack_eq8",    "slack_eq11",   "slack_eq12",
      "slack_schwarz", "slack_mono_mu0", "resid_eq15", "resid_eq16", "resid_envelope_nu", "resid_envelope_mu0",
      "resid_pde",  "gap_delta",     "gap_subst",     "tail_mass"};
  return cols;
}

inline const std::vector<std::string>& appended_columns() {
  static const std::vector<std::string> cols{"bound_nu", "bound_mu0",      "ratio_nu",
                                             "ratio_mu0", "stability_drift", "status"};
  return cols;
}

namespace detail {

using RealField = double SweepRecord::*;

inline const std::vector<std::pair<std::string, RealField>>& real_fields() {
  static const std::vector<std::pair<std::string, RealField>> f{
      {"beta", &SweepRecord::beta},
      {"mu", &SweepRecord::mu},
      {"mu0", &SweepRecord::mu0},
      {"nu", &SweepRecord::nu},
      {"p_V", &SweepRecord::p_V},
      {"p_prime_V", &SweepRecord::p_prime_V},
      {"a0_mean_re", &SweepRecord::a0_mean_re},
      {"a0_mean_im", &SweepRecord::a0_mean_im},
      {"N0_mean", &SweepRecord::N0_mean},
      {"N_mean", &SweepRecord::N_mean},
      {"b0_fluct", &SweepRecord::b0_fluct},
      {"C_max", &SweepRecord::C_max},
      {"p0_sup", &SweepRecord::p0_sup},
      {"trW0_pressure", &SweepRecord::trW0_pressure},
      {"slack_eq8", &SweepRecord::slack_eq8},
      {"slack_eq11", &SweepRecord::slack_eq11},
      {"slack_eq12", &SweepRecord::slack_eq12},
      {"slack_schwarz", &SweepRecord::slack_schwarz},
      {"slack_mono_mu0", &SweepRecord::slack_mono_mu0},
      {"resid_eq15", &SweepRecord::resid_eq15},
      {"resid_eq16", &SweepRecord::resid_eq16},
      {"resid_envelope_nu", &SweepRecord::resid_envelope_nu},
      {"resid_envelope_mu0", &SweepRecord::resid_envelope_mu0},
      {"resid_pde", &SweepRecord::resid_pde},
      {"gap_delta", &SweepRecord::gap_delta},
      {"gap_subst", &SweepRecord::gap_subst},
      {"tail_mass", &SweepRecord::tail_mass},
      {"bound_nu", &SweepRecord::bound_nu},
      {"bound_mu0", &SweepRecord::bound_mu0},
      {"ratio_nu", &SweepRecord::ratio_nu},
      {"ratio_mu0", &SweepRecord::ratio_mu0},
      {"stability_drift", &SweepRecord::stability_drift},
  };
  return f;
}

inline RealField find_field(const std::string& name) {
  for (const auto& [n, f] : real_fields()) {
    if (n == name) return f;
  }
  return nullptr;
}

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(const std::string& s) {
  if (s == "nan" || s.empty()) return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

inline Json real_to_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline double real_from_json(const Json& j) {
  if (j.is_null()) return kNaN;
  if (j.is_string()) return parse_real(j.get<std::string>());
  return j.get<double>();
}

inline void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory '" + parent.string() + "': " + ec.message());
}

}  // namespace detail

inline std::string records_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream out;
  bool first = true;
  for (const auto* cols : {&frozen_columns(), &appended_columns()}) {
    for (const auto& c : *cols) {
      out << (first ? "" : ",") << c;
      first = false;
    }
  }
  out << '\n';
  for (const auto& r : records) {
    out << r.L << ',' << r.n_cap;
    for (const auto* cols : {&frozen_columns(), &appended_columns()}) {
      for (const auto& c : *cols) {
        if (c == "L" || c == "n_cap" || c == "status") continue;
        out << ',' << detail::format_real(r.*detail::find_field(c));
      }
    }
    out << ',' << r.status << '\n';
  }
  return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  detail::ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_records_csv(const std::string& path, const std::vector<SweepRecord>& records) {
  write_text(path, records_csv(records));
}

// Reads any CSV whose header contains the frozen columns; unknown extra
// columns are ignored.
inline std::vector<SweepRecord> read_records_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  for (const auto& c : frozen_columns()) {
    if (std::find(header.begin(), header.end(), c) == header.end()) {
      throw IoError("'" + path + "' lacks column '" + c + "'");
    }
  }
  std::vector<SweepRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() < header.size() && !(cells.size() + 1 == header.size() && header.back() == "status")) {
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " cells");
    }
    SweepRecord r;
    r.status.clear();
    try {
      for (std::size_t k = 0; k < header.size() && k < cells.size(); ++k) {
        const std::string& name = header[k];
        if (name == "L") {
          r.L = std::stoi(cells[k]);
        } else if (name == "n_cap") {
          r.n_cap = std::stoi(cells[k]);
        } else if (name == "status") {
          r.status = cells[k];
        } else if (auto f = detail::find_field(name)) {
          r.*f = detail::parse_real(cells[k]);
        }
      }
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
    out.push_back(r);
  }
  return out;
}

inline Json record_to_json(const SweepRecord& r) {
  Json j;
  j["L"] = r.L;
  j["n_cap"] = r.n_cap;
  for (const auto& [name, f] : detail::real_fields()) j[name] = detail::real_to_json(r.*f);
  j["status"] = r.status;
  return j;
}

inline SweepRecord record_from_json(const Json& j) {
  SweepRecord r;
  r.L = j.at("L").get<int>();
  r.n_cap = j.at("n_cap").get<int>();
  for (const auto& [name, f] : detail::real_fields()) {
    if (j.contains(name)) r.*f = detail::real_from_json(j.at(name));
  }
  r.status = j.value("status", std::string("ok"));
  return r;
}

inline Json records_to_json(const std::vector<SweepRecord>& rs) {
  Json a = Json::array();
  for (const auto& r : rs) a.push_back(record_to_json(r));
  return a;
}

inline std::vector<SweepRecord> records_from_json(const Json& a) {
  std::vector<SweepRecord> out;
  for (const auto& j : a) out.push_back(record_from_json(j));
  return out;
}

// Shortest round-trip doubles; the parsed value is bit-identical to the
// emitted one.
inline std::string emit_json(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_json_file(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

}  // namespace bogolab::harness

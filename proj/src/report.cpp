#include "yblab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace yblab::report {

namespace {

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double get_num(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing key '") + key + "'");
  if (it->is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!it->is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return it->get<double>();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json to_json(const weights::AnySpin& s) {
  if (const auto* d = std::get_if<weights::DualSpin>(&s)) return {{"x", num(d->x)}, {"n", d->n}};
  return {{"x", num(std::get<weights::Spin>(s).x)}};
}

weights::AnySpin spin_from_json(const json& j) {
  if (j.is_number()) return weights::Spin{j.get<double>()};
  if (!j.is_object()) throw ConfigError("spin must be a number or an object with 'x' (and 'n')");
  for (const auto& [k, v] : j.items())
    if (k != "x" && k != "n") throw ConfigError("unknown key '" + k + "' in spin");
  const double x = get_num(j, "x");
  if (j.contains("n")) {
    if (!j["n"].is_number_integer()) throw ConfigError("key 'n' must be an integer");
    return weights::DualSpin{x, j["n"].get<long>()};
  }
  return weights::Spin{x};
}

json to_json(const verify::StarConfig& cfg) {
  json outer = json::array();
  for (const auto& s : cfg.outer) outer.push_back(to_json(s));
  return {{"outer", outer}, {"spectral", {num(cfg.spectral[0]), num(cfg.spectral[1]), num(cfg.spectral[2])}}};
}

verify::StarConfig star_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("star config must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "outer" && k != "spectral") throw ConfigError("unknown key '" + k + "' in star config");
  if (!j.contains("outer") || !j["outer"].is_array() || j["outer"].size() != 3)
    throw ConfigError("key 'outer' must be an array of 3 spins");
  if (!j.contains("spectral") || !j["spectral"].is_array() || j["spectral"].size() != 3)
    throw ConfigError("key 'spectral' must be an array of 3 numbers");
  verify::StarConfig cfg;
  for (int i = 0; i < 3; ++i) {
    cfg.outer[i] = spin_from_json(j["outer"][i]);
    if (!j["spectral"][i].is_number()) throw ConfigError("key 'spectral' must hold numbers");
    cfg.spectral[i] = j["spectral"][i].get<double>();
  }
  return cfg;
}

json to_json(const verify::VerificationReport& r) {
  return {{"lhs", num(r.lhs)},
          {"rhs", num(r.rhs)},
          {"abs_residual", num(r.abs_residual)},
          {"rel_residual", num(r.rel_residual)},
          {"r_factor", num(r.r_factor)},
          {"error_estimate", num(r.error_estimate)},
          {"budget_used", {{"truncation", num(r.budget_used.truncation)}, {"evaluations", r.budget_used.evaluations}}},
          {"passed", r.passed},
          {"note", r.note}};
}

verify::VerificationReport verification_from_json(const json& j) {
  verify::VerificationReport r;
  r.lhs = get_num(j, "lhs");
  r.rhs = get_num(j, "rhs");
  r.abs_residual = get_num(j, "abs_residual");
  r.rel_residual = get_num(j, "rel_residual");
  r.r_factor = get_num(j, "r_factor");
  r.error_estimate = get_num(j, "error_estimate");
  if (j.contains("budget_used")) {
    r.budget_used.truncation = get_num(j["budget_used"], "truncation");
    r.budget_used.evaluations = j["budget_used"].value("evaluations", std::int64_t{0});
  }
  r.passed = j.value("passed", false);
  r.note = j.value("note", std::string{});
  return r;
}

json to_json(const lattice::PartitionResult& r) {
  return {{"log_z", num(r.log_z)},
          {"per_site", num(r.per_site)},
          {"method", r.method == lattice::Method::Exact ? "exact" : "mc"},
          {"error_estimate", num(r.error_estimate)},
          {"internal_sites", r.internal_sites}};
}

json to_json(const lattice::Observables& o) {
  return {{"mean_log_w", num(o.mean_log_w)},
          {"std_error", num(o.std_error)},
          {"tau_int", num(o.tau_int)},
          {"acceptance", num(o.acceptance)},
          {"samples", o.series.size()},
          {"warnings", o.warnings}};
}

json model_to_json(const weights::Model& m) {
  json j{{"kind", m.name()}, {"eta", num(m.eta())}};
  if (const auto* e = m.as_elliptic()) {
    j["p"] = num(e->nomes.p.real());
    j["q"] = num(e->nomes.q.real());
  } else if (const auto* h = m.as_hyperbolic()) {
    j["b"] = {num(h->b.b.real()), num(h->b.b.imag())};
    j["regime"] = h->b.regime == specfun::Regime::RealPositive ? "real" : "unit_circle";
  }
  return j;
}

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::string out = "id,lhs,rhs,rel_residual,passed\n";
  for (const auto& r : rows)
    out += r.id + "," + fmt17(r.lhs) + "," + fmt17(r.rhs) + "," + fmt17(r.rel_residual) + "," +
           (r.passed ? "true" : "false") + "\n";
  return out;
}

std::string series_csv(const lattice::Observables& o) {
  std::string out = "sweep,mean_log_w\n";
  for (std::size_t i = 0; i < o.series.size(); ++i) out += std::to_string(i) + "," + fmt17(o.series[i]) + "\n";
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move report into '" + path + "'");
  }
}

}  // namespace yblab::report

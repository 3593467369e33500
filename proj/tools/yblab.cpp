#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "yblab/lattice.hpp"
#include "yblab/report.hpp"
#include "yblab/specfun.hpp"
#include "yblab/verify.hpp"

using namespace yblab;
using report::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string model = "gamma";
  double p = 0.3;
  double q = 0.3;
  double b = 1.0;
  double b_angle = 0.0;  // > 0 selects b = e^{i b_angle}
  std::string alpha;      // comma triple (verify-str) or single value
  std::string x;          // comma triple of outer spins for a single star
  std::string n;          // comma triple of integer spin parts
  int count = 0;          // 0: per-command default
  double tol = 0.0;       // 0: per-command default
  std::uint64_t seed = 7;
  std::string out;
  std::string format = "json";
  std::string config;

  // specfun-eval
  std::string fn;
  std::string z;

  // verify-inversion / verify-limit
  std::string form = "pointwise";
  std::string limit = "hyperbolic";
  std::string schedule;

  // lattice
  int rows = 4;
  int cols = 4;
  int nodes = 64;
  int n_max = 8;
  int sweeps = 20000;
  int burn_in = 2000;
  double x_step = 0.5;
  double n_step_prob = 0.3;
};

std::vector<double> parse_list(const std::string& s, const char* key) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError(std::string("key '") + key + "': cannot parse '" + item + "' as a number");
    }
  }
  return v;
}

Complex parse_complex(const std::string& s, const char* key) {
  const auto v = parse_list(s, key);
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  throw ConfigError(std::string("key '") + key + "' must be 're' or 're,im'");
}

// Applies a JSON config file: keys fill options the command line left unset.
void apply_config(CLI::App& app, Options& o, const std::set<std::string>& allowed, json& extra) {
  if (o.config.empty()) return;
  std::ifstream f(o.config);
  if (!f) throw ConfigError("key 'config': cannot open '" + o.config + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("key 'config': " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("key 'config': top level must be an object");
  for (auto& [key, val] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + o.config);
    if (key == "configs" || key == "boundary") {
      extra[key] = val;
      continue;
    }
    std::string flag = "--" + key;
    for (auto& c : flag)
      if (c == '_') c = '-';
    const CLI::Option* opt = app.get_option_no_throw(flag);
    if (opt && opt->count() > 0) continue;
    auto need_num = [&]() {
      if (!val.is_number()) throw ConfigError("key '" + key + "' must be a number");
      return val.get<double>();
    };
    auto need_int = [&]() {
      if (!val.is_number_integer()) throw ConfigError("key '" + key + "' must be an integer");
      return val.get<long long>();
    };
    auto need_str = [&]() {
      if (val.is_string()) return val.get<std::string>();
      if (val.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < val.size(); ++i) {
          if (!val[i].is_number()) throw ConfigError("key '" + key + "' must hold numbers");
          s += (i ? "," : "") + json(val[i]).dump();
        }
        return s;
      }
      if (val.is_number()) return json(val).dump();
      throw ConfigError("key '" + key + "' must be a string, number or array");
    };
    if (key == "model") o.model = need_str();
    else if (key == "p") o.p = need_num();
    else if (key == "q") o.q = need_num();
    else if (key == "b") o.b = need_num();
    else if (key == "b_angle") o.b_angle = need_num();
    else if (key == "alpha" || key == "beta") o.alpha = need_str();
    else if (key == "x") o.x = need_str();
    else if (key == "n") o.n = need_str();
    else if (key == "count") o.count = static_cast<int>(need_int());
    else if (key == "tol") o.tol = need_num();
    else if (key == "seed") o.seed = static_cast<std::uint64_t>(need_int());
    else if (key == "form") o.form = need_str();
    else if (key == "limit") o.limit = need_str();
    else if (key == "schedule") o.schedule = need_str();
    else if (key == "rows") o.rows = static_cast<int>(need_int());
    else if (key == "cols") o.cols = static_cast<int>(need_int());
    else if (key == "nodes") o.nodes = static_cast<int>(need_int());
    else if (key == "n_max") o.n_max = static_cast<int>(need_int());
    else if (key == "sweeps") o.sweeps = static_cast<int>(need_int());
    else if (key == "burn_in") o.burn_in = static_cast<int>(need_int());
    else if (key == "x_step") o.x_step = need_num();
    else if (key == "n_step_prob") o.n_step_prob = need_num();
  }
}

weights::Model build_model(const Options& o) {
  if (o.model == "elliptic") {
    if (!(o.p > 0.0 && o.p < 1.0)) throw ConfigError("key 'p' must lie in (0, 1)");
    if (!(o.q > 0.0 && o.q < 1.0)) throw ConfigError("key 'q' must lie in (0, 1)");
    return weights::Model::elliptic(o.p, o.q);
  }
  if (o.model == "hyperbolic") {
    if (o.b_angle != 0.0) {
      if (!(o.b_angle > 0.0 && o.b_angle < 0.5 * std::numbers::pi))
        throw ConfigError("key 'b_angle' must lie in (0, pi/2)");
      return weights::Model::hyperbolic(specfun::ModularParam::unit_circle(o.b_angle));
    }
    if (!(o.b > 0.0)) throw ConfigError("key 'b' must be > 0");
    return weights::Model::hyperbolic(specfun::ModularParam::real(o.b));
  }
  if (o.model == "gamma") return weights::Model::gamma();
  throw ConfigError("key 'model' must be one of elliptic, hyperbolic, gamma (got '" + o.model + "')");
}

json base_config(const Options& o, const weights::Model& m, const char* command) {
  return {{"command", command}, {"model", report::model_to_json(m)}, {"seed", o.seed}};
}

void emit(const Options& o, const json& items, const std::vector<report::CsvRow>& rows) {
  if (o.format != "json" && o.format != "csv") throw ConfigError("key 'format' must be json or csv");
  const std::string text = o.format == "json" ? report::dump(items) : report::to_csv(rows);
  if (o.out.empty())
    std::cout << text;
  else
    report::write_atomic(o.out, text);
}

int threads() { return verify::default_threads(); }

int cmd_specfun(const Options& o) {
  if (o.fn.empty()) throw ConfigError("key 'fn' is required");
  const Complex z = o.z.empty() ? Complex{} : parse_complex(o.z, "z");
  Complex v;
  if (o.fn == "log_gamma") v = specfun::log_gamma(z);
  else if (o.fn == "gamma") v = std::exp(specfun::log_gamma(z));
  else if (o.fn == "theta1") v = specfun::theta1(z, o.q);
  else if (o.fn == "elliptic_gamma") v = specfun::elliptic_gamma(z, specfun::EllipticNomes::real(o.p, o.q));
  else if (o.fn == "kappa_elliptic") v = specfun::kappa_elliptic(z.real(), specfun::EllipticNomes::real(o.p, o.q));
  else if (o.fn == "ncqdl" || o.fn == "kappa_hyperbolic") {
    const auto b = o.b_angle != 0.0 ? specfun::ModularParam::unit_circle(o.b_angle) : specfun::ModularParam::real(o.b);
    v = o.fn == "ncqdl" ? specfun::ncqdl(z, b) : specfun::kappa_hyperbolic(z, b);
  } else {
    throw ConfigError("key 'fn' must be one of log_gamma, gamma, theta1, elliptic_gamma, kappa_elliptic, ncqdl, "
                      "kappa_hyperbolic (got '" + o.fn + "')");
  }
  if (v.imag() == 0.0)
    std::printf("%.17g\n", v.real());
  else
    std::printf("%.17g %+.17gi\n", v.real(), v.imag());
  return kExitOk;
}

std::array<weights::AnySpin, 3> parse_outer(const Options& o, const weights::Model& m) {
  const auto xs = o.x.empty() ? std::vector<double>{0.0, 0.0, 0.0} : parse_list(o.x, "x");
  if (xs.size() != 3) throw ConfigError("key 'x' must be a comma triple");
  std::vector<double> ns{0.0, 0.0, 0.0};
  if (!o.n.empty()) {
    if (!m.uses_dual_spins()) throw ConfigError("key 'n' applies to the gamma model only");
    ns = parse_list(o.n, "n");
    if (ns.size() != 3) throw ConfigError("key 'n' must be a comma triple");
  }
  std::array<weights::AnySpin, 3> out;
  for (int i = 0; i < 3; ++i) {
    if (m.uses_dual_spins()) {
      if (ns[i] != std::floor(ns[i])) throw ConfigError("key 'n' must hold integers");
      out[i] = weights::DualSpin{xs[i], static_cast<long>(ns[i])};
    } else {
      out[i] = weights::Spin{xs[i]};
    }
  }
  return out;
}

int cmd_verify_str(CLI::App& app, Options& o) {
  json extra;
  apply_config(app, o, {"model", "p", "q", "b", "b_angle", "alpha", "beta", "x", "n", "count", "tol", "seed", "configs"},
               extra);
  const auto m = build_model(o);
  const double tol = o.tol > 0.0 ? o.tol : (m.kind() == weights::ModelKind::Elliptic ? 1e-8 : 1e-6);
  if (o.tol < 0.0) throw ConfigError("key 'tol' must be > 0");
  std::vector<verify::StarConfig> configs;
  std::vector<verify::VerificationReport> reports;
  if (extra.contains("configs") || !o.alpha.empty()) {
    if (extra.contains("configs")) {
      if (!extra["configs"].is_array()) throw ConfigError("key 'configs' must be an array");
      for (const auto& c : extra["configs"]) configs.push_back(report::star_from_json(c));
    } else {
      verify::StarConfig c;
      const auto a = parse_list(o.alpha, "alpha");
      if (a.size() != 3) throw ConfigError("key 'alpha' must be a comma triple");
      c.spectral = {a[0], a[1], a[2]};
      c.outer = parse_outer(o, m);
      configs.push_back(c);
    }
    for (const auto& c : configs) {
      try {
        c.validate(m);
      } catch (const Error& e) {
        throw ConfigError(std::string("key 'alpha': ") + e.what());
      }
    }
    PrecisionBudget budget = m.budget();
    budget.rel_tol = tol;
    reports.resize(configs.size());
    verify::parallel_for(static_cast<int>(configs.size()), threads(),
                         [&](int i) { reports[i] = verify::str_residual(m, configs[i], budget); });
  } else {
    const int count = o.count > 0 ? o.count : (m.uses_dual_spins() ? 50 : 20);
    reports = verify::run_str_campaign(m, count, tol, o.seed, threads(), &configs);
  }
  json items = json::array();
  std::vector<report::CsvRow> rows;
  bool all = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    json item = base_config(o, m, "verify-str");
    item["id"] = i;
    item["tol"] = tol;
    item["config"] = report::to_json(configs[i]);
    item["report"] = report::to_json(reports[i]);
    items.push_back(item);
    rows.push_back({std::to_string(i), reports[i].lhs, reports[i].rhs, reports[i].rel_residual, reports[i].passed});
    all = all && reports[i].passed;
  }
  emit(o, items, rows);
  return all ? kExitOk : kExitFail;
}

int cmd_verify_inversion(CLI::App& app, Options& o) {
  json extra;
  apply_config(app, o, {"model", "p", "q", "b", "b_angle", "alpha", "count", "tol", "seed", "form"}, extra);
  const auto m = build_model(o);
  json items = json::array();
  std::vector<report::CsvRow> rows;
  bool all = true;
  if (o.form == "pointwise") {
    const double tol = o.tol > 0.0 ? o.tol : 1e-9;
    const int count = o.count > 0 ? o.count : 1000;
    std::vector<verify::InversionDraw> draws(count);
    std::vector<double> res(count);
    for (int i = 0; i < count; ++i) {
      auto rng = verify::item_rng(o.seed, static_cast<std::uint64_t>(i));
      draws[i] = verify::random_inversion_draw(m, rng);
      if (!o.alpha.empty()) {
        const auto a = parse_list(o.alpha, "alpha");
        if (a.size() != 1) throw ConfigError("key 'alpha' must be a single value for the pointwise form");
        draws[i].alpha = a[0];
      }
    }
    verify::parallel_for(count, threads(), [&](int i) {
      res[i] = verify::inversion_pointwise(m, draws[i].alpha, draws[i].s1, draws[i].s2);
    });
    for (int i = 0; i < count; ++i) {
      const bool ok = res[i] <= tol;
      json item = base_config(o, m, "verify-inversion");
      item["id"] = i;
      item["form"] = "pointwise";
      item["tol"] = tol;
      item["alpha"] = draws[i].alpha;
      item["s1"] = report::to_json(draws[i].s1);
      item["s2"] = report::to_json(draws[i].s2);
      item["residual"] = res[i];
      item["passed"] = ok;
      items.push_back(item);
      rows.push_back({std::to_string(i), 1.0 + res[i], 1.0, res[i], ok});
      all = all && ok;
    }
  } else if (o.form == "weak") {
    if (m.kind() != weights::ModelKind::Elliptic) throw ConfigError("key 'form': weak inversion needs the elliptic model");
    const double tol = o.tol > 0.0 ? o.tol : 1e-3;
    double alpha = 0.3 * m.eta();
    if (!o.alpha.empty()) {
      const auto a = parse_list(o.alpha, "alpha");
      if (a.size() != 1) throw ConfigError("key 'alpha' must be a single value for the weak form");
      alpha = a[0];
    }
    const auto fns = verify::standard_test_functions();
    const auto pts = verify::standard_weak_points();
    const int total = static_cast<int>(fns.size() * pts.size());
    std::vector<verify::VerificationReport> reps(total);
    verify::parallel_for(total, threads(), [&](int i) {
      PrecisionBudget budget = m.budget();
      budget.rel_tol = 1e-10;
      reps[i] = verify::inversion_weak(m, alpha, pts[i % pts.size()], fns[i / pts.size()].f, budget);
      verify::finalize(reps[i], tol);
    });
    for (int i = 0; i < total; ++i) {
      json item = base_config(o, m, "verify-inversion");
      item["id"] = i;
      item["form"] = "weak";
      item["tol"] = tol;
      item["alpha"] = alpha;
      item["x"] = pts[i % pts.size()];
      item["test_function"] = fns[i / pts.size()].name;
      item["report"] = report::to_json(reps[i]);
      items.push_back(item);
      rows.push_back({std::to_string(i), reps[i].lhs, reps[i].rhs, reps[i].rel_residual, reps[i].passed});
      all = all && reps[i].passed;
    }
  } else {
    throw ConfigError("key 'form' must be pointwise or weak (got '" + o.form + "')");
  }
  emit(o, items, rows);
  return all ? kExitOk : kExitFail;
}

int cmd_verify_limit(CLI::App& app, Options& o) {
  json extra;
  apply_config(app, o, {"limit", "schedule", "tol"}, extra);
  verify::LimitSchedule sched;
  json items = json::array();
  std::vector<report::CsvRow> rows;
  bool all = true;
  auto add = [&](const std::string& id, const json& probe, const char* quantity,
                 const std::vector<verify::LimitPoint>& pts, bool ok) {
    json item{{"command", "verify-limit"}, {"limit", o.limit}, {"id", id}, {"probe", probe}, {"quantity", quantity},
              {"schedule", sched.control}};
    json ratios = json::array();
    for (const auto& p : pts) ratios.push_back({{"control", p.control}, {"ratio", p.ratio}});
    item["points"] = ratios;
    item["passed"] = ok;
    items.push_back(item);
    const double last = pts.empty() ? 0.0 : pts.back().ratio;
    rows.push_back({id, last, 1.0, std::abs(last - 1.0), ok});
    all = all && ok;
  };
  if (o.limit == "hyperbolic") {
    sched.control = o.schedule.empty() ? std::vector<double>{0.2, 0.1, 0.05} : parse_list(o.schedule, "schedule");
    sched.validate();
    const double tol = o.tol > 0.0 ? o.tol : 0.01;
    const auto probes = verify::default_hyperbolic_probes();
    std::vector<std::vector<verify::LimitPoint>> res(probes.size());
    verify::parallel_for(static_cast<int>(probes.size()), threads(),
                         [&](int i) { res[i] = verify::hyperbolic_limit_residual(sched, probes[i]); });
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const auto& p = probes[i];
      const bool ok = verify::shrinking(res[i]) && std::abs(res[i].back().ratio - 1.0) <= tol;
      add(std::to_string(i), {{"b", p.b}, {"alpha", p.alpha}, {"x", p.x}, {"y", p.y}}, "weight", res[i], ok);
    }
  } else if (o.limit == "strong") {
    sched.control = o.schedule.empty() ? std::vector<double>{0.3, 0.2, 0.1} : parse_list(o.schedule, "schedule");
    sched.validate();
    const auto probes = verify::default_strong_probes();
    std::vector<verify::StrongCouplingResult> res(probes.size());
    verify::parallel_for(static_cast<int>(probes.size()), threads(),
                         [&](int i) { res[i] = verify::strong_coupling_residual(sched, probes[i]); });
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const auto& p = probes[i];
      const json pj{{"beta", p.beta}, {"m", p.m}, {"n", p.n}, {"x", p.x}, {"y", p.y}};
      add(std::to_string(i) + "-weight", pj, "weight", res[i].weight, verify::shrinking(res[i].weight));
      add(std::to_string(i) + "-spin_weight", pj, "spin_weight", res[i].spin_weight,
          verify::shrinking(res[i].spin_weight));
      add(std::to_string(i) + "-kappa", pj, "kappa", res[i].kappa, verify::shrinking(res[i].kappa));
    }
  } else {
    throw ConfigError("key 'limit' must be hyperbolic or strong (got '" + o.limit + "')");
  }
  emit(o, items, rows);
  return all ? kExitOk : kExitFail;
}

lattice::LatticeSpec build_spec(const Options& o, const weights::Model& m, const json& extra) {
  lattice::LatticeSpec spec;
  spec.rows = o.rows;
  spec.cols = o.cols;
  double alpha = 0.5 * m.eta();
  if (!o.alpha.empty()) {
    const auto a = parse_list(o.alpha, "alpha");
    if (a.size() != 1) throw ConfigError("key 'alpha' must be a single value for lattice commands");
    alpha = a[0];
  }
  spec.alpha = alpha;
  if (extra.contains("boundary")) {
    if (!extra["boundary"].is_array()) throw ConfigError("key 'boundary' must be an array of spins");
    for (const auto& s : extra["boundary"]) {
      auto sp = report::spin_from_json(s);
      if (m.uses_dual_spins() && std::holds_alternative<weights::Spin>(sp))
        sp = weights::DualSpin{std::get<weights::Spin>(sp).x, 0};
      spec.boundary.push_back(sp);
    }
  }
  try {
    spec.validate(m);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("key 'alpha': ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(std::string("key 'boundary' / 'rows' / 'cols': ") + e.what());
  }
  return spec;
}

json spec_json(const lattice::LatticeSpec& s) {
  json b = json::array();
  for (const auto& v : s.boundary) b.push_back(report::to_json(v));
  return {{"rows", s.rows}, {"cols", s.cols}, {"alpha", s.alpha}, {"boundary", b}};
}

int cmd_lattice_exact(CLI::App& app, Options& o) {
  json extra;
  apply_config(app, o, {"model", "p", "q", "b", "b_angle", "alpha", "rows", "cols", "nodes", "n_max", "boundary"}, extra);
  const auto m = build_model(o);
  const auto spec = build_spec(o, m, extra);
  const auto grid = lattice::GridDiscretization::for_graph(m, spec.to_graph(m), o.nodes, m.uses_dual_spins() ? o.n_max : 0);
  const auto r = lattice::exact_partition(spec, m, grid);
  json item = base_config(o, m, "lattice-exact");
  item.erase("seed");
  item["id"] = 0;
  item["spec"] = spec_json(spec);
  item["grid"] = {{"nodes", o.nodes}, {"n_max", grid.n_max}, {"scale", grid.scale}};
  item["result"] = report::to_json(r);
  if (o.format == "csv") {
    const std::string text = "id,log_z,per_site,error_estimate,internal_sites\n0," + json(r.log_z).dump() +
                             "," + json(r.per_site).dump() + "," +
                             json(r.error_estimate).dump() +
                             "," + std::to_string(r.internal_sites) + "\n";
    if (o.out.empty()) std::cout << text; else report::write_atomic(o.out, text);
  } else {
    emit(o, json::array({item}), {});
  }
  return kExitOk;
}

int cmd_lattice_mc(CLI::App& app, Options& o) {
  json extra;
  apply_config(app, o,
               {"model", "p", "q", "b", "b_angle", "alpha", "rows", "cols", "boundary", "sweeps", "burn_in", "x_step",
                "n_step_prob", "seed"},
               extra);
  const auto m = build_model(o);
  const auto spec = build_spec(o, m, extra);
  lattice::MCConfig mc;
  mc.sweeps = o.sweeps;
  mc.burn_in = o.burn_in;
  mc.x_step = o.x_step;
  mc.n_step_prob = m.uses_dual_spins() ? o.n_step_prob : 0.0;
  mc.seed = o.seed;
  try {
    mc.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("key 'sweeps' / 'burn_in' / 'x_step' / 'n_step_prob': ") + e.what());
  }
  const auto obs = lattice::mc_run(spec, m, mc);
  for (const auto& w : obs.warnings) std::cerr << w << "\n";
  if (o.format == "csv") {
    const std::string text = report::series_csv(obs);
    if (o.out.empty()) std::cout << text; else report::write_atomic(o.out, text);
  } else {
    json item = base_config(o, m, "lattice-mc");
    item["id"] = 0;
    item["spec"] = spec_json(spec);
    item["mc"] = {{"sweeps", mc.sweeps}, {"burn_in", mc.burn_in}, {"x_step", mc.x_step}, {"n_step_prob", mc.n_step_prob}};
    item["observables"] = report::to_json(obs);
    emit(o, json::array({item}), {});
  }
  return obs.warnings.empty() ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for two-spin integrable lattice models"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* c) {
    c->add_option("--model", o.model, "elliptic, hyperbolic or gamma")->capture_default_str();
    c->add_option("--p", o.p, "elliptic nome p")->capture_default_str();
    c->add_option("--q", o.q, "elliptic nome q")->capture_default_str();
    c->add_option("--b", o.b, "real modular parameter b")->capture_default_str();
    c->add_option("--b-angle", o.b_angle, "use b = exp(i angle) instead of a real b");
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--tol", o.tol, "pass tolerance (default per model)");
    c->add_option("--seed", o.seed, "random seed")->capture_default_str();
    c->add_option("--out", o.out, "report path (stdout if empty)");
    c->add_option("--format", o.format, "json or csv")->capture_default_str();
    c->add_option("--config", o.config, "JSON file with the same keys as the flags");
  };

  auto* spec = app.add_subcommand("specfun-eval", "evaluate one special function");
  spec->add_option("--fn", o.fn, "log_gamma, gamma, theta1, elliptic_gamma, kappa_elliptic, ncqdl, kappa_hyperbolic")
      ->required();
  spec->add_option("--z", o.z, "argument: 're' or 're,im'");
  spec->add_option("--p", o.p, "nome p")->capture_default_str();
  spec->add_option("--q", o.q, "nome q")->capture_default_str();
  spec->add_option("--b", o.b, "real modular parameter b")->capture_default_str();
  spec->add_option("--b-angle", o.b_angle, "use b = exp(i angle)");

  auto* str = app.add_subcommand("verify-str", "star-triangle relation on random or given configurations");
  add_model(str);
  add_common(str);
  str->add_option("--count", o.count, "number of random configurations (default 50 gamma, 20 otherwise)");
  str->add_option("--alpha,--beta", o.alpha, "spectral triple a1,a2,a3 for a single configuration");
  str->add_option("--x", o.x, "outer spins x1,x2,x3 for a single configuration");
  str->add_option("--n", o.n, "integer spin parts n1,n2,n3 (gamma)");

  auto* inv = app.add_subcommand("verify-inversion", "inversion relations");
  add_model(inv);
  add_common(inv);
  inv->add_option("--form", o.form, "pointwise or weak")->capture_default_str();
  inv->add_option("--count", o.count, "pointwise draws (default 1000)");
  inv->add_option("--alpha,--beta", o.alpha, "fixed spectral value");

  auto* lim = app.add_subcommand("verify-limit", "hyperbolic and strong-coupling limits");
  lim->add_option("--limit", o.limit, "hyperbolic or strong")->capture_default_str();
  lim->add_option("--schedule", o.schedule, "comma list of decreasing controls");
  lim->add_option("--tol", o.tol, "bound on |ratio - 1| at the last control (hyperbolic)");
  lim->add_option("--out", o.out, "report path");
  lim->add_option("--format", o.format, "json or csv")->capture_default_str();
  lim->add_option("--config", o.config, "JSON file with the same keys as the flags");

  auto add_lattice = [&](CLI::App* c) {
    add_model(c);
    c->add_option("--alpha,--beta", o.alpha, "horizontal spectral value (default eta/2)");
    c->add_option("--rows", o.rows, "rows")->capture_default_str();
    c->add_option("--cols", o.cols, "columns")->capture_default_str();
    c->add_option("--out", o.out, "report path");
    c->add_option("--format", o.format, "json or csv")->capture_default_str();
    c->add_option("--config", o.config, "JSON file; may also carry 'boundary'");
  };
  auto* lex = app.add_subcommand("lattice-exact", "partition function of a small lattice");
  add_lattice(lex);
  lex->add_option("--nodes", o.nodes, "quadrature nodes per site")->capture_default_str();
  lex->add_option("--n-max", o.n_max, "integer spin cutoff (gamma)")->capture_default_str();

  auto* lmc = app.add_subcommand("lattice-mc", "Metropolis sampling of a lattice");
  add_lattice(lmc);
  lmc->add_option("--sweeps", o.sweeps, "sweeps")->capture_default_str();
  lmc->add_option("--burn-in", o.burn_in, "burn-in sweeps")->capture_default_str();
  lmc->add_option("--x-step", o.x_step, "proposal width")->capture_default_str();
  lmc->add_option("--n-step-prob", o.n_step_prob, "probability of an integer move")->capture_default_str();
  lmc->add_option("--seed", o.seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*spec) return cmd_specfun(o);
    if (*str) return cmd_verify_str(*str, o);
    if (*inv) return cmd_verify_inversion(*inv, o);
    if (*lim) return cmd_verify_limit(*lim, o);
    if (*lex) return cmd_lattice_exact(*lex, o);
    if (*lmc) return cmd_lattice_mc(*lmc, o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitConfig;
}

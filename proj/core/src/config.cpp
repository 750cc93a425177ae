#include "semiclassica/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "semiclassica/parallel.hpp"

namespace semiclassica {

json ExperimentConfig::to_json() const {
  json j;
  j["command"] = command;
  j["potential"] = potential;
  if (!poly_coeffs.empty()) j["poly_coeffs"] = poly_coeffs;
  j["n"] = n;
  j["group"] = group;
  j["grid_L"] = grid_L;
  j["grid_N"] = grid_N;
  j["hbars"] = hbars;
  j["t"] = t;
  j["eps"] = eps;
  j["mode"] = mode;
  json obs = json::array();
  for (const auto& o : observables) {
    json jo;
    jo["type"] = o.type;
    jo["center"] = o.center;
    jo["width"] = o.width;
    jo["index"] = o.index;
    obs.push_back(jo);
  }
  j["observables"] = obs;
  j["seed"] = seed;
  j["workers"] = workers;
  j["eig_k"] = eig_k;
  j["degeneracy_threshold"] = degeneracy_threshold;
  j["emergence_threshold"] = emergence_threshold;
  return j;
}

ExperimentConfig parse_config(const json& j) {
  static const std::set<std::string> known = {
      "command", "potential", "poly_coeffs", "n", "group", "grid_L", "grid_N", "hbars",
      "t", "eps", "mode", "observables", "out_dir", "seed", "workers", "svg", "binary",
      "svg_width", "eig_k", "degeneracy_threshold", "emergence_threshold"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("unknown config key: " + it.key());

  ExperimentConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("command", c.command);
  get("potential", c.potential);
  get("poly_coeffs", c.poly_coeffs);
  get("n", c.n);
  get("group", c.group);
  get("grid_L", c.grid_L);
  get("grid_N", c.grid_N);
  get("hbars", c.hbars);
  get("t", c.t);
  get("eps", c.eps);
  get("mode", c.mode);
  get("out_dir", c.out_dir);
  get("seed", c.seed);
  get("workers", c.workers);
  get("svg", c.svg);
  get("binary", c.binary);
  get("svg_width", c.svg_width);
  get("eig_k", c.eig_k);
  get("degeneracy_threshold", c.degeneracy_threshold);
  get("emergence_threshold", c.emergence_threshold);

  if (j.contains("observables")) {
    c.observables.clear();
    for (const auto& jo : j.at("observables")) {
      ObservableSpec o;
      o.type = jo.value("type", "gaussian-bump");
      o.center = jo.value("center", std::vector<double>{});
      o.width = jo.value("width", 0.3);
      o.index = jo.value("index", 0);
      c.observables.push_back(o);
    }
  }
  if (c.n != 1 && c.n != 2) throw ConfigError("config: n must be 1 or 2");
  if (c.hbars.empty()) throw ConfigError("config: hbars must be non-empty");
  for (double h : c.hbars)
    if (!(h > 0)) throw ConfigError("config: hbar values must be positive");
  if (!(c.t > 0)) throw ConfigError("config: t must be positive");
  if (c.mode != "schrodinger" && c.mode != "berezin-gibbs")
    throw ConfigError("config: mode must be schrodinger or berezin-gibbs");
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

Potential build_potential(const ExperimentConfig& cfg) {
  if (!cfg.poly_coeffs.empty()) return make_polynomial_potential(cfg.n, cfg.poly_coeffs);
  return potential_by_name(cfg.potential, cfg.n);
}

GroupAction build_group(const ExperimentConfig& cfg) { return group_by_name(cfg.group); }

std::vector<Symbol> build_observables(const ExperimentConfig& cfg) {
  std::vector<Symbol> out;
  for (const auto& o : cfg.observables) {
    PhasePoint c;
    c.dim = cfg.n;
    for (int a = 0; a < cfg.n && a < static_cast<int>(o.center.size()); ++a) c.q[a] = o.center[a];
    for (int a = 0; a < cfg.n && cfg.n + a < static_cast<int>(o.center.size()); ++a)
      c.p[a] = o.center[cfg.n + a];
    if (o.type == "gaussian-bump")
      out.push_back(make_gaussian_bump(c, o.width));
    else if (o.type == "coordinate")
      out.push_back(make_coordinate_with_cutoff(cfg.n, o.index, c, o.width));
    else if (o.type == "poly-cutoff")
      out.push_back(make_qsquared_with_cutoff(cfg.n, o.index, c, o.width));
    else
      throw ConfigError("unknown observable type: " + o.type);
  }
  if (out.empty()) {
    // usable default: a bump on the first minimizer
    Potential V = build_potential(cfg);
    PhasePoint c = V.minimizers.empty() ? PhasePoint{cfg.n, {0, 0}, {0, 0}} : V.minimizers[0];
    out.push_back(make_gaussian_bump(c, 0.3));
  }
  return out;
}

SweepOptions sweep_options(const ExperimentConfig& cfg) {
  SweepOptions o;
  o.grid_L = cfg.grid_L;
  o.grid_N = cfg.grid_N;
  o.t = cfg.t;
  o.eig.seed = cfg.seed;
  o.eig.degeneracy_threshold = cfg.degeneracy_threshold;
  o.workers = cfg.workers;
  return o;
}

json run_experiment(const ExperimentConfig& cfg) {
  if (cfg.workers > 0) set_worker_count(cfg.workers);
  Potential V = build_potential(cfg);
  GroupAction G = build_group(cfg);
  SweepOptions opts = sweep_options(cfg);

  json result;
  if (cfg.command == "ground") {
    GridSpec g = GridSpec::position(cfg.n, cfg.grid_L, cfg.grid_N);
    json per_hbar = json::array();
    for (double hbar : cfg.hbars) {
      Hamiltonian H = build_hamiltonian(V, hbar, g);
      EigenResult eig = lowest_eigenpairs(H, cfg.eig_k, opts.eig);
      json row;
      row["hbar"] = hbar;
      row["energies"] = eig.energies;
      row["residuals"] = eig.residuals;
      row["converged"] = eig.converged;
      per_hbar.push_back(row);
    }
    result["ground"] = per_hbar;
  } else if (cfg.command == "husimi") {
    double hbar = cfg.hbars.front();
    GridSpec g = GridSpec::position(cfg.n, cfg.grid_L, cfg.grid_N);
    GroundState gs = ground_state(V, hbar, g, opts.eig);
    PhaseGrid pg = experiment_phase_grid(V, cfg.t, hbar, {}, g);
    HusimiField field = husimi(gs.psi, pg);
    result["hbar"] = hbar;
    result["E0"] = gs.energy;
    result["mass"] = field.weighted_mass();
    // density peaks (local argmax over nodes)
    double best = 0;
    std::int64_t best_m = 0;
    for (std::int64_t m = 0; m < pg.total(); ++m)
      if (std::norm(field.v[m]) > best) {
        best = std::norm(field.v[m]);
        best_m = m;
      }
    PhasePoint peak = pg.node(best_m);
    result["peak_q"] = std::vector<double>(peak.q.begin(), peak.q.begin() + cfg.n);
    result["peak_p"] = std::vector<double>(peak.p.begin(), peak.p.begin() + cfg.n);
  } else if (cfg.command == "classical-limit") {
    GroundMode mode =
        cfg.mode == "berezin-gibbs" ? GroundMode::BerezinGibbs : GroundMode::Schrodinger;
    SweepResult sr = classical_limit_sweep(V, G, build_observables(cfg), cfg.hbars, mode, opts);
    result = sr.to_json();
  } else if (cfg.command == "localization") {
    SweepResult sr = localization_sweep(V, cfg.eps, cfg.t, cfg.hbars, opts);
    result = sr.to_json();
  } else if (cfg.command == "eig-convergence") {
    SweepResult sr = eigenvalue_convergence_sweep(V, cfg.t, cfg.hbars, opts);
    result = sr.to_json();
  } else if (cfg.command == "semigroup") {
    SweepResult sr = semigroup_comparison(V, cfg.t, cfg.hbars, 5, opts);
    result = sr.to_json();
  } else if (cfg.command == "axioms") {
    GridSpec g = GridSpec::position(cfg.n, cfg.grid_L, cfg.grid_N);
    std::vector<Symbol> obs = build_observables(cfg);
    Symbol f = obs.size() > 0 ? obs[0] : make_gaussian_bump(PhasePoint::make1(1.0, 0.0), 0.2);
    Symbol g2 = obs.size() > 1 ? obs[1] : make_gaussian_bump(PhasePoint::make1(1.3, 0.4), 0.2);
    SweepResult sr = axiom_suite(f, g2, cfg.hbars, g, opts);
    result = sr.to_json();
  } else if (cfg.command == "ssb-report") {
    SsbOptions so;
    so.sweep = opts;
    so.emergence_threshold = cfg.emergence_threshold;
    SSBReport rep = ssb_report(V, G, cfg.hbars, so);
    result = rep.to_json();
  } else {
    throw ConfigError("unknown command: " + cfg.command);
  }
  return result;
}

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void compare_rec(const json& expected, const json& actual, const std::string& path,
                 double rel_tol, double abs_tol, std::vector<std::string>& out) {
  if (expected.is_number() && actual.is_number()) {
    double a = expected.get<double>(), b = actual.get<double>();
    if (fmt12(a) == fmt12(b)) return;
    double diff = std::abs(a - b);
    if (diff <= std::max(abs_tol, rel_tol * std::max(std::abs(a), std::abs(b)))) return;
    out.push_back(path + ": " + fmt12(a) + " vs " + fmt12(b));
    return;
  }
  if (expected.type() != actual.type()) {
    out.push_back(path + ": type mismatch");
    return;
  }
  if (expected.is_object()) {
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      if (!actual.contains(it.key())) {
        out.push_back(path + "." + it.key() + ": missing");
        continue;
      }
      compare_rec(it.value(), actual.at(it.key()), path + "." + it.key(), rel_tol, abs_tol, out);
    }
    for (auto it = actual.begin(); it != actual.end(); ++it)
      if (!expected.contains(it.key())) out.push_back(path + "." + it.key() + ": unexpected");
    return;
  }
  if (expected.is_array()) {
    if (expected.size() != actual.size()) {
      out.push_back(path + ": array size " + std::to_string(expected.size()) + " vs " +
                    std::to_string(actual.size()));
      return;
    }
    for (std::size_t i = 0; i < expected.size(); ++i)
      compare_rec(expected[i], actual[i], path + "[" + std::to_string(i) + "]", rel_tol, abs_tol,
                  out);
    return;
  }
  if (expected != actual) out.push_back(path + ": value mismatch");
}

}  // namespace

std::vector<std::string> compare_golden(const json& expected, const json& actual, double rel_tol,
                                        double abs_tol) {
  std::vector<std::string> out;
  compare_rec(expected, actual, "$", rel_tol, abs_tol, out);
  return out;
}

}  // namespace semiclassica

// Command-line front end: configuration-driven experiment runners with
// reproducible outputs and golden-file checking.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "semiclassica/config.hpp"
#include "semiclassica/parallel.hpp"
#include "semiclassica/plot.hpp"

namespace fs = std::filesystem;
using namespace semiclassica;

namespace {

struct CliOverrides {
  std::string config_path;
  std::string out_dir;
  std::string potential;
  std::string group;
  std::string hbars_csv;
  std::string golden_dir;
  double hbar = 0;
  double t = 0;
  int grid_n = 0;
  int grid_N = 0;
  double grid_L = 0;
  int workers = 0;
  bool svg = false;
  bool binary = false;
};

void add_common(CLI::App* cmd, CliOverrides& ov) {
  cmd->add_option("--config", ov.config_path, "JSON config file");
  cmd->add_option("--out", ov.out_dir, "output directory");
  cmd->add_option("--potential", ov.potential, "doublewell | mexicanhat | harmonic");
  cmd->add_option("--group", ov.group, "trivial | z2 | so2");
  cmd->add_option("--hbar", ov.hbar, "single hbar value");
  cmd->add_option("--hbars", ov.hbars_csv, "comma-separated hbar sweep (descending)");
  cmd->add_option("--t", ov.t, "Gibbs time parameter");
  cmd->add_option("--grid-n", ov.grid_n, "dimension n (1 or 2)");
  cmd->add_option("--grid-L", ov.grid_L, "box half-width");
  cmd->add_option("--grid-N", ov.grid_N, "points per axis (power of two)");
  cmd->add_option("--workers", ov.workers, "worker thread count");
  cmd->add_flag("--svg", ov.svg, "emit SVG plots");
  cmd->add_flag("--binary", ov.binary, "binary wavefunction dumps");
}

ExperimentConfig assemble(const std::string& command, const CliOverrides& ov) {
  ExperimentConfig cfg;
  if (!ov.config_path.empty()) cfg = load_config_file(ov.config_path);
  cfg.command = command;
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (!ov.potential.empty()) {
    cfg.potential = ov.potential;
    // sensible grid defaults per potential dimension
    if (ov.potential == "mexicanhat" && ov.grid_n == 0) cfg.n = 2;
  }
  if (!ov.group.empty()) cfg.group = ov.group;
  if (ov.grid_n > 0) cfg.n = ov.grid_n;
  if (ov.hbar > 0) cfg.hbars = {ov.hbar};
  if (!ov.hbars_csv.empty()) {
    cfg.hbars.clear();
    std::stringstream ss(ov.hbars_csv);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.hbars.push_back(std::stod(item));
  }
  if (ov.t > 0) cfg.t = ov.t;
  if (ov.grid_L > 0) cfg.grid_L = ov.grid_L;
  if (ov.grid_N > 0) cfg.grid_N = ov.grid_N;
  if (ov.workers > 0) cfg.workers = ov.workers;
  cfg.svg = cfg.svg || ov.svg;
  cfg.binary = cfg.binary || ov.binary;
  if (cfg.n == 2 && cfg.grid_N == 1024 && cfg.grid_L == 6.0) {
    cfg.grid_N = 256;  // 2D defaults
    cfg.grid_L = 4.0;
  }
  return cfg;
}

void write_json(const json& doc, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  f << doc.dump(2) << "\n";
}

json document_for(const ExperimentConfig& cfg, const json& result) {
  json doc;
  doc["config"] = cfg.to_json();
  doc["result"] = result;
  return doc;
}

int run_command(const std::string& command, const CliOverrides& ov) {
  ExperimentConfig cfg = assemble(command, ov);
  fs::create_directories(cfg.out_dir);
  json result = run_experiment(cfg);
  json doc = document_for(cfg, result);
  std::string base = cfg.out_dir + "/" + command;
  write_json(doc, base + ".json");

  // artifacts beyond the JSON document
  Potential V = build_potential(cfg);
  SweepOptions opts = sweep_options(cfg);
  if (command == "ground") {
    GridSpec g = GridSpec::position(cfg.n, cfg.grid_L, cfg.grid_N);
    for (double hbar : cfg.hbars) {
      Hamiltonian H = build_hamiltonian(V, hbar, g);
      EigenResult eig = lowest_eigenpairs(H, cfg.eig_k, opts.eig);
      char name[64];
      std::snprintf(name, sizeof name, "%s/eigs_hbar%g.csv", cfg.out_dir.c_str(), hbar);
      std::ofstream f(name);
      f << "j,E,residual\n";
      char buf[128];
      for (int j = 0; j < eig.k; ++j) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", j, eig.energies[j], eig.residuals[j]);
        f << buf;
      }
      std::snprintf(name, sizeof name, "%s/psi0_hbar%g.%s", cfg.out_dir.c_str(), hbar,
                    cfg.binary ? "bin" : "csv");
      if (cfg.binary)
        dump_wavefunction_binary(eig.vectors[0], hbar, name);
      else
        dump_wavefunction_csv(eig.vectors[0], name);
    }
  } else if (command == "husimi") {
    double hbar = cfg.hbars.front();
    GridSpec g = GridSpec::position(cfg.n, cfg.grid_L, cfg.grid_N);
    GroundState gs = ground_state(V, hbar, g, opts.eig);
    PhaseGrid pg = experiment_phase_grid(V, cfg.t, hbar, {}, g);
    HusimiField field = husimi(gs.psi, pg);
    std::ofstream f(base + ".csv");
    f << (cfg.n == 1 ? "q,p,re,im,density\n" : "q1,q2,p1,p2,re,im,density\n");
    char buf[256];
    for (std::int64_t m = 0; m < pg.total(); ++m) {
      PhasePoint s = pg.node(m);
      if (cfg.n == 1)
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.q[0], s.p[0],
                      field.v[m].real(), field.v[m].imag(), std::norm(field.v[m]));
      else
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.q[0],
                      s.q[1], s.p[0], s.p[1], field.v[m].real(), field.v[m].imag(),
                      std::norm(field.v[m]));
      f << buf;
    }
    if (cfg.svg) emit_husimi_svg(field, base + ".svg", cfg.svg_width);
  } else if (command == "ssb-report") {
    std::cout << result.dump(2) << "\n";
    SsbOptions so;
    so.sweep = opts;
    so.emergence_threshold = cfg.emergence_threshold;
    // text rendering for humans
    GroupAction G = build_group(cfg);
    SSBReport rep = ssb_report(V, G, cfg.hbars, so);
    std::ofstream f(base + ".txt");
    f << rep.render_text();
  } else {
    // sweep commands: CSV + optional SVG
    if (result.contains("columns")) {
      SweepResult sr;
      sr.experiment = result.value("experiment", command);
      sr.columns = result.at("columns").get<std::vector<std::string>>();
      sr.hbars = result.at("hbars").get<std::vector<double>>();
      for (const auto& r : result.at("rows")) sr.rows.push_back(r.get<std::vector<double>>());
      sr.metadata = result.value("metadata", json::object());
      sr.write_csv(base + ".csv");
      if (cfg.svg) emit_sweep_svg(sr, base + ".svg", cfg.svg_width);
    }
  }
  std::cout << command << ": ok, outputs in " << cfg.out_dir << "\n";
  return 0;
}

int run_check(const CliOverrides& ov) {
  std::string dir = ov.golden_dir;
  if (dir.empty()) {
    const char* env = std::getenv("SEMICLASSICA_GOLDEN_DIR");
    if (env) dir = env;
  }
  if (dir.empty()) {
    std::cerr << "check: set SEMICLASSICA_GOLDEN_DIR or pass --golden-dir\n";
    return 1;
  }
  int failures = 0;
  int checked = 0;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream f(path);
    json doc;
    f >> doc;
    if (!doc.contains("config") || !doc.contains("result")) {
      std::cerr << "check: " << path.string() << " has no config/result pair, skipping\n";
      continue;
    }
    ExperimentConfig cfg = parse_config(doc.at("config"));
    if (ov.workers > 0) cfg.workers = ov.workers;
    json actual = run_experiment(cfg);
    auto mismatches = compare_golden(doc.at("result"), actual);
    ++checked;
    if (mismatches.empty()) {
      std::cout << "[PASS] " << path.filename().string() << "\n";
    } else {
      ++failures;
      std::cout << "[FAIL] " << path.filename().string() << "\n";
      for (const auto& m : mismatches) std::cout << "       " << m << "\n";
    }
  }
  if (checked == 0) {
    std::cerr << "check: no golden files in " << dir << "\n";
    return 1;
  }
  return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiclassica: Berezin quantization and Schrodinger classical-limit laboratory"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {"ground",        "husimi",   "classical-limit",
                                             "localization",  "eig-convergence", "semigroup",
                                             "axioms",        "ssb-report"};
  std::map<std::string, CliOverrides> ovs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c);
    add_common(sub, ovs[c]);
  }
  CliOverrides check_ov;
  CLI::App* check = app.add_subcommand("check", "re-run golden configs and compare");
  check->add_option("--golden-dir", check_ov.golden_dir, "golden directory");
  check->add_option("--workers", check_ov.workers, "worker thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& c : commands)
      if (app.got_subcommand(c)) return run_command(c, ovs[c]);
    if (app.got_subcommand("check")) return run_check(check_ov);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#include "semiclassica/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "semiclassica/parallel.hpp"
#include "semiclassica/weyl.hpp"

namespace semiclassica {

int SweepResult::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  throw ConfigError("SweepResult: no column " + name);
}

std::vector<double> SweepResult::column(const std::string& name) const {
  int c = column_index(name);
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

void SweepResult::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  f << "# experiment: " << experiment << "\n";
  f << "# metadata: " << metadata.dump() << "\n";
  f << "hbar";
  for (const auto& c : columns) f << "," << c;
  f << "\n";
  char buf[64];
  for (std::size_t i = 0; i < hbars.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", hbars[i]);
    f << buf;
    for (double v : rows[i]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      f << buf;
    }
    f << "\n";
  }
}

json SweepResult::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["metadata"] = metadata;
  j["columns"] = columns;
  j["hbars"] = hbars;
  j["rows"] = rows;
  return j;
}

bool column_decreasing(const std::vector<double>& v, double slack) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] > v[i] * (1 + slack) + 1e-14) return false;
  return v.empty() || v.back() <= v.front() * (1 + slack);
}

bool last_entry_near_min(const std::vector<double>& v, double slack) {
  if (v.empty()) return true;
  double mn = *std::min_element(v.begin(), v.end());
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return v.back() <= mn * (1 + slack) + 1e-14;
}

// --- neighborhoods ---------------------------------------------------------

bool Neighborhood::contains(const PhasePoint& sigma) const {
  switch (kind) {
    case Kind::All:
      return true;
    case Kind::Empty:
      return false;
    case Kind::Sublevel:
      return std::abs(e.eval(sigma).real() - Lambda) < eps;
    case Kind::Product: {
      double p2 = 0;
      for (int a = 0; a < sigma.dim; ++a) p2 += sigma.p[a] * sigma.p[a];
      if (std::abs(std::exp(-t * p2) - 1.0) >= eps) return false;
      double ev = std::exp(-t * V.value(sigma.q.data()));
      double target = std::exp(-t * V.min_value);
      return std::abs(ev - target) < eps;
    }
  }
  return false;
}

Neighborhood Neighborhood::sublevel(const Symbol& e, double Lambda, double eps) {
  Neighborhood n;
  n.kind = Kind::Sublevel;
  n.e = e;
  n.Lambda = Lambda;
  n.eps = eps;
  return n;
}

Neighborhood Neighborhood::product(const Potential& V, double t, double eps) {
  Neighborhood n;
  n.kind = Kind::Product;
  n.V = V;
  n.t = t;
  n.eps = eps;
  return n;
}

Neighborhood Neighborhood::all() {
  Neighborhood n;
  n.kind = Kind::All;
  return n;
}

Neighborhood Neighborhood::empty_set() {
  Neighborhood n;
  n.kind = Kind::Empty;
  return n;
}

double localization_mass(const HusimiField& field, const Neighborhood& nbhd) {
  const PhaseGrid& pg = field.pg;
  const double w = pg.weight();
  const std::int64_t M = pg.total();
  const std::int64_t bs = 4096;
  std::vector<double> parts(block_count(M, bs), 0.0);
  parallel_blocks(M, bs, [&](std::size_t blk, std::int64_t b, std::int64_t e) {
    double acc = 0;
    for (std::int64_t m = b; m < e; ++m)
      if (!nbhd.contains(pg.node(m))) acc += std::norm(field.v[m]);
    parts[blk] = acc;
  });
  return tree_sum(parts) * w;
}

double localization_mass(const WaveFunction& psi, const Neighborhood& nbhd, const PhaseGrid& pg) {
  return localization_mass(husimi(psi, pg), nbhd);
}

// --- experiment scaffolding -------------------------------------------------

PhaseGrid experiment_phase_grid(const Potential& V, double t, double hbar,
                                const std::vector<Symbol>& observables, const GridSpec& g) {
  const int n = V.dim;
  const double L = g.half_width();
  const double pad = 6 * std::sqrt(hbar);
  const double decay = 23.03;  // -ln(1e-10)

  // q extent from e^{-tV} >= 1e-10, scanned per axis through the minimizers
  double qlo[2], qhi[2];
  for (int a = 0; a < n; ++a) {
    double lo = 0, hi = 0;
    for (int i = 0; i <= 800; ++i) {
      double x = -L + i * (2 * L) / 800.0;
      double q[2] = {0, 0};
      q[a] = x;
      if (t * (V.value(q) - V.min_value) < decay) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    qlo[a] = lo;
    qhi[a] = hi;
  }
  double pmax = std::sqrt(decay / t);
  double plo[2] = {-pmax, -pmax}, phi[2] = {pmax, pmax};

  for (const Symbol& f : observables) {
    if (!f.support_radius) continue;
    double r = *f.support_radius;
    for (int a = 0; a < n; ++a) {
      qlo[a] = std::min(qlo[a], f.support_center.q[a] - r);
      qhi[a] = std::max(qhi[a], f.support_center.q[a] + r);
      plo[a] = std::min(plo[a], f.support_center.p[a] - r);
      phi[a] = std::max(phi[a], f.support_center.p[a] + r);
    }
  }
  for (const auto& m : V.minimizers)
    for (int a = 0; a < n; ++a) {
      qlo[a] = std::min(qlo[a], m.q[a] - 1.0);
      qhi[a] = std::max(qhi[a], m.q[a] + 1.0);
    }
  for (int a = 0; a < n; ++a) {
    // symmetric extents keep the grid exactly invariant under the built-in
    // group actions
    double qr = std::max(std::abs(qlo[a]), std::abs(qhi[a])) + pad;
    double pr = std::max(std::abs(plo[a]), std::abs(phi[a])) + pad;
    qr = std::min(qr, L - 0.25);
    qlo[a] = -qr;
    qhi[a] = qr;
    plo[a] = -pr;
    phi[a] = pr;
  }
  if (n == 2) {
    // same range on both axes so quarter turns permute nodes exactly
    double qr = std::max(qhi[0], qhi[1]);
    double pr = std::max(phi[0], phi[1]);
    qlo[0] = qlo[1] = -qr;
    qhi[0] = qhi[1] = qr;
    plo[0] = plo[1] = -pr;
    phi[0] = phi[1] = pr;
  }
  return PhaseGrid::product(n, hbar, qlo, qhi, plo, phi);
}

WaveFunction gaussian_probe(const GridSpec& g, const double* center_q, double width) {
  WaveFunction psi = WaveFunction::zero(g);
  const int N = g.npts;
  if (g.dim == 1) {
    for (int j = 0; j < N; ++j) {
      double d = g.node(j) - center_q[0];
      psi.v[j] = std::exp(-d * d / (2 * width * width));
    }
  } else {
    for (int j0 = 0; j0 < N; ++j0)
      for (int j1 = 0; j1 < N; ++j1) {
        double d0 = g.node(j0) - center_q[0];
        double d1 = g.node(j1) - center_q[1];
        psi.v[flat_index(g, j0, j1)] = std::exp(-(d0 * d0 + d1 * d1) / (2 * width * width));
      }
  }
  return normalize(psi);
}

GroundVector ground_vector(const Potential& V, double hbar, const GridSpec& g,
                           const PhaseGrid& pg, GroundMode mode, const SweepOptions& opts) {
  GroundVector gv;
  if (mode == GroundMode::Schrodinger) {
    GroundState gs = ground_state(V, hbar, g, opts.eig);
    gv.psi = gs.psi;
    gv.value = gs.energy;
    gv.gap = gs.gap;
    return gv;
  }
  // Berezin-Gibbs: power iteration on Q(e^{-t h}) from a G-symmetrized start
  Symbol e = gibbs_symbol(V, opts.t);
  BerezinOperator Q = berezin_dense(e, hbar, g, pg, /*check_coverage=*/false);
  WaveFunction start = WaveFunction::zero(g);
  std::vector<PhasePoint> centers;
  PhasePoint s0 = V.minimizers.empty() ? PhasePoint{V.dim, {0, 0}, {0, 0}} : V.minimizers[0];
  switch (V.symmetry) {
    case SymmetryTag::None:
      centers = {s0};
      break;
    case SymmetryTag::Z2: {
      PhasePoint f = s0;
      for (int a = 0; a < V.dim; ++a) {
        f.q[a] = -f.q[a];
        f.p[a] = -f.p[a];
      }
      centers = {s0, f};
      break;
    }
    case SymmetryTag::SO2: {
      GroupAction G = GroupAction::so2();
      for (int r = 0; r < 4; ++r)
        centers.push_back(act_phase(G, GroupElement::so2_angle(r * kPi / 2), s0));
      break;
    }
  }
  for (const auto& c : centers) {
    WaveFunction cs = coherent_state(c, hbar, g);
    for (std::size_t i = 0; i < start.v.size(); ++i) start.v[i] += cs.v[i];
  }
  EigenPair ep = top_eigenpair(Q.as_linop(), start, 1e-11, 3000);
  if (!ep.converged)
    throw NumericalError("ground_vector: power iteration on the Berezin-Gibbs operator stalled");
  gv.psi = ep.vector;
  gv.value = ep.value;
  return gv;
}

namespace {

json sweep_meta(const Potential& V, const SweepOptions& opts, double t) {
  json m;
  m["potential"] = V.name;
  m["n"] = V.dim;
  m["grid_L"] = opts.grid_L;
  m["grid_N"] = opts.grid_N;
  m["t"] = t;
  return m;
}

}  // namespace

SweepResult classical_limit_sweep(const Potential& V, const GroupAction& G,
                                  const std::vector<Symbol>& observables,
                                  const std::vector<double>& hbars, GroundMode mode,
                                  const SweepOptions& opts) {
  SweepResult sr;
  sr.experiment = mode == GroundMode::Schrodinger ? "classical-limit" : "classical-limit-berezin";
  sr.metadata = sweep_meta(V, opts, opts.t);
  sr.metadata["group"] = group_name(G);
  sr.metadata["observables"] = observables.size();
  PhasePoint sigma0 = opts.sigma0_set ? opts.sigma0
                                      : (V.minimizers.empty() ? PhasePoint{V.dim, {0, 0}, {0, 0}}
                                                              : V.minimizers[0]);
  sr.columns = {"mass", "value", "gap", "max_defect"};
  for (std::size_t i = 0; i < observables.size(); ++i) {
    sr.columns.push_back("measured_" + std::to_string(i));
    sr.columns.push_back("target_" + std::to_string(i));
    sr.columns.push_back("defect_" + std::to_string(i));
  }
  for (double hbar : hbars) {
    GridSpec g = GridSpec::position(V.dim, opts.grid_L, opts.grid_N);
    PhaseGrid pg = experiment_phase_grid(V, opts.t, hbar, observables, g);
    GroundVector gv = ground_vector(V, hbar, g, pg, mode, opts);
    HusimiField field = husimi(gv.psi, pg);
    double mass = field.weighted_mass();
    if (mass < 0.99)
      throw NumericalError("classical_limit_sweep: phase grid coverage deficit at hbar=" +
                           std::to_string(hbar));
    std::vector<double> row = {mass, gv.value, gv.gap, 0.0};
    double maxd = 0;
    for (const Symbol& f : observables) {
      double measured = husimi_expectation(field, f).real();
      double target = haar_average(G, f, sigma0);
      double defect = std::abs(measured - target);
      maxd = std::max(maxd, defect);
      row.push_back(measured);
      row.push_back(target);
      row.push_back(defect);
    }
    row[3] = maxd;
    sr.hbars.push_back(hbar);
    sr.rows.push_back(std::move(row));
  }
  return sr;
}

SweepResult eigenvalue_convergence_sweep(const Potential& V, double t,
                                         const std::vector<double>& hbars,
                                         const SweepOptions& opts) {
  SweepResult sr;
  sr.experiment = "eig-convergence";
  SweepOptions o = opts;
  o.t = t;
  sr.metadata = sweep_meta(V, o, t);
  sr.columns = {"lambda0", "exp_mtE0", "target", "defect_lambda0", "defect_expE0", "E0", "gap"};
  const double target = std::exp(-t * V.min_value);
  for (double hbar : hbars) {
    GridSpec g = GridSpec::position(V.dim, o.grid_L, o.grid_N);
    PhaseGrid pg = experiment_phase_grid(V, t, hbar, {}, g);
    GroundVector berezin = ground_vector(V, hbar, g, pg, GroundMode::BerezinGibbs, o);
    GroundState gs = ground_state(V, hbar, g, o.eig);
    double expE0 = std::exp(-t * gs.energy);
    sr.hbars.push_back(hbar);
    sr.rows.push_back({berezin.value, expE0, target, std::abs(berezin.value - target),
                       std::abs(expE0 - target), gs.energy, gs.gap});
  }
  return sr;
}

SweepResult semigroup_comparison(const Potential& V, double t, const std::vector<double>& hbars,
                                 int nprobes, const SweepOptions& opts) {
  SweepResult sr;
  sr.experiment = "semigroup";
  SweepOptions o = opts;
  o.t = t;
  sr.metadata = sweep_meta(V, o, t);
  sr.metadata["probes"] = nprobes;
  for (int p = 0; p < nprobes; ++p) {
    sr.columns.push_back("d_full_" + std::to_string(p));     // ||(Q(e)-e^{-tH})psi||
    sr.columns.push_back("d_limitQ_" + std::to_string(p));   // ||Q(e)psi - e^{-tV}psi||
    sr.columns.push_back("d_limitH_" + std::to_string(p));   // ||e^{-tH}psi - e^{-tV}psi||
  }
  sr.columns.push_back("truncation_bound");

  for (double hbar : hbars) {
    GridSpec g = GridSpec::position(V.dim, o.grid_L, o.grid_N);
    PhaseGrid pg = experiment_phase_grid(V, t, hbar, {}, g);
    Symbol e = gibbs_symbol(V, t);
    BerezinOperator Q = berezin_dense(e, hbar, g, pg, false);
    Hamiltonian H = build_hamiltonian(V, hbar, g);
    EigenResult eig = lowest_eigenpairs(H, o.semigroup_modes + 1, o.eig);
    std::vector<double> evtab(g.total());
    for (std::int64_t i = 0; i < g.total(); ++i) evtab[i] = std::exp(-t * H.vtable[i]);

    std::vector<double> row;
    double bound = 0;
    for (int p = 0; p < nprobes; ++p) {
      // fixed probe centers spread through the well region
      double span = std::max(1.0, std::abs(V.minimizers.empty() ? 1.0 : V.minimizers[0].q[0]));
      double cq[2] = {-span + 2.0 * span * p / std::max(1, nprobes - 1), 0.0};
      WaveFunction psi = gaussian_probe(g, cq, 0.6);
      WaveFunction qpsi = Q.apply(psi);
      SemigroupResult sg = semigroup_apply(eig, t, psi);
      bound = std::max(bound, sg.truncation_bound);
      WaveFunction vpsi = multiply_table(psi, evtab);
      auto diff_norm = [&](const WaveFunction& a, const WaveFunction& b) {
        double acc = 0;
        for (std::size_t i = 0; i < a.v.size(); ++i) acc += std::norm(a.v[i] - b.v[i]);
        return std::sqrt(acc * g.cell_volume());
      };
      row.push_back(diff_norm(qpsi, sg.psi));
      row.push_back(diff_norm(qpsi, vpsi));
      row.push_back(diff_norm(sg.psi, vpsi));
    }
    row.push_back(bound);
    sr.hbars.push_back(hbar);
    sr.rows.push_back(std::move(row));
  }
  return sr;
}

SweepResult localization_sweep(const Potential& V, double eps, double t,
                               const std::vector<double>& hbars, const SweepOptions& opts) {
  SweepResult sr;
  sr.experiment = "localization";
  SweepOptions o = opts;
  o.t = t;
  sr.metadata = sweep_meta(V, o, t);
  sr.metadata["eps"] = eps;
  sr.columns = {"mass_outside", "total_mass", "E0", "gap"};
  Neighborhood U = Neighborhood::product(V, t, eps);
  for (double hbar : hbars) {
    GridSpec g = GridSpec::position(V.dim, o.grid_L, o.grid_N);
    PhaseGrid pg = experiment_phase_grid(V, t, hbar, {}, g);
    GroundState gs = ground_state(V, hbar, g, o.eig);
    HusimiField field = husimi(gs.psi, pg);
    sr.hbars.push_back(hbar);
    sr.rows.push_back(
        {localization_mass(field, U), field.weighted_mass(), gs.energy, gs.gap});
  }
  return sr;
}

// --- quantization axiom suite ------------------------------------------------

namespace {

Symbol product_symbol(const Symbol& f, const Symbol& g) {
  Symbol out;
  out.dim = f.dim;
  out.decay = DecayClass::Schwartz;
  Symbol a = f, b = g;
  out.eval = [a, b](const PhasePoint& s) { return a.eval(s) * b.eval(s); };
  out.grad = [a, b](const PhasePoint& s, Complex* dq, Complex* dp) {
    Complex aq[2], ap[2], bq[2], bp[2];
    symbol_gradient(a, s, aq, ap);
    symbol_gradient(b, s, bq, bp);
    Complex av = a.eval(s), bv = b.eval(s);
    for (int i = 0; i < a.dim; ++i) {
      dq[i] = aq[i] * bv + av * bq[i];
      dp[i] = ap[i] * bv + av * bp[i];
    }
  };
  if (a.support_radius && b.support_radius) {
    out.support_radius = std::min(*a.support_radius, *b.support_radius) +
                         distance(a.support_center, b.support_center);
    out.support_center = a.support_center;
  }
  return out;
}

Symbol bracket_symbol(const Symbol& f, const Symbol& g) {
  Symbol out;
  out.dim = f.dim;
  out.decay = DecayClass::Schwartz;
  Symbol a = f, b = g;
  out.eval = [a, b](const PhasePoint& s) { return poisson_bracket(a, b, s); };
  if (a.support_radius && b.support_radius) {
    out.support_radius = std::max(*a.support_radius, *b.support_radius) +
                         distance(a.support_center, b.support_center);
    out.support_center = a.support_center;
  }
  return out;
}

}  // namespace

SweepResult axiom_suite(const Symbol& f, const Symbol& g_sym, const std::vector<double>& hbars,
                        const GridSpec& grid, const SweepOptions& opts) {
  SweepResult sr;
  sr.experiment = "axioms";
  sr.metadata["grid_L"] = grid.half_width();
  sr.metadata["grid_N"] = grid.npts;
  sr.columns = {"rieffel", "von_neumann", "dgr", "berezin_weyl", "sup_f"};

  Symbol fg = product_symbol(f, g_sym);
  Symbol br = bracket_symbol(f, g_sym);

  if (!f.separable() || !g_sym.separable())
    throw ConfigError("axiom_suite: test symbols must be separable (Berezin-Weyl comparison)");

  const double norm_tol = 1e-6;
  const int norm_iters = 200;
  const unsigned norm_seed = opts.eig.seed;

  for (double hbar : hbars) {
    grid.check_resolves(hbar);
    // window covering both supports padded for the sweep's smallest scales
    double qlo[2], qhi[2], plo[2], phi[2];
    const double pad = 6 * std::sqrt(hbar);
    for (int a = 0; a < f.dim; ++a) {
      double r1 = f.support_radius ? *f.support_radius : 3.0;
      double r2 = g_sym.support_radius ? *g_sym.support_radius : 3.0;
      double lo = std::min(f.support_center.q[a] - r1, g_sym.support_center.q[a] - r2);
      double hi = std::max(f.support_center.q[a] + r1, g_sym.support_center.q[a] + r2);
      double m = std::min(std::max(std::abs(lo), std::abs(hi)) + pad, grid.half_width() - 0.25);
      qlo[a] = -m;
      qhi[a] = m;
      lo = std::min(f.support_center.p[a] - r1, g_sym.support_center.p[a] - r2);
      hi = std::max(f.support_center.p[a] + r1, g_sym.support_center.p[a] + r2);
      m = std::max(std::abs(lo), std::abs(hi)) + pad;
      plo[a] = -m;
      phi[a] = m;
    }
    PhaseGrid pg = PhaseGrid::product(f.dim, hbar, qlo, qhi, plo, phi);

    BerezinOperator Qf = berezin_dense(f, hbar, grid, pg, false);
    BerezinOperator Qg = berezin_dense(g_sym, hbar, grid, pg, false);
    BerezinOperator Qfg = berezin_dense(fg, hbar, grid, pg, false);
    BerezinOperator Qbr = berezin_dense(br, hbar, grid, pg, false);

    double supf = 0;
    for (std::int64_t m = 0; m < pg.total(); ++m)
      supf = std::max(supf, std::abs(Qf.ftable[m]));

    LinOp of = Qf.as_linop(), og = Qg.as_linop();
    double rieffel = std::abs(operator_norm(of, norm_tol, norm_iters, norm_seed).value - supf);
    double vn = operator_norm(linop_combine(1.0, linop_compose(of, og), -1.0, Qfg.as_linop()),
                              norm_tol, norm_iters, norm_seed)
                    .value;
    double dgr =
        operator_norm(linop_combine(1.0, linop_scaled_commutator(of, og, hbar), -1.0,
                                    Qbr.as_linop()),
                      norm_tol, norm_iters, norm_seed)
            .value;
    WeylOperator Wf =
        weyl_separable(std::optional<Symbol>(f), std::optional<Symbol>(f), hbar, grid);
    double bw =
        operator_norm(linop_combine(1.0, of, -1.0, Wf.as_linop()), norm_tol, norm_iters, norm_seed)
            .value;

    sr.hbars.push_back(hbar);
    sr.rows.push_back({rieffel, vn, dgr, bw, supf});
  }
  return sr;
}

}  // namespace semiclassica

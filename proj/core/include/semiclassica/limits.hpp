#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "semiclassica/coherent.hpp"
#include "semiclassica/phase_space.hpp"
#include "semiclassica/schrodinger.hpp"
#include "semiclassica/symmetry.hpp"

namespace semiclassica {

using json = nlohmann::ordered_json;

// One row per hbar (descending), named value columns, metadata echoed into
// every serialization so a run can be reproduced from its output.
struct SweepResult {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<double> hbars;
  std::vector<std::vector<double>> rows;
  json metadata;

  int column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  void write_csv(const std::string& path) const;
  json to_json() const;
};

// Tolerant monotone decrease: each successive entry below the previous one
// up to `slack` relative, and the last entry at (or within slack of) the
// column minimum. The paper proves limits without rates, so trends are
// checked this way throughout.
bool column_decreasing(const std::vector<double>& v, double slack = 0.10);
bool last_entry_near_min(const std::vector<double>& v, double slack = 0.10);

// Localization neighborhoods: sublevel sets V_eps = e^{-1}((L-eps, L+eps))
// and the product sets U_eps = U^1_eps x U^2_eps built from e1 = e^{-t p^2},
// e2 = e^{-t V}.
struct Neighborhood {
  enum class Kind { Sublevel, Product, All, Empty };
  Kind kind = Kind::All;
  Symbol e;  // sublevel
  double Lambda = 0.0;
  double eps = 0.0;
  double t = 1.0;  // product
  Potential V;

  bool contains(const PhasePoint& sigma) const;

  static Neighborhood sublevel(const Symbol& e, double Lambda, double eps);
  static Neighborhood product(const Potential& V, double t, double eps);
  static Neighborhood all();
  static Neighborhood empty_set();
};

// Husimi mass outside the neighborhood: sum over excluded nodes of w |W psi|^2.
double localization_mass(const HusimiField& field, const Neighborhood& nbhd);
double localization_mass(const WaveFunction& psi, const Neighborhood& nbhd, const PhaseGrid& pg);

struct SweepOptions {
  double grid_L = 6.0;
  int grid_N = 1024;
  double t = 1.0;
  EigenOptions eig;
  int semigroup_modes = 20;
  bool sigma0_set = false;
  PhasePoint sigma0;
  int workers = 0;  // 0: library default
};

// Phase grid covering the Gibbs-symbol support, the given observables and
// the minimizer orbit, padded by 6 sqrt(hbar) (spacing <= 0.5 sqrt(hbar)).
PhaseGrid experiment_phase_grid(const Potential& V, double t, double hbar,
                                const std::vector<Symbol>& observables, const GridSpec& g);

// Deterministic Gaussian probe (unit norm), width w, centered at (c, 0).
WaveFunction gaussian_probe(const GridSpec& g, const double* center_q, double width);

enum class GroundMode { Schrodinger, BerezinGibbs };

// Ground vector of H_hbar (Schrodinger mode) or top eigenvector of
// Q(e^{-t h}) by power iteration (Berezin-Gibbs mode), with a symmetrized
// start so near-degenerate sectors stay clean.
struct GroundVector {
  WaveFunction psi;
  double value = 0.0;  // E0, or lambda0 for Berezin-Gibbs
  double gap = 0.0;    // E1-E0 (Schrodinger mode only)
};
GroundVector ground_vector(const Potential& V, double hbar, const GridSpec& g,
                           const PhaseGrid& pg, GroundMode mode, const SweepOptions& opts);

// Measured <psi, Q(f) psi> against the Haar average F(sigma0) per observable.
SweepResult classical_limit_sweep(const Potential& V, const GroupAction& G,
                                  const std::vector<Symbol>& observables,
                                  const std::vector<double>& hbars, GroundMode mode,
                                  const SweepOptions& opts);

// lambda0(hbar), e^{-t E0(hbar)} and their defects against e^{-t min V}.
SweepResult eigenvalue_convergence_sweep(const Potential& V, double t,
                                         const std::vector<double>& hbars,
                                         const SweepOptions& opts);

// Per fixed Gaussian probe: ||(Q(e) - e^{-tH}) psi||, ||Q(e) psi - e^{-tV} psi||,
// ||e^{-tH} psi - e^{-tV} psi||.
SweepResult semigroup_comparison(const Potential& V, double t, const std::vector<double>& hbars,
                                 int nprobes, const SweepOptions& opts);

// Husimi mass outside U_eps for the ground state, per hbar.
SweepResult localization_sweep(const Potential& V, double eps, double t,
                               const std::vector<double>& hbars, const SweepOptions& opts);

// Rieffel, von Neumann, Dirac-Groenewold-Rieffel and Berezin-Weyl defects
// for a pair of (separable) test symbols.
SweepResult axiom_suite(const Symbol& f, const Symbol& g_sym, const std::vector<double>& hbars,
                        const GridSpec& grid, const SweepOptions& opts);

}  // namespace semiclassica

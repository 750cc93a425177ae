#pragma once

#include "semiclassica/limits.hpp"

namespace semiclassica {

// Discrete classical probability measure: weighted Dirac atoms, or the
// uniform measure on a compact group orbit (angular quadrature for SO(2)).
struct ClassicalState {
  struct Atom {
    PhasePoint point;
    double weight = 0.0;
  };
  std::vector<Atom> atoms;  // used when orbit == false
  bool orbit = false;
  GroupAction orbit_group;
  PhasePoint orbit_base;

  Complex integrate(const Symbol& f) const;
  static ClassicalState dirac(const PhasePoint& sigma);
  static ClassicalState atoms_list(std::vector<Atom> atoms);
  static ClassicalState orbit_measure(const GroupAction& G, const PhasePoint& sigma0);
};

struct StateClassification {
  bool is_ground = false;       // support contained in N_h (within 1e-6)
  bool is_G_invariant = false;  // pushforward under each generator equals mu
  bool is_extremal = false;     // single Dirac atom
};

StateClassification classify_state(const ClassicalState& mu, const Symbol& h,
                                   const GroupAction& G);

struct ClassicalGroundStructure {
  std::vector<PhasePoint> critical_points;  // N_h samples
  std::vector<PhasePoint> minimizers;       // h within 1e-9 of min
  std::vector<std::vector<int>> orbits;     // G-orbit partition of the critical points
  std::vector<ClassicalState> extremal_ground_states;  // Dirac at each critical point
  ClassicalState minimizer_orbit_measure;   // uniform measure on the minimizer orbit
  bool orbit_measure_valid = false;
};

ClassicalGroundStructure classical_ground_states(const Symbol& h, const GroupAction& G,
                                                 const SearchBox& box);

// max over test symbols of |<psi, Q(f) psi> - Int f dmu|.
double limit_measure_compare(const WaveFunction& psi, const ClassicalState& mu_target,
                             const std::vector<Symbol>& test_symbols, const PhaseGrid& pg);

struct SsbQuantumRow {
  double hbar = 0.0;
  double E0 = 0.0;
  double gap = 0.0;
  std::vector<double> overlaps;  // |<psi0, U_g psi0>| per generator
  bool symmetry_projected = false;
  bool no_ssb = false;
};

struct SSBReport {
  std::string potential;
  std::string group;
  // classical
  std::vector<PhasePoint> critical_points;
  std::vector<PhasePoint> minimizers;
  int minimizer_orbit_count = 0;
  bool has_noninvariant_extremal_ground = false;
  bool classical_weak_ssb = false;
  // quantum
  std::vector<SsbQuantumRow> quantum;
  bool quantum_no_ssb = false;
  // emergence
  double limit_defect = 0.0;
  double emergence_threshold = 0.0;
  bool emergent = false;

  json to_json() const;  // schema "ssb-report/1"
  std::string render_text() const;
};

struct SsbOptions {
  SweepOptions sweep;
  double emergence_threshold = 0.05;
  int n_test_bumps = 10;
  double bump_width = 0.3;  // variance of the test bumps
};

SSBReport ssb_report(const Potential& V, const GroupAction& G, const std::vector<double>& hbars,
                     const SsbOptions& opts);

}  // namespace semiclassica

#include "semiclassica/ssb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace semiclassica {

Complex ClassicalState::integrate(const Symbol& f) const {
  if (!orbit) {
    Complex acc = 0;
    for (const Atom& a : atoms) acc += a.weight * f.eval(a.point);
    return acc;
  }
  if (orbit_group.kind == GroupKind::SO2) {
    Complex acc = 0;
    const int M = orbit_group.haar_points;
    for (int i = 0; i < M; ++i)
      acc += f.eval(act_phase(orbit_group, GroupElement::so2_angle(2 * kPi * i / M), orbit_base));
    return acc / static_cast<double>(M);
  }
  if (orbit_group.kind == GroupKind::Z2) {
    return 0.5 * (f.eval(orbit_base) +
                  f.eval(act_phase(orbit_group, GroupElement::z2_flip(), orbit_base)));
  }
  return f.eval(orbit_base);
}

ClassicalState ClassicalState::dirac(const PhasePoint& sigma) {
  ClassicalState s;
  s.atoms = {{sigma, 1.0}};
  return s;
}

ClassicalState ClassicalState::atoms_list(std::vector<Atom> a) {
  ClassicalState s;
  s.atoms = std::move(a);
  double total = 0;
  for (const Atom& at : s.atoms) {
    if (at.weight < 0) throw ConfigError("ClassicalState: negative weight");
    total += at.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("ClassicalState: weights must sum to 1");
  return s;
}

ClassicalState ClassicalState::orbit_measure(const GroupAction& G, const PhasePoint& sigma0) {
  ClassicalState s;
  s.orbit = true;
  s.orbit_group = G;
  s.orbit_base = sigma0;
  return s;
}

namespace {

// Newton-refines sigma onto N_h; returns the distance moved, or +inf when
// the refinement does not land on a critical point.
double distance_to_critical_set(const Symbol& h, const PhasePoint& sigma) {
  SearchBox box;
  for (int a = 0; a < sigma.dim; ++a) {
    box.q_lo[a] = sigma.q[a] - 0.5;
    box.q_hi[a] = sigma.q[a] + 0.5;
    box.p_lo[a] = sigma.p[a] - 0.5;
    box.p_hi[a] = sigma.p[a] + 0.5;
  }
  CriticalSet cs = critical_set(h, box, 2);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cs.points) best = std::min(best, distance(c, sigma));
  return best;
}

std::vector<PhasePoint> state_sample_points(const ClassicalState& mu) {
  if (!mu.orbit) {
    std::vector<PhasePoint> pts;
    for (const auto& a : mu.atoms) pts.push_back(a.point);
    return pts;
  }
  std::vector<PhasePoint> pts;
  if (mu.orbit_group.kind == GroupKind::SO2) {
    const int M = 64;  // membership samples along the orbit
    for (int i = 0; i < M; ++i)
      pts.push_back(act_phase(mu.orbit_group, GroupElement::so2_angle(2 * kPi * i / M),
                              mu.orbit_base));
  } else if (mu.orbit_group.kind == GroupKind::Z2) {
    pts.push_back(mu.orbit_base);
    pts.push_back(act_phase(mu.orbit_group, GroupElement::z2_flip(), mu.orbit_base));
  } else {
    pts.push_back(mu.orbit_base);
  }
  return pts;
}

}  // namespace

StateClassification classify_state(const ClassicalState& mu, const Symbol& h,
                                   const GroupAction& G) {
  StateClassification c;
  c.is_ground = true;
  for (const auto& pt : state_sample_points(mu))
    if (distance_to_critical_set(h, pt) > 1e-6) {
      c.is_ground = false;
      break;
    }
  c.is_extremal = !mu.orbit && mu.atoms.size() == 1;

  // invariance: pushforward under each generator matches atoms and weights
  c.is_G_invariant = true;
  if (G.kind != GroupKind::Trivial) {
    if (mu.orbit) {
      c.is_G_invariant = mu.orbit_group.kind == G.kind;
    } else {
      for (const auto& g : G.generators()) {
        for (const auto& a : mu.atoms) {
          PhasePoint moved = act_phase(G, g, a.point);
          bool matched = false;
          for (const auto& b : mu.atoms)
            if (distance(moved, b.point) < 1e-8 && std::abs(a.weight - b.weight) < 1e-10) {
              matched = true;
              break;
            }
          if (!matched) {
            c.is_G_invariant = false;
            break;
          }
        }
        if (!c.is_G_invariant) break;
      }
      // SO(2) continuous invariance additionally needs rotational symmetry of
      // the atom set; a finite atom set off the origin can never provide it.
      if (G.kind == GroupKind::SO2 && c.is_G_invariant) {
        for (const auto& a : mu.atoms)
          if (a.point.norm2() > 1e-16) {
            c.is_G_invariant = false;
            break;
          }
      }
    }
  }
  return c;
}

ClassicalGroundStructure classical_ground_states(const Symbol& h, const GroupAction& G,
                                                 const SearchBox& box) {
  ClassicalGroundStructure out;
  CriticalSet cs = critical_set(h, box);
  out.critical_points = cs.points;

  double hmin = std::numeric_limits<double>::infinity();
  for (const auto& c : cs.points) hmin = std::min(hmin, h.eval(c).real());
  for (const auto& c : cs.points)
    if (h.eval(c).real() <= hmin + 1e-9) out.minimizers.push_back(c);

  // G-orbit partition via invariants of the action
  auto orbit_key = [&](const PhasePoint& s) {
    std::array<double, 4> k{};
    if (G.kind == GroupKind::SO2) {
      k[0] = s.q[0] * s.q[0] + s.q[1] * s.q[1];
      k[1] = s.p[0] * s.p[0] + s.p[1] * s.p[1];
      k[2] = s.q[0] * s.p[0] + s.q[1] * s.p[1];
      k[3] = s.q[0] * s.p[1] - s.q[1] * s.p[0];
    } else {
      for (int a = 0; a < s.dim; ++a) {
        k[a] = std::abs(s.q[a]);
        k[2 + a] = std::abs(s.p[a]);  // Z2 flips both signs; trivial handled below
      }
    }
    return k;
  };
  std::vector<int> assigned(cs.points.size(), -1);
  for (std::size_t i = 0; i < cs.points.size(); ++i) {
    if (assigned[i] >= 0) continue;
    int orbit_id = static_cast<int>(out.orbits.size());
    out.orbits.push_back({static_cast<int>(i)});
    assigned[i] = orbit_id;
    if (G.kind == GroupKind::Trivial) continue;
    auto ki = orbit_key(cs.points[i]);
    for (std::size_t j = i + 1; j < cs.points.size(); ++j) {
      if (assigned[j] >= 0) continue;
      auto kj = orbit_key(cs.points[j]);
      double d = 0;
      for (int a = 0; a < 4; ++a) d += std::abs(ki[a] - kj[a]);
      bool same = d < 1e-6;
      if (G.kind == GroupKind::Z2 && same) {
        // Z2 orbits have at most two elements: require j = -i exactly
        PhasePoint flipped = act_phase(G, GroupElement::z2_flip(), cs.points[i]);
        same = distance(flipped, cs.points[j]) < 1e-5;
      }
      if (same) {
        out.orbits[orbit_id].push_back(static_cast<int>(j));
        assigned[j] = orbit_id;
      }
    }
  }

  for (const auto& c : cs.points) out.extremal_ground_states.push_back(ClassicalState::dirac(c));

  if (!out.minimizers.empty()) {
    if (G.kind == GroupKind::SO2 && out.minimizers.size() > 2) {
      out.minimizer_orbit_measure = ClassicalState::orbit_measure(G, out.minimizers[0]);
      out.orbit_measure_valid = true;
    } else if (G.kind == GroupKind::Z2 && out.minimizers.size() == 2) {
      out.minimizer_orbit_measure = ClassicalState::atoms_list(
          {{out.minimizers[0], 0.5}, {out.minimizers[1], 0.5}});
      out.orbit_measure_valid = true;
    } else {
      out.minimizer_orbit_measure = ClassicalState::dirac(out.minimizers[0]);
      out.orbit_measure_valid = true;
    }
  }
  return out;
}

double limit_measure_compare(const WaveFunction& psi, const ClassicalState& mu_target,
                             const std::vector<Symbol>& test_symbols, const PhaseGrid& pg) {
  HusimiField field = husimi(psi, pg);
  double worst = 0;
  for (const Symbol& f : test_symbols) {
    double measured = husimi_expectation(field, f).real();
    double target = mu_target.integrate(f).real();
    worst = std::max(worst, std::abs(measured - target));
  }
  return worst;
}

json SSBReport::to_json() const {
  json j;
  j["schema"] = "ssb-report/1";
  j["potential"] = potential;
  j["group"] = group;
  auto point_json = [](const PhasePoint& s) {
    json p;
    p["q"] = std::vector<double>(s.q.begin(), s.q.begin() + s.dim);
    p["p"] = std::vector<double>(s.p.begin(), s.p.begin() + s.dim);
    return p;
  };
  json classical;
  json crit = json::array();
  for (const auto& c : critical_points) crit.push_back(point_json(c));
  classical["critical_points"] = crit;
  json mins = json::array();
  for (const auto& c : minimizers) mins.push_back(point_json(c));
  classical["minimizers"] = mins;
  classical["minimizer_orbit_count"] = minimizer_orbit_count;
  classical["has_noninvariant_extremal_ground"] = has_noninvariant_extremal_ground;
  classical["weak_ssb"] = classical_weak_ssb;
  j["classical"] = classical;

  json rows = json::array();
  for (const auto& r : quantum) {
    json row;
    row["hbar"] = r.hbar;
    row["E0"] = r.E0;
    row["gap"] = r.gap;
    row["overlaps"] = r.overlaps;
    row["symmetry_projected"] = r.symmetry_projected;
    row["no_ssb"] = r.no_ssb;
    rows.push_back(row);
  }
  j["quantum"] = {{"rows", rows}, {"no_ssb", quantum_no_ssb}};
  j["emergence"] = {{"limit_defect", limit_defect},
                    {"threshold", emergence_threshold},
                    {"emergent", emergent}};
  return j;
}

std::string SSBReport::render_text() const {
  std::ostringstream os;
  os << "SSB report: potential=" << potential << " group=" << group << "\n";
  os << "  classical: " << critical_points.size() << " critical points, " << minimizers.size()
     << " minimizers (" << minimizer_orbit_count << " orbit(s)); weak SSB: "
     << (classical_weak_ssb ? "yes" : "no") << "\n";
  os << "  quantum:\n";
  for (const auto& r : quantum) {
    os << "    hbar=" << r.hbar << "  E0=" << r.E0 << "  gap=" << r.gap << "  overlap=";
    for (double o : r.overlaps) os << o << " ";
    os << (r.no_ssb ? "[no SSB]" : "[CHECK]") << (r.symmetry_projected ? " (projected)" : "")
       << "\n";
  }
  os << "  quantum no-SSB at all hbar: " << (quantum_no_ssb ? "yes" : "no") << "\n";
  os << "  emergence: defect=" << limit_defect << " threshold=" << emergence_threshold
     << " emergent weak SSB: " << (emergent ? "yes" : "no") << "\n";
  return os.str();
}

SSBReport ssb_report(const Potential& V, const GroupAction& G, const std::vector<double>& hbars,
                     const SsbOptions& opts) {
  SSBReport rep;
  rep.potential = V.name;
  rep.group = group_name(G);
  rep.emergence_threshold = opts.emergence_threshold;

  // classical section
  Symbol h = hamiltonian_symbol(V);
  SearchBox box;
  double span = 1.8;
  for (const auto& m : V.minimizers)
    for (int a = 0; a < V.dim; ++a) span = std::max(span, std::abs(m.q[a]) + 1.0);
  for (int a = 0; a < V.dim; ++a) {
    box.q_lo[a] = -span;
    box.q_hi[a] = span;
    box.p_lo[a] = -1.0;
    box.p_hi[a] = 1.0;
  }
  ClassicalGroundStructure cls = classical_ground_states(h, G, box);
  rep.critical_points = cls.critical_points;
  rep.minimizers = cls.minimizers;
  // orbits restricted to the minimizer subset
  {
    std::vector<int> min_ids;
    for (std::size_t i = 0; i < cls.critical_points.size(); ++i)
      for (const auto& m : cls.minimizers)
        if (distance(cls.critical_points[i], m) < 1e-9) {
          min_ids.push_back(static_cast<int>(i));
          break;
        }
    int count = 0;
    for (const auto& orbit : cls.orbits) {
      for (int id : orbit)
        if (std::find(min_ids.begin(), min_ids.end(), id) != min_ids.end()) {
          ++count;
          break;
        }
    }
    rep.minimizer_orbit_count = count;
  }
  for (const auto& m : cls.minimizers) {
    StateClassification c = classify_state(ClassicalState::dirac(m), h, G);
    if (c.is_extremal && c.is_ground && !c.is_G_invariant)
      rep.has_noninvariant_extremal_ground = true;
  }
  rep.classical_weak_ssb = rep.has_noninvariant_extremal_ground && rep.minimizers.size() > 1;

  // quantum section
  rep.quantum_no_ssb = true;
  GridSpec g = GridSpec::position(V.dim, opts.sweep.grid_L, opts.sweep.grid_N);
  for (double hbar : hbars) {
    EigenOptions eo = opts.sweep.eig;
    GroundState gs = ground_state(V, hbar, g, eo);
    SsbQuantumRow row;
    row.hbar = hbar;
    row.E0 = gs.energy;
    row.gap = gs.gap;
    row.symmetry_projected = gs.symmetry_projected;
    row.no_ssb = gs.gap > 0;
    for (const auto& gen : G.generators()) {
      double ov = std::abs(inner_product(gs.psi, unitary_rep(G, gen, gs.psi)));
      row.overlaps.push_back(ov);
      if (std::abs(ov - 1.0) > 1e-6) row.no_ssb = false;
    }
    if (!row.no_ssb) rep.quantum_no_ssb = false;
    rep.quantum.push_back(row);
  }

  // emergence section: compare the smallest-hbar ground state against the
  // minimizer orbit measure over a family of Gaussian bumps
  if (!hbars.empty() && cls.orbit_measure_valid) {
    double hmin = *std::min_element(hbars.begin(), hbars.end());
    std::vector<Symbol> bumps;
    PhasePoint base = cls.minimizers.empty() ? PhasePoint{V.dim, {0, 0}, {0, 0}}
                                             : cls.minimizers[0];
    for (int i = 0; i < opts.n_test_bumps; ++i) {
      PhasePoint c = base;
      double ang = 2 * kPi * i / std::max(1, opts.n_test_bumps);
      if (V.dim == 1) {
        c.q[0] = base.q[0] * std::cos(ang) * 1.2;
        c.p[0] = 0.35 * std::sin(ang);
      } else {
        c.q[0] = 1.1 * std::cos(ang);
        c.q[1] = 1.1 * std::sin(ang);
      }
      bumps.push_back(make_gaussian_bump(c, opts.bump_width * (1.0 + 0.1 * (i % 3))));
    }
    GroundState gs = ground_state(V, hmin, g, opts.sweep.eig);
    PhaseGrid pg = experiment_phase_grid(V, opts.sweep.t, hmin, bumps, g);
    rep.limit_defect = limit_measure_compare(gs.psi, cls.minimizer_orbit_measure, bumps, pg);
    rep.emergent = rep.classical_weak_ssb && rep.quantum_no_ssb &&
                   rep.limit_defect < opts.emergence_threshold;
  }
  return rep;
}

}  // namespace semiclassica

#pragma once

#include "semiclassica/coherent.hpp"
#include "semiclassica/grid.hpp"
#include "semiclassica/phase_space.hpp"

namespace semiclassica {

enum class GroupKind { Trivial, Z2, SO2 };

struct GroupElement {
  GroupKind kind = GroupKind::Trivial;
  int sign = 1;        // Z2: +1 or -1
  double theta = 0.0;  // SO2: angle in [0, 2 pi)

  static GroupElement identity(GroupKind k) { return {k, 1, 0.0}; }
  static GroupElement z2_flip() { return {GroupKind::Z2, -1, 0.0}; }
  static GroupElement so2_angle(double th) { return {GroupKind::SO2, 1, th}; }
  GroupElement inverse() const;
};

// Symmetry group acting by symplectomorphisms: Z2 as (q,p) -> (-q,-p) on
// n=1, SO(2) as simultaneous rotation of q and p on n=2. Haar quadrature:
// two atoms for Z2, an M-point angular rule for SO(2).
struct GroupAction {
  GroupKind kind = GroupKind::Trivial;
  int haar_points = 256;  // SO(2) angular rule

  static GroupAction trivial() { return {GroupKind::Trivial, 1}; }
  static GroupAction z2() { return {GroupKind::Z2, 2}; }
  static GroupAction so2(int m = 256) { return {GroupKind::SO2, m}; }
  std::vector<GroupElement> generators() const;
};

GroupAction group_by_name(const std::string& name);
std::string group_name(const GroupAction& G);

PhasePoint act_phase(const GroupAction& G, const GroupElement& g, const PhasePoint& sigma);

// (zeta_g f)(sigma) = f(g^{-1} sigma)
Symbol pullback_symbol(const GroupAction& G, const GroupElement& g, const Symbol& f);

// (U_g psi)(x) = psi(g^{-1} x). Z2 flips and quarter-turn SO(2) angles are
// exact index permutations on the symmetric grid; other angles use bilinear
// interpolation with periodic wrap (looser tolerance).
WaveFunction unitary_rep(const GroupAction& G, const GroupElement& g, const WaveFunction& psi);

double haar_average(const GroupAction& G, const Symbol& f, const PhasePoint& sigma0);
Symbol haar_symbol(const GroupAction& G, const Symbol& f);

// Probe operator norm of U_g Q(f) U_g^{-1} - Q(zeta_g f) over a deterministic
// probe family (exact-case elements).
double equivariance_defect(const GroupAction& G, const GroupElement& g, const Symbol& f,
                           double hbar, const GridSpec& grid, const PhaseGrid& pg,
                           const std::vector<WaveFunction>& probes);

}  // namespace semiclassica

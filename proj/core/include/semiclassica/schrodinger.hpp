#pragma once

#include "semiclassica/coherent.hpp"
#include "semiclassica/grid.hpp"
#include "semiclassica/phase_space.hpp"

namespace semiclassica {

// H = -hbar^2 Laplacian + V, matrix free (FFT kinetic + pointwise potential).
struct Hamiltonian {
  double hbar = 0.0;
  GridSpec grid;
  Potential pot;
  std::vector<double> vtable;
  std::vector<double> ktable;  // hbar^2 k^2 multiplier, FFTW order

  WaveFunction apply(const WaveFunction& psi) const;
  void apply_real(const std::vector<double>& x, std::vector<double>& y) const;
  LinOp as_linop() const;
};

Hamiltonian build_hamiltonian(const Potential& V, double hbar, const GridSpec& g);

struct EigenResult {
  int k = 0;
  std::vector<double> energies;
  std::vector<WaveFunction> vectors;  // orthonormal, real-valued
  std::vector<double> residuals;
  std::vector<bool> degenerate;  // gap to a neighbor below the threshold
  bool converged = false;
};

struct EigenOptions {
  double tol = 1e-8;             // residual <= tol * max(1, |E|)
  int max_basis = 0;             // 0: choose from the problem size
  int max_restarts = 40;
  double degeneracy_threshold = 1e-12;
  unsigned seed = 987654321;
};

// Lowest k eigenpairs by Lanczos with full reorthogonalization (thick
// restarts). Large grids (n=2) go through a shift-inverted operator with
// FFT-preconditioned CG inner solves; small grids run Lanczos on H directly.
EigenResult lowest_eigenpairs(const Hamiltonian& H, int k, const EigenOptions& opts = {});

struct GroundState {
  double energy = 0.0;
  WaveFunction psi;
  double gap = 0.0;  // E1 - E0
  bool symmetry_projected = false;
};

// Ground pair with the global phase fixed (grid sum real positive). When the
// potential carries a symmetry tag and the (E0,E1) gap is below the
// degeneracy threshold, the vector is projected onto the G-symmetric
// subspace and renormalized.
GroundState ground_state(const Potential& V, double hbar, const GridSpec& g,
                         const EigenOptions& opts = {});

struct SemigroupResult {
  WaveFunction psi;
  double truncation_bound = 0.0;  // e^{-t E_k} ||psi||
};

// e^{-t H} psi by spectral truncation over the lowest k_modes eigenpairs.
SemigroupResult semigroup_apply(const Hamiltonian& H, double t, const WaveFunction& psi,
                                int k_modes, const EigenOptions& opts = {});
SemigroupResult semigroup_apply(const EigenResult& eig, double t, const WaveFunction& psi);

}  // namespace semiclassica

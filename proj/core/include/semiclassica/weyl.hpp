#pragma once

#include <optional>

#include "semiclassica/coherent.hpp"
#include "semiclassica/grid.hpp"
#include "semiclassica/phase_space.hpp"

namespace semiclassica {

// Weyl quantization for the concrete operator classes used here: position
// multipliers f(X), momentum multipliers f(P), and separable symbols
// f1(q) f2(p) realized through the midpoint kernel
//   K(x,y) = f1((x+y)/2) * g2(x-y),   g2 = (2 pi hbar)^-n Int f2(p) e^{ip.u/hbar} dp,
// discretized so translations land on lattice points exactly (f1 sampled on
// the half lattice, g2 through the inverse DFT of the momentum table).
struct WeylOperator {
  enum class Kind { PositionMultiplier, MomentumMultiplier, Separable };
  Kind kind = Kind::PositionMultiplier;
  double hbar = 0.0;
  GridSpec grid;

  std::vector<Complex> position_table;  // kind Position: f(x_j) on the grid
  std::vector<Complex> momentum_table;  // kind Momentum: f(p_k), FFTW k order
  std::vector<Complex> f1_half;         // kind Separable: f1 on the half lattice
  std::vector<Complex> cneg;            // c_{-m}, compact window, row-major
  int window = 0;                       // per-axis signed window radius
  bool is_real = true;

  WaveFunction apply(const WaveFunction& psi) const;
  WaveFunction apply_adjoint(const WaveFunction& psi) const;
  LinOp as_linop() const;
};

WeylOperator weyl_position(const Symbol& f, const GridSpec& g);
WeylOperator weyl_momentum(const Symbol& f, double hbar, const GridSpec& g);
WeylOperator weyl_separable(const std::optional<Symbol>& f1, const std::optional<Symbol>& f2,
                            double hbar, const GridSpec& g);

// Berezin fast paths for separable symbols (Gaussian-mollified factors, std
// sqrt(hbar/2) per axis): q-only symbols act as mollified multipliers,
// p-only as mollified Fourier multipliers, products via the separable Weyl
// kernel of the mollified factors.
WeylOperator berezin_separable(const std::optional<Symbol>& f1, const std::optional<Symbol>& f2,
                               double hbar, const GridSpec& g);

// e^{hbar Delta_2n / 4} f: Gaussian smoothing with variance hbar/2 per phase
// axis. Validates decay on the given phase window (throws on tail mass) and
// returns a symbol whose evaluator uses Gauss-Hermite quadrature.
Symbol heat_smooth(const Symbol& f, double hbar, const PhaseGrid& pg);

// Gauss-Hermite nodes/weights for Int e^{-t^2} h(t) dt (Golub-Welsch).
void gauss_hermite(int npts, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace semiclassica

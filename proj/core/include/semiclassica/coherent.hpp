#pragma once

#include <functional>
#include <vector>

#include "semiclassica/grid.hpp"
#include "semiclassica/phase_space.hpp"

namespace semiclassica {

// Product quadrature grid on phase space R^{2n}: q axes first, then p axes.
// Midpoint nodes (lo + (i+1/2) step) so that symmetric ranges produce grids
// that are exactly invariant under sigma -> -sigma. Node weight is
// prod(steps) / (2 pi hbar)^n, the normalized Liouville measure.
struct PhaseAxis {
  double lo = 0.0;
  double step = 0.0;
  int count = 0;
  double node(int i) const { return lo + (i + 0.5) * step; }
};

struct PhaseGrid {
  int dim = 1;  // n
  double hbar = 0.0;
  std::vector<PhaseAxis> axes;  // size 2n

  std::int64_t total() const;
  double weight() const;  // per-node quadrature weight
  PhasePoint node(std::int64_t m) const;

  // Builds a grid with per-axis spacing <= 0.5 sqrt(hbar) covering the given
  // ranges (q_lo/q_hi/p_lo/p_hi hold `dim` entries each).
  static PhaseGrid product(int dim, double hbar, const double* q_lo, const double* q_hi,
                           const double* p_lo, const double* p_hi);
};

struct HusimiField {
  PhaseGrid pg;
  std::vector<Complex> v;  // (W psi)(sigma_m)

  double weighted_mass() const;  // sum w |v|^2, ~ ||psi||^2 by the isometry
};

// Schrodinger coherent state on the grid, unit norm after grid normalization.
// Requires sigma inside the box with margin >= 8 sqrt(hbar) per axis.
WaveFunction coherent_state(const PhasePoint& sigma, double hbar, const GridSpec& g);

// (W psi)(sigma_m) = <Psi^sigma_m, psi> for every phase node, with the
// Gaussian window truncated at radius 8 sqrt(hbar) (tail < 1e-13 relative).
HusimiField husimi(const WaveFunction& psi, const PhaseGrid& pg);

// sum_m w f(sigma_m) |W psi(sigma_m)|^2  (the Husimi-density expectation).
Complex husimi_expectation(const WaveFunction& psi, const Symbol& f, const PhaseGrid& pg);
Complex husimi_expectation(const HusimiField& field, const Symbol& f);

// Matrix-free operator on wavefunctions. apply_adjoint empty => self-adjoint.
struct LinOp {
  GridSpec grid;
  std::function<WaveFunction(const WaveFunction&)> apply;
  std::function<WaveFunction(const WaveFunction&)> apply_adjoint;

  WaveFunction operator()(const WaveFunction& x) const { return apply(x); }
  WaveFunction adj(const WaveFunction& x) const {
    return apply_adjoint ? apply_adjoint(x) : apply(x);
  }
  bool self_adjoint() const { return !static_cast<bool>(apply_adjoint); }
};

LinOp linop_identity(const GridSpec& g);
LinOp linop_combine(Complex ca, const LinOp& a, Complex cb, const LinOp& b);
LinOp linop_compose(const LinOp& a, const LinOp& b);  // x -> a(b(x))
// (i/hbar) [A, B] with the correct adjoint wiring.
LinOp linop_scaled_commutator(const LinOp& a, const LinOp& b, double hbar);

// Berezin quantization Q(f) = A* D A where row m of A is <Psi^sigma_m, .>
// and D = diag(w_m f(sigma_m)). Hermitian for real f, PSD for f >= 0,
// exactly, by the factorization.
struct BerezinOperator {
  double hbar = 0.0;
  GridSpec grid;
  PhaseGrid pg;
  std::vector<Complex> ftable;
  bool f_is_real = false;

  WaveFunction apply(const WaveFunction& psi) const;
  WaveFunction apply_adjoint(const WaveFunction& psi) const;
  LinOp as_linop() const;
  double trace() const;  // = sum w f (exact for the quadrature operator)
  // Dense kernel K(x,y); n = 1 grids only (testing / small problems).
  std::vector<Complex> materialize() const;
};

// Builds Q(f) on the given grids. When check_coverage is set, verifies that
// a coherent probe at the grid center keeps Husimi mass >= 0.99 (quadrature
// coverage); throws NumericalError on deficit.
BerezinOperator berezin_dense(const Symbol& f, double hbar, const GridSpec& g,
                              const PhaseGrid& pg, bool check_coverage = true);

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Largest singular value by power iteration on op* op (relative tolerance).
NormEstimate operator_norm(const LinOp& op, double tol = 1e-8, int max_iter = 500,
                           unsigned seed = 20240901);

// max over probes of ||op psi|| / ||psi||; the "probe norm" used by the
// defect experiments.
double probe_norm(const LinOp& op, const std::vector<WaveFunction>& probes);

// Power iteration for the top eigenpair of a PSD self-adjoint operator.
struct EigenPair {
  double value = 0.0;
  WaveFunction vector;
  bool converged = false;
  int iterations = 0;
};
EigenPair top_eigenpair(const LinOp& op, const WaveFunction& start, double tol = 1e-10,
                        int max_iter = 2000);

// Extreme Ritz values of a self-adjoint operator over an m-dim Krylov space.
struct RitzExtremes {
  double min = 0.0, max = 0.0;
};
RitzExtremes krylov_ritz_extremes(const LinOp& op, int m, unsigned seed = 7);

}  // namespace semiclassica

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semiclassica/types.hpp"

namespace semiclassica {

// A point sigma = (q, p) in R^{2n}, n in {1,2}.
struct PhasePoint {
  int dim = 1;
  std::array<double, 2> q{0.0, 0.0};
  std::array<double, 2> p{0.0, 0.0};

  static PhasePoint make1(double q0, double p0) { return {1, {q0, 0.0}, {p0, 0.0}}; }
  static PhasePoint make2(double q0, double q1, double p0, double p1) {
    return {2, {q0, q1}, {p0, p1}};
  }
  double norm2() const {
    double s = 0;
    for (int a = 0; a < dim; ++a) s += q[a] * q[a] + p[a] * p[a];
    return s;
  }
};

double distance(const PhasePoint& a, const PhasePoint& b);

enum class DecayClass { CompactlySupported, Schwartz, BoundedContinuous };

// A scalar function on phase space. The gradient evaluator is optional;
// gradient() falls back to central differences with relative step 1e-5.
// Separable symbols f(q,p) = fq(q) * fp(p) carry their factors so that the
// Weyl/Berezin fast paths can exploit them.
struct Symbol {
  int dim = 1;
  std::function<Complex(const PhasePoint&)> eval;
  // dq, dp: length-dim arrays receiving d f/dq^a and d f/dp_a.
  std::function<void(const PhasePoint&, Complex* dq, Complex* dp)> grad;
  DecayClass decay = DecayClass::BoundedContinuous;

  std::function<Complex(const double* q)> q_factor;  // set iff separable
  std::function<Complex(const double* p)> p_factor;

  // Optional hint for adaptive phase-grid extents: |f| < 1e-10 outside
  // the ball of this radius around `support_center`.
  std::optional<double> support_radius;
  PhasePoint support_center;

  bool separable() const { return static_cast<bool>(q_factor) || static_cast<bool>(p_factor); }

  Complex operator()(const PhasePoint& s) const { return eval(s); }
};

// Evaluates the (analytic or finite-difference) gradient of f at sigma.
void symbol_gradient(const Symbol& f, const PhasePoint& sigma, Complex* dq, Complex* dp);

enum class SymmetryTag { None, Z2, SO2 };

// A confining potential V on R^n satisfying (V1)-(V3) style hypotheses,
// checked numerically at experiment setup rather than symbolically.
struct Potential {
  int dim = 1;
  std::string name;
  std::function<double(const double* q)> value;
  std::function<void(const double* q, double* grad)> gradient;
  double min_value = 0.0;
  std::vector<PhasePoint> minimizers;  // representative minimizers (p = 0)
  SymmetryTag symmetry = SymmetryTag::None;

  double operator()(const PhasePoint& s) const { return value(s.q.data()); }
};

Potential make_double_well();        // n=1, V(q) = (q^2-1)^2
Potential make_mexican_hat();        // n=2, V(q) = (|q|^2-1)^2
Potential make_harmonic(int dim);    // V(q) = |q|^2
// Polynomial in q (n=1) or in r^2=|q|^2 (n=2) from low-order-first coefficients.
Potential make_polynomial_potential(int dim, const std::vector<double>& coeffs);
Potential potential_by_name(const std::string& name, int dim);

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> points;
  std::vector<double> energies;
};

// --- operations ---------------------------------------------------------

Complex eval_symbol(const Symbol& f, const PhasePoint& sigma);

// Paper sign convention: {f,g} = sum_k df/dp_k dg/dq^k - dg/dp_k df/dq^k.
// Note this is the negative of the more common convention.
Complex poisson_bracket(const Symbol& f, const Symbol& g, const PhasePoint& sigma);

// e(q,p) = exp(-t (p^2 + V(q))), separable with analytic gradient.
Symbol gibbs_symbol(const Potential& V, double t);

// The unbounded Hamiltonian symbol h = p^2 + V (analytic gradient); used
// for flows and critical sets, never quantized directly.
Symbol hamiltonian_symbol(const Potential& V);

struct SearchBox {
  std::array<double, 2> q_lo{-2, -2}, q_hi{2, 2};
  std::array<double, 2> p_lo{-2, -2}, p_hi{2, 2};
};

// All zeros of grad h found by damped Newton from a seed grid, deduplicated
// at distance 1e-6. `converged` is false when no seed converged.
struct CriticalSet {
  std::vector<PhasePoint> points;
  bool converged = true;
};
CriticalSet critical_set(const Symbol& h, const SearchBox& box, int seed_res = 12);

// Stormer-Verlet flow of h = p^2 + V (so qdot = 2p, pdot = -grad V).
// Samples every dt; integrates internally at dt/32 to keep the energy
// drift within the Trajectory tolerance.
Trajectory flow(const Potential& V, const PhasePoint& sigma0, double T, double dt);

// --- observable factories used by experiments and the CLI ----------------

// f(sigma) = exp(-|sigma - center|^2 / (2 width)), width is the variance.
Symbol make_gaussian_bump(const PhasePoint& center, double width);
// f(sigma) = coord * exp(-|sigma - center|^2 / (2 cutoff_width)); index
// 0..dim-1 picks q^a, dim..2dim-1 picks p_a.
Symbol make_coordinate_with_cutoff(int dim, int index, const PhasePoint& center,
                                   double cutoff_width);
// f(sigma) = (q^axis)^2 * exp(-|sigma - center|^2 / (2 cutoff_width)).
Symbol make_qsquared_with_cutoff(int dim, int axis, const PhasePoint& center,
                                 double cutoff_width);

}  // namespace semiclassica

#include "semiclassica/coherent.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "semiclassica/parallel.hpp"

namespace semiclassica {

std::int64_t PhaseGrid::total() const {
  std::int64_t t = 1;
  for (const auto& a : axes) t *= a.count;
  return t;
}

double PhaseGrid::weight() const {
  double w = 1;
  for (const auto& a : axes) w *= a.step;
  return w / std::pow(2 * kPi * hbar, dim);
}

PhasePoint PhaseGrid::node(std::int64_t m) const {
  PhasePoint s;
  s.dim = dim;
  int idx[4] = {0, 0, 0, 0};
  for (int i = 2 * dim - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(m % axes[i].count);
    m /= axes[i].count;
  }
  for (int a = 0; a < dim; ++a) {
    s.q[a] = axes[a].node(idx[a]);
    s.p[a] = axes[dim + a].node(idx[dim + a]);
  }
  return s;
}

PhaseGrid PhaseGrid::product(int dim, double hbar, const double* q_lo, const double* q_hi,
                             const double* p_lo, const double* p_hi) {
  if (!(hbar > 0)) throw ConfigError("PhaseGrid: hbar must be positive");
  PhaseGrid pg;
  pg.dim = dim;
  pg.hbar = hbar;
  const double max_step = 0.5 * std::sqrt(hbar);
  auto make_axis = [max_step](double lo, double hi) {
    if (!(hi > lo)) throw ConfigError("PhaseGrid: empty axis range");
    int count = static_cast<int>(std::ceil((hi - lo) / max_step));
    PhaseAxis ax;
    ax.lo = lo;
    ax.count = count;
    ax.step = (hi - lo) / count;
    return ax;
  };
  for (int a = 0; a < dim; ++a) pg.axes.push_back(make_axis(q_lo[a], q_hi[a]));
  for (int a = 0; a < dim; ++a) pg.axes.push_back(make_axis(p_lo[a], p_hi[a]));
  return pg;
}

double HusimiField::weighted_mass() const {
  const double w = pg.weight();
  double acc = 0;
  for (const Complex& z : v) acc += std::norm(z);
  return acc * w;
}

// --- coherent window machinery -------------------------------------------

namespace {

struct AxisWindow {
  int j_begin = 0;
  int count = 0;
};

// Index window covering |x - q| <= R around q on the periodic grid; indices
// are used modulo N and displacements are taken to the nearest image.
AxisWindow axis_window(const GridSpec& g, double q, double R) {
  const double L = g.half_width();
  AxisWindow w;
  if (2 * R >= 2 * L) {
    w.j_begin = 0;
    w.count = g.npts;
    return w;
  }
  w.j_begin = static_cast<int>(std::ceil((q - R + L) / g.spacing));
  int j_end = static_cast<int>(std::floor((q + R + L) / g.spacing));
  w.count = j_end - w.j_begin + 1;
  if (w.count > g.npts) {
    w.j_begin = 0;
    w.count = g.npts;
  }
  if (w.count < 1) w.count = 1;
  return w;
}

inline double wrap_displacement(double d, double L) {
  if (d >= L) d -= 2 * L * std::floor((d + L) / (2 * L));
  if (d < -L) d += 2 * L * std::floor((L - d) / (2 * L));
  return d;
}

// Per-axis coherent factor over a window: values[j] for grid point
// j_begin + j, factor(d) = (pi hbar)^{-1/4} e^{i p q/(2 hbar)} e^{i p d/hbar}
// e^{-d^2/(2 hbar)} with d the nearest-image displacement x - q.
void axis_factor(const GridSpec& g, const AxisWindow& w, double q, double p, double hbar,
                 Complex* values) {
  const double L = g.half_width();
  const double c = std::pow(kPi * hbar, -0.25);
  const Complex phase_const = std::exp(Complex(0, p * q / (2 * hbar)));
  const double x0 = -L + w.j_begin * g.spacing;
  double d0 = x0 - q;
  const bool full = (w.count == g.npts);
  if (!full) {
    // window never wraps relative displacement by construction
    const Complex rot = std::exp(Complex(0, p * g.spacing / hbar));
    Complex ph = std::exp(Complex(0, p * d0 / hbar)) * phase_const * c;
    double d = d0;
    for (int j = 0; j < w.count; ++j) {
      values[j] = ph * std::exp(-d * d / (2 * hbar));
      ph *= rot;
      d += g.spacing;
    }
  } else {
    for (int j = 0; j < w.count; ++j) {
      double d = wrap_displacement(-L + (w.j_begin + j) * g.spacing - q, L);
      values[j] = c * phase_const * std::exp(Complex(0, p * d / hbar)) *
                  std::exp(-d * d / (2 * hbar));
    }
  }
}

struct NodeWindows {
  AxisWindow w[2];
  std::vector<Complex> f0, f1;
};

// Evaluates the coherent factors of the node (q,p) into nw.
void node_factors(const GridSpec& g, const PhasePoint& s, double hbar, double R,
                  NodeWindows& nw) {
  for (int a = 0; a < g.dim; ++a) {
    nw.w[a] = axis_window(g, s.q[a], R);
    auto& buf = (a == 0) ? nw.f0 : nw.f1;
    buf.resize(nw.w[a].count);
    axis_factor(g, nw.w[a], s.q[a], s.p[a], hbar, buf.data());
  }
}

inline int wrap_index(int j, int N) {
  j %= N;
  return j < 0 ? j + N : j;
}

}  // namespace

WaveFunction coherent_state(const PhasePoint& sigma, double hbar, const GridSpec& g) {
  if (sigma.dim != g.dim) throw ConfigError("coherent_state: dimension mismatch");
  if (!(hbar > 0)) throw ConfigError("coherent_state: hbar must be positive");
  const double margin = 8 * std::sqrt(hbar);
  for (int a = 0; a < g.dim; ++a)
    if (std::abs(sigma.q[a]) > g.half_width() - margin)
      throw ConfigError("coherent_state: center too close to the box boundary (need margin 8 sqrt(hbar))");
  WaveFunction psi = WaveFunction::zero(g);
  const int N = g.npts;
  std::vector<Complex> f0(N), f1(N);
  AxisWindow full{0, N};
  axis_factor(g, full, sigma.q[0], sigma.p[0], hbar, f0.data());
  if (g.dim == 2) axis_factor(g, full, sigma.q[1], sigma.p[1], hbar, f1.data());
  if (g.dim == 1) {
    for (int j = 0; j < N; ++j) psi.v[j] = f0[j];
  } else {
    for (int j0 = 0; j0 < N; ++j0)
      for (int j1 = 0; j1 < N; ++j1) psi.v[flat_index(g, j0, j1)] = f0[j0] * f1[j1];
  }
  return normalize(psi);
}

namespace {

// Analysis map A: (A psi)_m = <Psi^sigma_m, psi> (windowed, parallel).
void analysis(const WaveFunction& psi, const PhaseGrid& pg, std::vector<Complex>& out) {
  const GridSpec& g = psi.grid;
  const double R = 8 * std::sqrt(pg.hbar);
  const double vol = g.cell_volume();
  const std::int64_t M = pg.total();
  out.assign(M, Complex(0));
  const int N = g.npts;

  parallel_blocks(M, 2048, [&](std::size_t, std::int64_t b, std::int64_t e) {
    NodeWindows nw;
    for (std::int64_t m = b; m < e; ++m) {
      PhasePoint s = pg.node(m);
      node_factors(g, s, pg.hbar, R, nw);
      Complex acc = 0;
      if (g.dim == 1) {
        for (int j = 0; j < nw.w[0].count; ++j)
          acc += std::conj(nw.f0[j]) * psi.v[wrap_index(nw.w[0].j_begin + j, N)];
      } else {
        for (int j0 = 0; j0 < nw.w[0].count; ++j0) {
          const Complex c0 = std::conj(nw.f0[j0]);
          const std::int64_t row = static_cast<std::int64_t>(wrap_index(nw.w[0].j_begin + j0, N)) * N;
          Complex inner = 0;
          for (int j1 = 0; j1 < nw.w[1].count; ++j1)
            inner += std::conj(nw.f1[j1]) * psi.v[row + wrap_index(nw.w[1].j_begin + j1, N)];
          acc += c0 * inner;
        }
      }
      out[m] = acc * vol;
    }
  });
}

// Synthesis map A*: out(x) = sum_m coeff_m Psi^sigma_m(x). Serial so the
// accumulation order is fixed.
WaveFunction synthesis(const PhaseGrid& pg, const GridSpec& g, const std::vector<Complex>& coeff) {
  const double R = 8 * std::sqrt(pg.hbar);
  WaveFunction out = WaveFunction::zero(g);
  const std::int64_t M = pg.total();
  const int N = g.npts;
  NodeWindows nw;
  for (std::int64_t m = 0; m < M; ++m) {
    const Complex c = coeff[m];
    if (c == Complex(0)) continue;
    PhasePoint s = pg.node(m);
    node_factors(g, s, pg.hbar, R, nw);
    if (g.dim == 1) {
      for (int j = 0; j < nw.w[0].count; ++j)
        out.v[wrap_index(nw.w[0].j_begin + j, N)] += c * nw.f0[j];
    } else {
      for (int j0 = 0; j0 < nw.w[0].count; ++j0) {
        const Complex c0 = c * nw.f0[j0];
        const std::int64_t row = static_cast<std::int64_t>(wrap_index(nw.w[0].j_begin + j0, N)) * N;
        for (int j1 = 0; j1 < nw.w[1].count; ++j1)
          out.v[row + wrap_index(nw.w[1].j_begin + j1, N)] += c0 * nw.f1[j1];
      }
    }
  }
  return out;
}

}  // namespace

HusimiField husimi(const WaveFunction& psi, const PhaseGrid& pg) {
  HusimiField field;
  field.pg = pg;
  analysis(psi, pg, field.v);
  return field;
}

Complex husimi_expectation(const HusimiField& field, const Symbol& f) {
  const PhaseGrid& pg = field.pg;
  if (f.dim != pg.dim) throw ConfigError("husimi_expectation: dimension mismatch");
  const double w = pg.weight();
  const std::int64_t M = pg.total();
  const std::int64_t bs = 4096;
  std::vector<Complex> parts(block_count(M, bs), Complex(0));
  parallel_blocks(M, bs, [&](std::size_t blk, std::int64_t b, std::int64_t e) {
    Complex acc = 0;
    for (std::int64_t m = b; m < e; ++m) acc += f.eval(pg.node(m)) * std::norm(field.v[m]);
    parts[blk] = acc;
  });
  return tree_sum(parts) * w;
}

Complex husimi_expectation(const WaveFunction& psi, const Symbol& f, const PhaseGrid& pg) {
  return husimi_expectation(husimi(psi, pg), f);
}

// --- LinOp helpers --------------------------------------------------------

LinOp linop_identity(const GridSpec& g) {
  LinOp op;
  op.grid = g;
  op.apply = [](const WaveFunction& x) { return x; };
  return op;
}

LinOp linop_combine(Complex ca, const LinOp& a, Complex cb, const LinOp& b) {
  LinOp op;
  op.grid = a.grid;
  op.apply = [ca, a, cb, b](const WaveFunction& x) {
    WaveFunction ya = a.apply(x);
    WaveFunction yb = b.apply(x);
    for (std::size_t i = 0; i < ya.v.size(); ++i) ya.v[i] = ca * ya.v[i] + cb * yb.v[i];
    return ya;
  };
  if (!a.self_adjoint() || !b.self_adjoint() || ca.imag() != 0 || cb.imag() != 0) {
    op.apply_adjoint = [ca, a, cb, b](const WaveFunction& x) {
      WaveFunction ya = a.adj(x);
      WaveFunction yb = b.adj(x);
      for (std::size_t i = 0; i < ya.v.size(); ++i)
        ya.v[i] = std::conj(ca) * ya.v[i] + std::conj(cb) * yb.v[i];
      return ya;
    };
  }
  return op;
}

LinOp linop_compose(const LinOp& a, const LinOp& b) {
  LinOp op;
  op.grid = b.grid;
  op.apply = [a, b](const WaveFunction& x) { return a.apply(b.apply(x)); };
  op.apply_adjoint = [a, b](const WaveFunction& x) { return b.adj(a.adj(x)); };
  return op;
}

LinOp linop_scaled_commutator(const LinOp& a, const LinOp& b, double hbar) {
  LinOp op;
  op.grid = a.grid;
  const Complex scale(0, 1.0 / hbar);
  op.apply = [a, b, scale](const WaveFunction& x) {
    WaveFunction ab = a.apply(b.apply(x));
    WaveFunction ba = b.apply(a.apply(x));
    for (std::size_t i = 0; i < ab.v.size(); ++i) ab.v[i] = scale * (ab.v[i] - ba.v[i]);
    return ab;
  };
  op.apply_adjoint = [a, b, scale](const WaveFunction& x) {
    // ((i/h)[A,B])* = (i/h)[A*,B*] applied with the factors swapped
    WaveFunction ba = b.adj(a.adj(x));
    WaveFunction ab = a.adj(b.adj(x));
    for (std::size_t i = 0; i < ab.v.size(); ++i) ab.v[i] = scale * (ab.v[i] - ba.v[i]);
    return ab;
  };
  return op;
}

// --- Berezin operator -----------------------------------------------------

WaveFunction BerezinOperator::apply(const WaveFunction& psi) const {
  std::vector<Complex> h;
  analysis(psi, pg, h);
  const double w = pg.weight();
  for (std::size_t m = 0; m < h.size(); ++m) h[m] *= w * ftable[m];
  return synthesis(pg, grid, h);
}

WaveFunction BerezinOperator::apply_adjoint(const WaveFunction& psi) const {
  std::vector<Complex> h;
  analysis(psi, pg, h);
  const double w = pg.weight();
  for (std::size_t m = 0; m < h.size(); ++m) h[m] *= w * std::conj(ftable[m]);
  return synthesis(pg, grid, h);
}

LinOp BerezinOperator::as_linop() const {
  LinOp op;
  op.grid = grid;
  BerezinOperator self = *this;
  op.apply = [self](const WaveFunction& x) { return self.apply(x); };
  if (!f_is_real)
    op.apply_adjoint = [self](const WaveFunction& x) { return self.apply_adjoint(x); };
  return op;
}

double BerezinOperator::trace() const {
  const double w = pg.weight();
  double acc = 0;
  for (const Complex& z : ftable) acc += z.real();
  return acc * w;
}

std::vector<Complex> BerezinOperator::materialize() const {
  if (grid.dim != 1) throw ConfigError("materialize: n = 1 grids only");
  const int N = grid.npts;
  std::vector<Complex> K(static_cast<std::size_t>(N) * N, Complex(0));
  const double R = 8 * std::sqrt(pg.hbar);
  const double w = pg.weight();
  NodeWindows nw;
  const std::int64_t M = pg.total();
  for (std::int64_t m = 0; m < M; ++m) {
    PhasePoint s = pg.node(m);
    node_factors(grid, s, pg.hbar, R, nw);
    const Complex wf = w * ftable[m];
    for (int i = 0; i < nw.w[0].count; ++i) {
      int xi = wrap_index(nw.w[0].j_begin + i, N);
      const Complex left = wf * nw.f0[i];
      for (int j = 0; j < nw.w[0].count; ++j)
        K[static_cast<std::size_t>(xi) * N + wrap_index(nw.w[0].j_begin + j, N)] +=
            left * std::conj(nw.f0[j]);
    }
  }
  return K;
}

BerezinOperator berezin_dense(const Symbol& f, double hbar, const GridSpec& g,
                              const PhaseGrid& pg, bool check_coverage) {
  if (f.dim != g.dim || f.dim != pg.dim) throw ConfigError("berezin_dense: dimension mismatch");
  BerezinOperator Q;
  Q.hbar = hbar;
  Q.grid = g;
  Q.pg = pg;
  const std::int64_t M = pg.total();
  Q.ftable.resize(M);
  bool real = true;
  for (std::int64_t m = 0; m < M; ++m) {
    Q.ftable[m] = f.eval(pg.node(m));
    if (Q.ftable[m].imag() != 0.0) real = false;
  }
  Q.f_is_real = real;
  if (check_coverage) {
    // coherent probe at the grid center must keep its Husimi mass
    PhasePoint c;
    c.dim = pg.dim;
    for (int a = 0; a < pg.dim; ++a) {
      const PhaseAxis& qa = pg.axes[a];
      const PhaseAxis& pa = pg.axes[pg.dim + a];
      c.q[a] = qa.lo + 0.5 * qa.count * qa.step;
      c.p[a] = pa.lo + 0.5 * pa.count * pa.step;
    }
    WaveFunction probe = coherent_state(c, hbar, g);
    double mass = husimi(probe, pg).weighted_mass();
    if (mass < 0.99)
      throw NumericalError("berezin_dense: phase-grid coverage deficit (probe mass " +
                           std::to_string(mass) + ")");
  }
  return Q;
}

// --- norms and eigenpairs --------------------------------------------------

namespace {
WaveFunction random_wavefunction(const GridSpec& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  WaveFunction x = WaveFunction::zero(g);
  for (Complex& z : x.v) z = Complex(dist(rng), dist(rng));
  return normalize(x);
}
}  // namespace

NormEstimate operator_norm(const LinOp& op, double tol, int max_iter, unsigned seed) {
  WaveFunction x = random_wavefunction(op.grid, seed);
  NormEstimate est;
  double prev = -1;
  for (int it = 0; it < max_iter; ++it) {
    WaveFunction y = op.apply(x);
    WaveFunction z = op.adj(y);
    double s2 = inner_product(x, z).real();
    double sigma = s2 > 0 ? std::sqrt(s2) : 0.0;
    double zn = norm(z);
    est.value = sigma;
    est.iterations = it + 1;
    if (zn <= 1e-300) {
      est.value = 0;
      est.converged = true;
      return est;
    }
    if (prev >= 0 && std::abs(sigma - prev) <= tol * std::max(sigma, 1e-30)) {
      est.converged = true;
      return est;
    }
    prev = sigma;
    for (std::size_t i = 0; i < x.v.size(); ++i) x.v[i] = z.v[i] / zn;
  }
  return est;
}

double probe_norm(const LinOp& op, const std::vector<WaveFunction>& probes) {
  double best = 0;
  for (const auto& psi : probes) {
    double n = norm(psi);
    if (n <= 0) continue;
    best = std::max(best, norm(op.apply(psi)) / n);
  }
  return best;
}

EigenPair top_eigenpair(const LinOp& op, const WaveFunction& start, double tol, int max_iter) {
  EigenPair out;
  WaveFunction x = normalize(start);
  double prev = 0;
  for (int it = 0; it < max_iter; ++it) {
    WaveFunction y = op.apply(x);
    double lam = inner_product(x, y).real();
    double yn = norm(y);
    out.value = lam;
    out.iterations = it + 1;
    if (yn <= 1e-300) {
      out.vector = x;
      out.converged = true;
      return out;
    }
    for (std::size_t i = 0; i < x.v.size(); ++i) x.v[i] = y.v[i] / yn;
    if (it > 0 && std::abs(lam - prev) <= tol * std::max(std::abs(lam), 1e-30)) {
      out.vector = x;
      out.converged = true;
      return out;
    }
    prev = lam;
  }
  out.vector = x;
  return out;
}

RitzExtremes krylov_ritz_extremes(const LinOp& op, int m, unsigned seed) {
  WaveFunction v = random_wavefunction(op.grid, seed);
  std::vector<WaveFunction> basis;
  std::vector<double> alpha, beta;
  basis.push_back(v);
  for (int j = 0; j < m; ++j) {
    WaveFunction w = op.apply(basis[j]);
    double a = inner_product(basis[j], w).real();
    alpha.push_back(a);
    // full reorthogonalization, two passes
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : basis) {
        Complex c = inner_product(u, w);
        for (std::size_t i = 0; i < w.v.size(); ++i) w.v[i] -= c * u.v[i];
      }
    double b = norm(w);
    if (b < 1e-13 || j == m - 1) break;
    beta.push_back(b);
    for (Complex& z : w.v) z /= b;
    basis.push_back(w);
  }
  const int k = static_cast<int>(alpha.size());
  Eigen::VectorXd diag(k), sub(std::max(k - 1, 0));
  for (int i = 0; i < k; ++i) diag[i] = alpha[i];
  for (int i = 0; i + 1 < k; ++i) sub[i] = beta[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  RitzExtremes r;
  r.min = es.eigenvalues().minCoeff();
  r.max = es.eigenvalues().maxCoeff();
  return r;
}

}  // namespace semiclassica

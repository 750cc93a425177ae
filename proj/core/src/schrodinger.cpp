#include "semiclassica/schrodinger.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>

#include "semiclassica/fft.hpp"
#include "semiclassica/symmetry.hpp"

namespace semiclassica {

namespace {

// kinetic multiplier table hbar^2 k^2 in FFTW k order
std::vector<double> kinetic_table(const GridSpec& g, double hbar) {
  const int N = g.npts;
  const double L = g.half_width();
  auto k_signed = [N](int k) { return k < N / 2 ? k : k - N; };
  std::vector<double> t(g.total());
  if (g.dim == 1) {
    for (int k = 0; k < N; ++k) {
      double w = kPi * k_signed(k) / L;
      t[k] = hbar * hbar * w * w;
    }
  } else {
    for (int k0 = 0; k0 < N; ++k0) {
      double w0 = kPi * k_signed(k0) / L;
      for (int k1 = 0; k1 < N; ++k1) {
        double w1 = kPi * k_signed(k1) / L;
        t[static_cast<std::int64_t>(k0) * N + k1] = hbar * hbar * (w0 * w0 + w1 * w1);
      }
    }
  }
  return t;
}

}  // namespace

WaveFunction Hamiltonian::apply(const WaveFunction& psi) const {
  const GridSpec& g = psi.grid;
  std::vector<Complex> hat = dft(g.dim, g.npts, psi.v, true);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= ktable[i];
  std::vector<Complex> kinpsi = dft(g.dim, g.npts, hat, false);
  const double inv = 1.0 / static_cast<double>(g.total());
  WaveFunction out;
  out.grid = g;
  out.v.resize(psi.v.size());
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = kinpsi[i] * inv + vtable[i] * psi.v[i];
  return out;
}

void Hamiltonian::apply_real(const std::vector<double>& x, std::vector<double>& y) const {
  const std::size_t n = x.size();
  static thread_local std::vector<Complex> buf, hat;
  buf.resize(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = Complex(x[i], 0.0);
  hat.resize(n);
  dft(grid.dim, grid.npts, buf.data(), hat.data(), true);
  for (std::size_t i = 0; i < n; ++i) hat[i] *= ktable[i];
  dft(grid.dim, grid.npts, hat.data(), buf.data(), false);
  const double inv = 1.0 / static_cast<double>(grid.total());
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = buf[i].real() * inv + vtable[i] * x[i];
}

LinOp Hamiltonian::as_linop() const {
  LinOp op;
  op.grid = grid;
  Hamiltonian self = *this;
  op.apply = [self](const WaveFunction& x) { return self.apply(x); };
  return op;
}

Hamiltonian build_hamiltonian(const Potential& V, double hbar, const GridSpec& g) {
  if (V.dim != g.dim) throw ConfigError("build_hamiltonian: dimension mismatch");
  if (!(hbar > 0)) throw ConfigError("build_hamiltonian: hbar must be positive");
  g.check_resolves(hbar);
  Hamiltonian H;
  H.hbar = hbar;
  H.grid = g;
  H.pot = V;
  H.ktable = kinetic_table(g, hbar);
  H.vtable.resize(g.total());
  if (g.dim == 1) {
    for (int j = 0; j < g.npts; ++j) {
      double q[1] = {g.node(j)};
      H.vtable[j] = V.value(q);
    }
  } else {
    for (int j0 = 0; j0 < g.npts; ++j0)
      for (int j1 = 0; j1 < g.npts; ++j1) {
        double q[2] = {g.node(j0), g.node(j1)};
        H.vtable[flat_index(g, j0, j1)] = V.value(q);
      }
  }
  return H;
}

// --- Lanczos engine --------------------------------------------------------

namespace {

using ApplyFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

double ddot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dnorm(const std::vector<double>& a) { return std::sqrt(ddot(a, a)); }

struct RitzSet {
  std::vector<double> theta;                // target-end Ritz values
  std::vector<std::vector<double>> vecs;    // Ritz vectors
  std::vector<double> bounds;               // residual bounds |beta * s_last|
};

// Lanczos with full reorthogonalization and thick restarts, implemented as
// incremental Rayleigh-Ritz: T = V^T A V is kept as a small dense matrix so
// restarting with Ritz vectors needs no special bookkeeping.
RitzSet lanczos_extremal(std::int64_t dim, const ApplyFn& applyA, int k, bool largest,
                         int max_basis, int max_restarts, double bound_tol, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<std::vector<double>> basis;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(max_basis + 1, max_basis + 1);

  std::vector<double> v(dim);
  for (double& x : v) x = dist(rng);
  double nv = dnorm(v);
  for (double& x : v) x /= nv;
  basis.push_back(v);

  std::vector<double> w(dim);
  RitzSet out;
  for (int restart = 0; restart <= max_restarts; ++restart) {
    bool converged = false;
    while (static_cast<int>(basis.size()) <= max_basis) {
      const int m = static_cast<int>(basis.size());
      applyA(basis[m - 1], w);
      // two-pass full reorthogonalization; projections build column m-1 of T
      std::vector<double> col(m, 0.0);
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < m; ++i) {
          double c = ddot(basis[i], w);
          for (std::int64_t j = 0; j < dim; ++j) w[j] -= c * basis[i][j];
          col[i] += c;
        }
      for (int i = 0; i < m; ++i) {
        T(i, m - 1) = col[i];
        T(m - 1, i) = col[i];
      }
      double beta = dnorm(w);
      bool breakdown = beta < 1e-13 * std::max(1.0, std::abs(T(m - 1, m - 1)));

      bool check_now = breakdown || m == max_basis || m % 8 == 0;
      if (check_now && m >= k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
        // target-end indices (ascending eigenvalues from Eigen)
        std::vector<int> sel(k);
        for (int i = 0; i < k; ++i) sel[i] = largest ? m - 1 - i : i;
        bool all_ok = true;
        for (int i = 0; i < k; ++i) {
          double b = breakdown ? 0.0 : beta * std::abs(es.eigenvectors()(m - 1, sel[i]));
          if (b > bound_tol * std::max(1.0, std::abs(es.eigenvalues()[sel[i]]))) all_ok = false;
        }
        if (all_ok || breakdown || (m == max_basis && restart == max_restarts)) {
          // assemble the Ritz set (k wanted + a few extra for the restart)
          int extra = std::min(m - k, 8);
          int total = k + std::max(extra, 0);
          out.theta.assign(total, 0.0);
          out.bounds.assign(total, 0.0);
          out.vecs.assign(total, std::vector<double>(dim, 0.0));
          for (int i = 0; i < total; ++i) {
            int si = largest ? m - 1 - i : i;
            out.theta[i] = es.eigenvalues()[si];
            out.bounds[i] = breakdown ? 0.0 : beta * std::abs(es.eigenvectors()(m - 1, si));
            for (int b2 = 0; b2 < m; ++b2) {
              double s = es.eigenvectors()(b2, si);
              const std::vector<double>& u = basis[b2];
              std::vector<double>& y = out.vecs[i];
              for (std::int64_t j = 0; j < dim; ++j) y[j] += s * u[j];
            }
          }
          if (all_ok || breakdown || restart == max_restarts) converged = true;
          if (converged && !breakdown && !all_ok) {
            // out of budget: return the best current approximation
          }
          if (all_ok || breakdown) {
            return out;
          }
          if (restart == max_restarts) return out;
          break;  // thick restart
        }
      }
      if (breakdown) {
        // invariant subspace hit before any check succeeded; restart fresh
        for (double& x : w) x = dist(rng);
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& u : basis) {
            double c = ddot(u, w);
            for (std::int64_t j = 0; j < dim; ++j) w[j] -= c * u[j];
          }
        beta = dnorm(w);
        if (beta < 1e-13) return out;
      }
      for (double& x : w) x /= beta;
      basis.push_back(w);
    }
    // thick restart: Ritz vectors + the orthogonalized continuation vector
    if (out.vecs.empty()) return out;
    std::vector<std::vector<double>> nb(out.vecs.begin(), out.vecs.end());
    T.setZero();
    for (std::size_t i = 0; i < nb.size(); ++i) T(i, i) = out.theta[i];
    // continuation: last residual direction w (already orthogonal to old basis,
    // re-orthogonalize against the Ritz vectors to be safe)
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : nb) {
        double c = ddot(u, w);
        for (std::int64_t j = 0; j < dim; ++j) w[j] -= c * u[j];
      }
    double bw = dnorm(w);
    if (bw > 1e-13) {
      for (double& x : w) x /= bw;
      nb.push_back(w);
      // T entries for the new vector are produced by the next projections
    }
    basis.swap(nb);
    // T currently reflects diag(theta); the coupling column appears when the
    // next Lanczos step projects A v_new on the kept Ritz vectors.
  }
  return out;
}

// Preconditioned CG for (H - sigma) x = b with preconditioner
// (-hbar^2 Lap + c)^{-1} applied spectrally.
struct ShiftedSolver {
  const Hamiltonian* H;
  double sigma;
  double precshift;
  std::vector<double> ktab;

  explicit ShiftedSolver(const Hamiltonian& Ham, double s) : H(&Ham), sigma(s) {
    ktab = kinetic_table(Ham.grid, Ham.hbar);
    double vmean = std::accumulate(Ham.vtable.begin(), Ham.vtable.end(), 0.0) /
                   static_cast<double>(Ham.vtable.size());
    precshift = std::max(vmean - s, 0.05);
  }

  void precond(const std::vector<double>& r, std::vector<double>& z) const {
    const GridSpec& g = H->grid;
    static thread_local std::vector<Complex> buf, hat;
    buf.resize(r.size());
    hat.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) buf[i] = Complex(r[i], 0);
    dft(g.dim, g.npts, buf.data(), hat.data(), true);
    for (std::size_t i = 0; i < r.size(); ++i) hat[i] /= (ktab[i] + precshift);
    dft(g.dim, g.npts, hat.data(), buf.data(), false);
    const double inv = 1.0 / static_cast<double>(g.total());
    z.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = buf[i].real() * inv;
  }

  void solve(const std::vector<double>& b, std::vector<double>& x) const {
    const std::int64_t n = static_cast<std::int64_t>(b.size());
    x.assign(n, 0.0);
    std::vector<double> r = b, z(n), p(n), Ap(n);
    precond(r, z);
    p = z;
    double rz = ddot(r, z);
    const double bnorm = dnorm(b);
    if (bnorm == 0) return;
    for (int it = 0; it < 5000; ++it) {
      H->apply_real(p, Ap);
      for (std::int64_t i = 0; i < n; ++i) Ap[i] -= sigma * p[i];
      double pAp = ddot(p, Ap);
      if (pAp <= 0) throw NumericalError("shifted CG: operator not positive (bad shift)");
      double alpha = rz / pAp;
      for (std::int64_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
      }
      if (dnorm(r) <= 1e-12 * bnorm) return;
      precond(r, z);
      double rz_new = ddot(r, z);
      double betacg = rz_new / rz;
      rz = rz_new;
      for (std::int64_t i = 0; i < n; ++i) p[i] = z[i] + betacg * p[i];
    }
    throw NumericalError("shifted CG did not converge");
  }
};

WaveFunction to_wavefunction(const GridSpec& g, const std::vector<double>& x) {
  WaveFunction psi = WaveFunction::zero(g);
  for (std::size_t i = 0; i < x.size(); ++i) psi.v[i] = Complex(x[i], 0.0);
  return psi;
}

}  // namespace

EigenResult lowest_eigenpairs(const Hamiltonian& H, int k, const EigenOptions& opts) {
  if (k < 1 || k > 32) throw ConfigError("lowest_eigenpairs: k must be in 1..32");
  const std::int64_t dim = H.grid.total();
  const bool small = dim <= 4096;

  EigenResult res;
  res.k = k;

  auto finalize = [&](const RitzSet& rs) {
    res.energies.clear();
    res.vectors.clear();
    res.residuals.clear();
    res.converged = true;
    std::vector<double> hy;
    for (int i = 0; i < k; ++i) {
      WaveFunction y = to_wavefunction(H.grid, rs.vecs[i]);
      std::vector<double> yv = rs.vecs[i];
      double yn = dnorm(yv);
      for (auto& x : yv) x /= yn;
      H.apply_real(yv, hy);
      double E = ddot(yv, hy) * 1.0;  // basis vectors are l2-normalized
      double r2 = 0;
      for (std::size_t j = 0; j < yv.size(); ++j) {
        double d = hy[j] - E * yv[j];
        r2 += d * d;
      }
      double resid = std::sqrt(r2);  // relative to a unit vector in l2
      res.energies.push_back(E);
      for (std::size_t j = 0; j < yv.size(); ++j) y.v[j] = Complex(yv[j], 0.0);
      // normalize in the grid inner product
      y = normalize(y);
      res.vectors.push_back(std::move(y));
      res.residuals.push_back(resid);
      if (resid > opts.tol * std::max(1.0, std::abs(E))) res.converged = false;
    }
    // sort ascending by energy
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return res.energies[a] < res.energies[b]; });
    EigenResult sorted;
    sorted.k = k;
    sorted.converged = res.converged;
    for (int i : order) {
      sorted.energies.push_back(res.energies[i]);
      sorted.vectors.push_back(res.vectors[i]);
      sorted.residuals.push_back(res.residuals[i]);
    }
    sorted.degenerate.assign(k, false);
    for (int i = 0; i < k; ++i) {
      double gap_lo = i > 0 ? sorted.energies[i] - sorted.energies[i - 1] : 1e300;
      double gap_hi = i + 1 < k ? sorted.energies[i + 1] - sorted.energies[i] : 1e300;
      sorted.degenerate[i] = std::min(gap_lo, gap_hi) < opts.degeneracy_threshold;
    }
    res = std::move(sorted);
  };

  if (small) {
    ApplyFn applyH = [&H](const std::vector<double>& x, std::vector<double>& y) {
      H.apply_real(x, y);
    };
    int max_basis = opts.max_basis > 0 ? opts.max_basis : static_cast<int>(std::min<std::int64_t>(dim, 700));
    RitzSet rs = lanczos_extremal(dim, applyH, k, /*largest=*/false, max_basis,
                                  opts.max_restarts, 0.2 * opts.tol, opts.seed);
    if (static_cast<int>(rs.theta.size()) < k)
      throw NumericalError("lowest_eigenpairs: Lanczos failed to produce enough Ritz pairs");
    finalize(rs);
    return res;
  }

  // Large grids: shift-invert. Stage 1 locates the low end crudely, stage 2
  // runs Lanczos on (H - sigma)^{-1} with sigma just below E0.
  ApplyFn applyH = [&H](const std::vector<double>& x, std::vector<double>& y) {
    H.apply_real(x, y);
  };
  double vmin = *std::min_element(H.vtable.begin(), H.vtable.end());
  RitzSet crude = lanczos_extremal(dim, applyH, k, false, 120, 2, 1e-2, opts.seed);
  double e0_est = crude.theta.empty() ? vmin : crude.theta[0];

  double sigma = e0_est - 0.05 * std::max(1.0, std::abs(e0_est));
  sigma = std::min(sigma, e0_est - 0.02);
  if (sigma > vmin + 1e-9) {
    // fine; H - sigma still positive since sigma < E0 <= Rayleigh bounds
  } else {
    sigma = vmin - 0.1;
  }
  ShiftedSolver solver(H, sigma);
  ApplyFn applyInv = [&solver](const std::vector<double>& x, std::vector<double>& y) {
    solver.solve(x, y);
  };
  int max_basis = opts.max_basis > 0 ? opts.max_basis : 110;
  RitzSet rs = lanczos_extremal(dim, applyInv, k, /*largest=*/true, max_basis,
                                opts.max_restarts, 1e-10, opts.seed);
  if (static_cast<int>(rs.theta.size()) < k)
    throw NumericalError("lowest_eigenpairs: shift-invert Lanczos failed");
  finalize(rs);
  if (!res.converged) {
    // one more round with a refreshed shift from the best estimate
    double sigma2 = res.energies[0] - 0.01 * std::max(1.0, std::abs(res.energies[0]));
    ShiftedSolver solver2(H, sigma2);
    ApplyFn applyInv2 = [&solver2](const std::vector<double>& x, std::vector<double>& y) {
      solver2.solve(x, y);
    };
    RitzSet rs2 = lanczos_extremal(dim, applyInv2, k, true, max_basis, opts.max_restarts,
                                   1e-11, opts.seed + 1);
    if (static_cast<int>(rs2.theta.size()) >= k) finalize(rs2);
  }
  return res;
}

GroundState ground_state(const Potential& V, double hbar, const GridSpec& g,
                         const EigenOptions& opts) {
  Hamiltonian H = build_hamiltonian(V, hbar, g);
  EigenResult eig = lowest_eigenpairs(H, 2, opts);
  GroundState gs;
  gs.gap = eig.energies[1] - eig.energies[0];
  WaveFunction psi = eig.vectors[0];

  if (V.symmetry != SymmetryTag::None && gs.gap < opts.degeneracy_threshold) {
    GroupAction G = V.symmetry == SymmetryTag::Z2 ? GroupAction::z2() : GroupAction::so2();
    auto project = [&](const WaveFunction& w) {
      WaveFunction acc = w;
      if (V.symmetry == SymmetryTag::Z2) {
        WaveFunction r = unitary_rep(G, GroupElement::z2_flip(), w);
        for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] = 0.5 * (acc.v[i] + r.v[i]);
      } else {
        // average over the exact quarter-turn subgroup
        WaveFunction sum = w;
        WaveFunction cur = w;
        for (int r = 0; r < 3; ++r) {
          cur = unitary_rep(G, GroupElement::so2_angle(kPi / 2), cur);
          for (std::size_t i = 0; i < sum.v.size(); ++i) sum.v[i] += cur.v[i];
        }
        for (std::size_t i = 0; i < sum.v.size(); ++i) sum.v[i] *= 0.25;
        acc = sum;
      }
      return acc;
    };
    WaveFunction p0 = project(eig.vectors[0]);
    WaveFunction p1 = project(eig.vectors[1]);
    psi = norm(p0) >= norm(p1) ? p0 : p1;
    psi = normalize(psi);
    gs.symmetry_projected = true;
  }

  // global phase: grid sum real and positive
  Complex s = 0;
  for (const Complex& z : psi.v) s += z;
  if (std::abs(s) > 1e-12) {
    Complex ph = s / std::abs(s);
    for (Complex& z : psi.v) z /= ph;
  }
  gs.psi = normalize(psi);
  Hamiltonian H2 = H;
  WaveFunction hpsi = H2.apply(gs.psi);
  gs.energy = inner_product(gs.psi, hpsi).real();
  return gs;
}

SemigroupResult semigroup_apply(const EigenResult& eig, double t, const WaveFunction& psi) {
  if (!(t > 0)) throw ConfigError("semigroup_apply: t must be positive");
  const int k = eig.k;
  SemigroupResult out;
  out.psi = WaveFunction::zero(psi.grid);
  for (int j = 0; j < k - 1; ++j) {
    Complex c = inner_product(eig.vectors[j], psi) * std::exp(-t * eig.energies[j]);
    for (std::size_t i = 0; i < out.psi.v.size(); ++i) out.psi.v[i] += c * eig.vectors[j].v[i];
  }
  out.truncation_bound = std::exp(-t * eig.energies[k - 1]) * norm(psi);
  return out;
}

SemigroupResult semigroup_apply(const Hamiltonian& H, double t, const WaveFunction& psi,
                                int k_modes, const EigenOptions& opts) {
  EigenResult eig = lowest_eigenpairs(H, k_modes + 1, opts);
  return semigroup_apply(eig, t, psi);
}

}  // namespace semiclassica

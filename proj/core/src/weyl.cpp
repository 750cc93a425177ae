#include "semiclassica/weyl.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "semiclassica/fft.hpp"
#include "semiclassica/parallel.hpp"

namespace semiclassica {

namespace {

inline int wrap(int j, int N) {
  j %= N;
  return j < 0 ? j + N : j;
}

inline int signed_index(int k, int N) { return k < N / 2 ? k : k - N; }

// Samples a q-side factor on an arbitrary position lattice.
std::vector<Complex> sample_q(const Symbol& f, const GridSpec& g) {
  std::vector<Complex> t(g.total());
  auto eval = [&](const double* q) -> Complex {
    if (f.q_factor) return f.q_factor(q);
    PhasePoint s;
    s.dim = f.dim;
    for (int a = 0; a < f.dim; ++a) s.q[a] = q[a];
    return f.eval(s);
  };
  if (g.dim == 1) {
    for (int j = 0; j < g.npts; ++j) {
      double q[1] = {g.node(j)};
      t[j] = eval(q);
    }
  } else {
    for (int j0 = 0; j0 < g.npts; ++j0)
      for (int j1 = 0; j1 < g.npts; ++j1) {
        double q[2] = {g.node(j0), g.node(j1)};
        t[flat_index(g, j0, j1)] = eval(q);
      }
  }
  return t;
}

// Samples a p-side factor on the momentum lattice in FFTW k order,
// p_k = hbar * pi * signed(k) / L.
std::vector<Complex> sample_p(const Symbol& f, double hbar, const GridSpec& g) {
  const int N = g.npts;
  const double L = g.half_width();
  std::vector<Complex> t(g.total());
  auto eval = [&](const double* p) -> Complex {
    if (f.p_factor) return f.p_factor(p);
    PhasePoint s;
    s.dim = f.dim;
    for (int a = 0; a < f.dim; ++a) s.p[a] = p[a];
    return f.eval(s);
  };
  auto pk = [&](int k) { return hbar * kPi * signed_index(k, N) / L; };
  if (g.dim == 1) {
    for (int k = 0; k < N; ++k) {
      double p[1] = {pk(k)};
      t[k] = eval(p);
    }
  } else {
    for (int k0 = 0; k0 < N; ++k0)
      for (int k1 = 0; k1 < N; ++k1) {
        double p[2] = {pk(k0), pk(k1)};
        t[static_cast<std::int64_t>(k0) * N + k1] = eval(p);
      }
  }
  return t;
}

bool table_is_real(const std::vector<Complex>& t) {
  for (const Complex& z : t)
    if (z.imag() != 0.0) return false;
  return true;
}

// In-place periodic Gaussian smoothing of a sampled table: multiply the
// spectrum by exp(-variance k^2 / 2) per axis (domain length = npts*spacing).
void gaussian_smooth_table(int dim, int npts, double spacing, double variance,
                           std::vector<Complex>& t) {
  const double length = npts * spacing;
  std::vector<Complex> hat = dft(dim, npts, t, true);
  auto mult = [&](int k) {
    double kk = 2 * kPi * signed_index(k, npts) / length;
    return std::exp(-0.5 * variance * kk * kk);
  };
  if (dim == 1) {
    for (int k = 0; k < npts; ++k) hat[k] *= mult(k);
  } else {
    for (int k0 = 0; k0 < npts; ++k0)
      for (int k1 = 0; k1 < npts; ++k1)
        hat[static_cast<std::int64_t>(k0) * npts + k1] *= mult(k0) * mult(k1);
  }
  t = dft(dim, npts, hat, false);
  const double inv = 1.0 / std::pow(static_cast<double>(npts), dim);
  for (Complex& z : t) z *= inv;
}

GridSpec half_lattice(const GridSpec& g) {
  GridSpec h;
  h.dim = g.dim;
  h.npts = 2 * g.npts;
  h.spacing = 0.5 * g.spacing;
  return h;
}

// Builds the separable-kind operator from already sampled (and possibly
// mollified) tables: f1 on the half lattice, f2 on the momentum lattice.
WeylOperator make_separable(std::vector<Complex> f1h, const std::vector<Complex>& f2table,
                            double hbar, const GridSpec& g) {
  WeylOperator W;
  W.kind = WeylOperator::Kind::Separable;
  W.hbar = hbar;
  W.grid = g;
  W.f1_half = std::move(f1h);
  const int N = g.npts;

  // c_m = N^-n * sum_k f2(p_k) e^{2 pi i k m / N}; window from |c| decay.
  std::vector<Complex> c = dft(g.dim, N, f2table, false);
  const double inv = 1.0 / std::pow(static_cast<double>(N), g.dim);
  for (Complex& z : c) z *= inv;
  double cmax = 0;
  for (const Complex& z : c) cmax = std::max(cmax, std::abs(z));
  if (cmax == 0) cmax = 1;
  auto cabs = [&](int m0, int m1) {
    return std::abs(c[g.dim == 1 ? wrap(m0, N)
                                 : static_cast<std::int64_t>(wrap(m0, N)) * N + wrap(m1, N)]);
  };
  int W_needed = 0;
  if (g.dim == 1) {
    for (int m = 0; m < N; ++m)
      if (std::abs(c[m]) > 1e-15 * cmax) W_needed = std::max(W_needed, std::abs(signed_index(m, N)));
  } else {
    for (int m0 = 0; m0 < N; ++m0)
      for (int m1 = 0; m1 < N; ++m1)
        if (std::abs(c[static_cast<std::int64_t>(m0) * N + m1]) > 1e-15 * cmax)
          W_needed = std::max({W_needed, std::abs(signed_index(m0, N)),
                               std::abs(signed_index(m1, N))});
  }
  if (W_needed >= N / 2 && (g.dim == 1 ? cabs(N / 2, 0) : cabs(N / 2, N / 2)) > 1e-12 * cmax)
    throw NumericalError("weyl_separable: momentum lattice too coarse for the symbol's b-support");
  W.window = std::min(W_needed, N / 2 - 1);

  // pack c_{-m} over the window, row-major in (m0 [, m1])
  const int w = W.window;
  const int side = 2 * w + 1;
  if (g.dim == 1) {
    W.cneg.resize(side);
    for (int m = -w; m <= w; ++m) W.cneg[m + w] = c[wrap(-m, N)];
  } else {
    W.cneg.resize(static_cast<std::size_t>(side) * side);
    for (int m0 = -w; m0 <= w; ++m0)
      for (int m1 = -w; m1 <= w; ++m1)
        W.cneg[static_cast<std::size_t>(m0 + w) * side + (m1 + w)] =
            c[static_cast<std::int64_t>(wrap(-m0, N)) * N + wrap(-m1, N)];
  }
  W.is_real = table_is_real(W.f1_half) && table_is_real(f2table);
  return W;
}

}  // namespace

WaveFunction WeylOperator::apply(const WaveFunction& psi) const {
  const GridSpec& g = psi.grid;
  const int N = g.npts;
  if (kind == Kind::PositionMultiplier) {
    WaveFunction out = psi;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= position_table[i];
    return out;
  }
  if (kind == Kind::MomentumMultiplier) {
    std::vector<Complex> hat = dft(g.dim, N, psi.v, true);
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= momentum_table[i];
    WaveFunction out;
    out.grid = g;
    out.v = dft(g.dim, N, hat, false);
    const double inv = 1.0 / static_cast<double>(g.total());
    for (Complex& z : out.v) z *= inv;
    return out;
  }
  // separable midpoint form
  WaveFunction out = WaveFunction::zero(g);
  const int w = window;
  const int side = 2 * w + 1;
  const int H = 2 * N;
  if (g.dim == 1) {
    for (int j = 0; j < N; ++j) {
      Complex acc = 0;
      for (int m = -w; m <= w; ++m)
        acc += cneg[m + w] * f1_half[wrap(2 * j + m, H)] * psi.v[wrap(j + m, N)];
      out.v[j] = acc;
    }
  } else {
    parallel_blocks(N, 8, [&](std::size_t, std::int64_t r0, std::int64_t r1) {
      for (int j0 = static_cast<int>(r0); j0 < r1; ++j0) {
        for (int j1 = 0; j1 < N; ++j1) {
          Complex acc = 0;
          for (int m0 = -w; m0 <= w; ++m0) {
            const std::int64_t hrow = static_cast<std::int64_t>(wrap(2 * j0 + m0, H)) * H;
            const std::int64_t prow = static_cast<std::int64_t>(wrap(j0 + m0, N)) * N;
            const std::size_t crow = static_cast<std::size_t>(m0 + w) * side;
            for (int m1 = -w; m1 <= w; ++m1)
              acc += cneg[crow + (m1 + w)] * f1_half[hrow + wrap(2 * j1 + m1, H)] *
                     psi.v[prow + wrap(j1 + m1, N)];
          }
          out.v[static_cast<std::int64_t>(j0) * N + j1] = acc;
        }
      }
    });
  }
  return out;
}

WaveFunction WeylOperator::apply_adjoint(const WaveFunction& psi) const {
  if (is_real) return apply(psi);
  WeylOperator conj_op = *this;
  for (Complex& z : conj_op.position_table) z = std::conj(z);
  for (Complex& z : conj_op.momentum_table) z = std::conj(z);
  for (Complex& z : conj_op.f1_half) z = std::conj(z);
  if (kind == Kind::Separable) {
    // adjoint momentum factor: c'_{-m} = conj(c_{m}), i.e. reverse + conj
    const int side = 2 * window + 1;
    if (grid.dim == 1) {
      for (int i = 0; i < side; ++i) conj_op.cneg[i] = std::conj(cneg[side - 1 - i]);
    } else {
      for (int a = 0; a < side; ++a)
        for (int b = 0; b < side; ++b)
          conj_op.cneg[static_cast<std::size_t>(a) * side + b] =
              std::conj(cneg[static_cast<std::size_t>(side - 1 - a) * side + (side - 1 - b)]);
    }
  }
  return conj_op.apply(psi);
}

LinOp WeylOperator::as_linop() const {
  LinOp op;
  op.grid = grid;
  WeylOperator self = *this;
  op.apply = [self](const WaveFunction& x) { return self.apply(x); };
  if (!is_real)
    op.apply_adjoint = [self](const WaveFunction& x) { return self.apply_adjoint(x); };
  return op;
}

WeylOperator weyl_position(const Symbol& f, const GridSpec& g) {
  WeylOperator W;
  W.kind = WeylOperator::Kind::PositionMultiplier;
  W.grid = g;
  W.position_table = sample_q(f, g);
  W.is_real = table_is_real(W.position_table);
  return W;
}

WeylOperator weyl_momentum(const Symbol& f, double hbar, const GridSpec& g) {
  WeylOperator W;
  W.kind = WeylOperator::Kind::MomentumMultiplier;
  W.hbar = hbar;
  W.grid = g;
  W.momentum_table = sample_p(f, hbar, g);
  W.is_real = table_is_real(W.momentum_table);
  return W;
}

WeylOperator weyl_separable(const std::optional<Symbol>& f1, const std::optional<Symbol>& f2,
                            double hbar, const GridSpec& g) {
  if (!f1 && !f2) throw ConfigError("weyl_separable: need at least one factor");
  if (!f2) return weyl_position(*f1, g);
  if (!f1) return weyl_momentum(*f2, hbar, g);
  GridSpec h = half_lattice(g);
  return make_separable(sample_q(*f1, h), sample_p(*f2, hbar, g), hbar, g);
}

WeylOperator berezin_separable(const std::optional<Symbol>& f1, const std::optional<Symbol>& f2,
                               double hbar, const GridSpec& g) {
  if (!f1 && !f2) throw ConfigError("berezin_separable: need at least one factor");
  const double variance = 0.5 * hbar;  // e^{hbar Delta/4} per axis
  std::vector<Complex> e1, e2;
  if (f1) {
    GridSpec h = half_lattice(g);
    e1 = sample_q(*f1, h);
    gaussian_smooth_table(g.dim, h.npts, h.spacing, variance, e1);
  }
  if (f2) {
    e2 = sample_p(*f2, hbar, g);
    const double dp = kPi * hbar / g.half_width();
    gaussian_smooth_table(g.dim, g.npts, dp, variance, e2);
  }
  if (!f2) {
    WeylOperator W;
    W.kind = WeylOperator::Kind::PositionMultiplier;
    W.hbar = hbar;
    W.grid = g;
    // restrict the half-lattice table to grid points (even indices)
    W.position_table.resize(g.total());
    const int N = g.npts, H = 2 * N;
    if (g.dim == 1) {
      for (int j = 0; j < N; ++j) W.position_table[j] = e1[2 * j];
    } else {
      for (int j0 = 0; j0 < N; ++j0)
        for (int j1 = 0; j1 < N; ++j1)
          W.position_table[flat_index(g, j0, j1)] =
              e1[static_cast<std::int64_t>(2 * j0) * H + 2 * j1];
    }
    W.is_real = table_is_real(W.position_table);
    return W;
  }
  if (!f1) {
    WeylOperator W;
    W.kind = WeylOperator::Kind::MomentumMultiplier;
    W.hbar = hbar;
    W.grid = g;
    W.momentum_table = std::move(e2);
    W.is_real = table_is_real(W.momentum_table);
    return W;
  }
  return make_separable(std::move(e1), e2, hbar, g);
}

// --- Gauss-Hermite and heat smoothing --------------------------------------

void gauss_hermite(int npts, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(npts);
  Eigen::VectorXd sub(npts - 1);
  for (int k = 1; k < npts; ++k) sub[k - 1] = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  nodes.resize(npts);
  weights.resize(npts);
  const double sqrt_pi = std::sqrt(kPi);
  for (int i = 0; i < npts; ++i) {
    nodes[i] = es.eigenvalues()[i];
    double v0 = es.eigenvectors()(0, i);
    weights[i] = sqrt_pi * v0 * v0;
  }
}

Symbol heat_smooth(const Symbol& f, double hbar, const PhaseGrid& pg) {
  if (f.dim != pg.dim) throw ConfigError("heat_smooth: dimension mismatch");
  const double variance = 0.5 * hbar;
  const double s = std::sqrt(variance);

  // Sample on the phase window to validate decay before smoothing.
  const std::int64_t M = pg.total();
  std::vector<Complex> table(M);
  double fmax = 0;
  for (std::int64_t m = 0; m < M; ++m) {
    table[m] = f.eval(pg.node(m));
    fmax = std::max(fmax, std::abs(table[m]));
  }
  // boundary-tail check on every axis face
  const int naxes = 2 * pg.dim;
  std::vector<std::int64_t> stride(naxes, 1);
  for (int a = naxes - 2; a >= 0; --a) stride[a] = stride[a + 1] * pg.axes[a + 1].count;
  for (int a = 0; a < naxes; ++a) {
    double face_max = 0;
    for (std::int64_t m = 0; m < M; ++m) {
      std::int64_t idx = (m / stride[a]) % pg.axes[a].count;
      if (idx == 0 || idx == pg.axes[a].count - 1) face_max = std::max(face_max, std::abs(table[m]));
    }
    if (face_max > 1e-8 * std::max(fmax, 1e-300))
      throw NumericalError("heat_smooth: phase window too small (boundary tail mass)");
  }
  // evaluator: tensor Gauss-Hermite quadrature around the query point
  // (pointwise-accurate version of the windowed separable convolution)
  std::vector<double> gh_x, gh_w;
  gauss_hermite(40, gh_x, gh_w);
  Symbol out;
  out.dim = f.dim;
  out.decay = f.decay;
  const Symbol base = f;
  const int n = f.dim;
  out.eval = [base, gh_x, gh_w, s, n](const PhasePoint& sig) -> Complex {
    const double scale = std::sqrt(2.0) * s;
    const double norm = std::pow(kPi, -n);  // (1/sqrt(pi))^{2n}
    const int G = static_cast<int>(gh_x.size());
    Complex acc = 0;
    PhasePoint t = sig;
    if (n == 1) {
      for (int i = 0; i < G; ++i) {
        t.q[0] = sig.q[0] - scale * gh_x[i];
        Complex inner = 0;
        for (int j = 0; j < G; ++j) {
          t.p[0] = sig.p[0] - scale * gh_x[j];
          inner += gh_w[j] * base.eval(t);
        }
        acc += gh_w[i] * inner;
      }
      return acc * norm;
    }
    for (int i0 = 0; i0 < G; ++i0) {
      t.q[0] = sig.q[0] - scale * gh_x[i0];
      for (int i1 = 0; i1 < G; ++i1) {
        t.q[1] = sig.q[1] - scale * gh_x[i1];
        for (int j0 = 0; j0 < G; ++j0) {
          t.p[0] = sig.p[0] - scale * gh_x[j0];
          Complex inner = 0;
          for (int j1 = 0; j1 < G; ++j1) {
            t.p[1] = sig.p[1] - scale * gh_x[j1];
            inner += gh_w[j1] * base.eval(t);
          }
          acc += gh_w[i0] * gh_w[i1] * gh_w[j0] * inner;
        }
      }
    }
    return acc * norm;
  };
  // smoothing preserves separability; mollify the factors with 1d quadrature
  if (base.q_factor) {
    auto qf = base.q_factor;
    out.q_factor = [qf, gh_x, gh_w, s, n](const double* q) -> Complex {
      const double scale = std::sqrt(2.0) * s;
      const double norm = std::pow(kPi, -0.5 * n);
      const int G = static_cast<int>(gh_x.size());
      double t[2] = {q[0], n == 2 ? q[1] : 0.0};
      Complex acc = 0;
      if (n == 1) {
        for (int i = 0; i < G; ++i) {
          t[0] = q[0] - scale * gh_x[i];
          acc += gh_w[i] * qf(t);
        }
      } else {
        for (int i = 0; i < G; ++i) {
          t[0] = q[0] - scale * gh_x[i];
          for (int j = 0; j < G; ++j) {
            t[1] = q[1] - scale * gh_x[j];
            acc += gh_w[i] * gh_w[j] * qf(t);
          }
        }
      }
      return acc * norm;
    };
  }
  if (base.p_factor) {
    auto pf = base.p_factor;
    out.p_factor = [pf, gh_x, gh_w, s, n](const double* p) -> Complex {
      const double scale = std::sqrt(2.0) * s;
      const double norm = std::pow(kPi, -0.5 * n);
      const int G = static_cast<int>(gh_x.size());
      double t[2] = {p[0], n == 2 ? p[1] : 0.0};
      Complex acc = 0;
      if (n == 1) {
        for (int i = 0; i < G; ++i) {
          t[0] = p[0] - scale * gh_x[i];
          acc += gh_w[i] * pf(t);
        }
      } else {
        for (int i = 0; i < G; ++i) {
          t[0] = p[0] - scale * gh_x[i];
          for (int j = 0; j < G; ++j) {
            t[1] = p[1] - scale * gh_x[j];
            acc += gh_w[i] * gh_w[j] * pf(t);
          }
        }
      }
      return acc * norm;
    };
  }
  out.support_radius = f.support_radius ? std::optional<double>(*f.support_radius + 8 * s)
                                        : std::nullopt;
  out.support_center = f.support_center;
  return out;
}

}  // namespace semiclassica

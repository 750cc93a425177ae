#include "semiclassica/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "semiclassica/fft.hpp"

namespace semiclassica {

GridSpec GridSpec::position(int dim, double L, int npts) {
  if (dim != 1 && dim != 2) throw ConfigError("GridSpec: n must be 1 or 2");
  if (npts < 64 || (npts & (npts - 1)) != 0)
    throw ConfigError("GridSpec: N must be a power of two >= 64");
  if (!(L > 0)) throw ConfigError("GridSpec: L must be positive");
  GridSpec g;
  g.dim = dim;
  g.npts = npts;
  g.spacing = 2.0 * L / npts;
  return g;
}

void GridSpec::check_resolves(double hbar_min) const {
  if (spacing > 0.35 * std::sqrt(hbar_min))
    throw NumericalError("grid spacing " + std::to_string(spacing) +
                         " does not resolve sqrt(hbar) = " + std::to_string(std::sqrt(hbar_min)) +
                         " (need dx <= 0.35 sqrt(hbar))");
}

Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid == b.grid)) throw ConfigError("inner_product: grid mismatch");
  Complex acc = 0;
  const std::int64_t n = a.size();
  for (std::int64_t i = 0; i < n; ++i) acc += std::conj(a.v[i]) * b.v[i];
  return acc * a.grid.cell_volume();
}

double norm(const WaveFunction& a) {
  double acc = 0;
  for (const Complex& z : a.v) acc += std::norm(z);
  return std::sqrt(acc * a.grid.cell_volume());
}

WaveFunction normalize(const WaveFunction& a) {
  double n = norm(a);
  if (n <= 1e-14) throw NumericalError("normalize: vector norm below 1e-14");
  WaveFunction out = a;
  for (Complex& z : out.v) z /= n;
  return out;
}

namespace {

// Applies the alternating phase (-1)^(k0+k1+...) that converts a plain DFT
// over j to the hbar-scaled transform sampled at x_j = -L + j dx; identical
// factor works on both sides because the grids are symmetric.
void apply_alternating_sign(const GridSpec& g, std::vector<Complex>& v) {
  const int N = g.npts;
  if (g.dim == 1) {
    for (int k = 1; k < N; k += 2) v[k] = -v[k];
  } else {
    for (int k0 = 0; k0 < N; ++k0)
      for (int k1 = (k0 % 2 == 0) ? 1 : 0; k1 < N; k1 += 2)
        v[static_cast<std::int64_t>(k0) * N + k1] = -v[static_cast<std::int64_t>(k0) * N + k1];
  }
}

// fftshift: reorders FFTW k-order (0..N-1 with wraparound) into ascending
// signed order -N/2..N/2-1, or back (the shift is its own inverse for even N).
void fftshift(const GridSpec& g, std::vector<Complex>& v) {
  const int N = g.npts;
  const int h = N / 2;
  if (g.dim == 1) {
    for (int k = 0; k < h; ++k) std::swap(v[k], v[k + h]);
  } else {
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < h; ++b) {
        int a2 = (a + h) % N;
        std::swap(v[static_cast<std::int64_t>(a) * N + b],
                  v[static_cast<std::int64_t>(a2) * N + b + h]);
      }
  }
}

}  // namespace

WaveFunction fourier_hbar(const WaveFunction& psi, double hbar, FourierDirection dir) {
  if (!(hbar > 0)) throw ConfigError("fourier_hbar: hbar must be positive");
  const GridSpec& g = psi.grid;
  const int N = g.npts;

  if (dir == FourierDirection::Forward) {
    const double L = g.half_width();
    GridSpec mg;
    mg.dim = g.dim;
    mg.npts = N;
    mg.spacing = kPi * hbar / L;
    WaveFunction out;
    out.grid = mg;
    out.v = dft(g.dim, N, psi.v, true);
    apply_alternating_sign(g, out.v);
    const double scale = std::pow(g.spacing / std::sqrt(2 * kPi * hbar), g.dim);
    for (Complex& z : out.v) z *= scale;
    fftshift(mg, out.v);  // ascending p order
    // the alternating sign indexed by FFTW k equals (-1)^k for signed k too
    return out;
  }

  // inverse: input lives on the momentum lattice; reconstruct the position grid
  const double dp = g.spacing;
  GridSpec pg;
  pg.dim = g.dim;
  pg.npts = N;
  pg.spacing = 2 * kPi * hbar / (N * dp);
  WaveFunction out;
  out.grid = pg;
  std::vector<Complex> tmp = psi.v;
  fftshift(g, tmp);  // back to FFTW k order
  apply_alternating_sign(g, tmp);
  out.v = dft(g.dim, N, tmp, false);
  const double scale = std::pow(dp / std::sqrt(2 * kPi * hbar), g.dim);
  for (Complex& z : out.v) z *= scale;
  return out;
}

WaveFunction laplacian_apply(const WaveFunction& psi) {
  const GridSpec& g = psi.grid;
  const int N = g.npts;
  const double L = g.half_width();
  std::vector<Complex> hat = dft(g.dim, N, psi.v, true);
  auto k_signed = [N](int k) { return k < N / 2 ? k : k - N; };
  if (g.dim == 1) {
    for (int k = 0; k < N; ++k) {
      double kk = kPi * k_signed(k) / L;
      hat[k] *= -kk * kk;
    }
  } else {
    for (int k0 = 0; k0 < N; ++k0) {
      double w0 = kPi * k_signed(k0) / L;
      for (int k1 = 0; k1 < N; ++k1) {
        double w1 = kPi * k_signed(k1) / L;
        hat[static_cast<std::int64_t>(k0) * N + k1] *= -(w0 * w0 + w1 * w1);
      }
    }
  }
  WaveFunction out;
  out.grid = g;
  out.v = dft(g.dim, N, hat, false);
  const double inv = 1.0 / static_cast<double>(g.total());
  for (Complex& z : out.v) z *= inv;
  return out;
}

WaveFunction multiply_table(const WaveFunction& psi, const std::vector<double>& table) {
  WaveFunction out = psi;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= table[i];
  return out;
}

void dump_wavefunction_csv(const WaveFunction& psi, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  char buf[128];
  if (psi.grid.dim == 1) {
    f << "x,re,im\n";
    for (int j = 0; j < psi.grid.npts; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", psi.grid.node(j), psi.v[j].real(),
                    psi.v[j].imag());
      f << buf;
    }
  } else {
    f << "x1,x2,re,im\n";
    for (int j0 = 0; j0 < psi.grid.npts; ++j0)
      for (int j1 = 0; j1 < psi.grid.npts; ++j1) {
        const Complex& z = psi.v[flat_index(psi.grid, j0, j1)];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", psi.grid.node(j0),
                      psi.grid.node(j1), z.real(), z.imag());
        f << buf;
      }
  }
}

void dump_wavefunction_binary(const WaveFunction& psi, double hbar, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path);
  double header[8] = {static_cast<double>(psi.grid.dim), static_cast<double>(psi.grid.npts),
                      psi.grid.half_width(), hbar, psi.grid.spacing, 0, 0, 0};
  f.write(reinterpret_cast<const char*>(header), sizeof header);
  f.write(reinterpret_cast<const char*>(psi.v.data()),
          static_cast<std::streamsize>(psi.v.size() * sizeof(Complex)));
}

}  // namespace semiclassica

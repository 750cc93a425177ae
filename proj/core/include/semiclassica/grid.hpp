#pragma once

#include <string>
#include <vector>

#include "semiclassica/types.hpp"

namespace semiclassica {

// Uniform periodic grid on [-half_width, half_width)^dim with npts points
// per axis, node x_j = -half_width + j*spacing. Also used for momentum
// lattices (then spacing = pi*hbar/L and nodes are the ascending p_k).
struct GridSpec {
  int dim = 1;
  int npts = 0;
  double spacing = 0.0;

  double half_width() const { return 0.5 * npts * spacing; }
  double node(int j) const { return -half_width() + j * spacing; }
  std::int64_t total() const {
    std::int64_t t = 1;
    for (int a = 0; a < dim; ++a) t *= npts;
    return t;
  }
  double cell_volume() const {
    double v = 1;
    for (int a = 0; a < dim; ++a) v *= spacing;
    return v;
  }
  bool operator==(const GridSpec& o) const {
    return dim == o.dim && npts == o.npts && spacing == o.spacing;
  }

  // Position grid with half-width L; requires npts >= 64 and a power of two.
  static GridSpec position(int dim, double L, int npts);
  // Validates spacing <= 0.35*sqrt(hbar_min) (coherent-state resolution).
  void check_resolves(double hbar_min) const;
};

struct WaveFunction {
  GridSpec grid;
  std::vector<Complex> v;

  std::int64_t size() const { return grid.total(); }
  static WaveFunction zero(const GridSpec& g) { return {g, std::vector<Complex>(g.total())}; }
};

// Flat index helpers (axis 0 slowest, FFTW row-major order).
inline std::int64_t flat_index(const GridSpec& g, int j0, int j1 = 0) {
  return g.dim == 1 ? j0 : static_cast<std::int64_t>(j0) * g.npts + j1;
}

Complex inner_product(const WaveFunction& a, const WaveFunction& b);  // conj-linear in a
double norm(const WaveFunction& a);
WaveFunction normalize(const WaveFunction& a);

enum class FourierDirection { Forward, Inverse };

// hbar-scaled Fourier-Plancherel transform, kernel e^{-ip.x/hbar}/(2 pi hbar)^{n/2}.
// Forward maps a position-grid function to the ascending momentum lattice
// p_k = hbar * pi * k / L (unitary, exactly invertible on the grid).
WaveFunction fourier_hbar(const WaveFunction& psi, double hbar, FourierDirection dir);

// Spectral Laplacian (hbar-independent wavenumbers 2*pi*k/(2L)).
WaveFunction laplacian_apply(const WaveFunction& psi);

// Pointwise multiplication by a sampled real table (utility for potentials).
WaveFunction multiply_table(const WaveFunction& psi, const std::vector<double>& table);

// CSV dump: columns x-coordinates..., re, im (17 significant digits).
void dump_wavefunction_csv(const WaveFunction& psi, const std::string& path);
// Binary dump: 8-double header (n, N, L, hbar, spacing, 0,0,0), then re/im pairs.
void dump_wavefunction_binary(const WaveFunction& psi, double hbar, const std::string& path);

}  // namespace semiclassica

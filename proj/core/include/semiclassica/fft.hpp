#pragma once

#include <vector>

#include "semiclassica/types.hpp"

namespace semiclassica {

// Thin wrapper around FFTW complex transforms, n in {1,2} axes of equal
// length. Unnormalized: backward(forward(x)) == N^dim * x. Plans are cached
// and guarded by a mutex; execution on caller-owned buffers is thread safe.
void dft(int dim, int npts, const Complex* in, Complex* out, bool forward);

inline std::vector<Complex> dft(int dim, int npts, const std::vector<Complex>& in, bool forward) {
  std::vector<Complex> out(in.size());
  dft(dim, npts, in.data(), out.data(), forward);
  return out;
}

}  // namespace semiclassica

#include "semiclassica/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace semiclassica {

namespace {

std::mutex g_plan_mutex;

fftw_plan get_plan(int dim, int npts, bool forward) {
  static std::map<std::tuple<int, int, bool>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_tuple(dim, npts, forward);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  // Plan once on a scratch buffer; FFTW_UNALIGNED lets us execute the same
  // plan on arbitrary caller arrays via fftw_execute_dft.
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(npts);
  fftw_complex* scratch = fftw_alloc_complex(total);
  int sign = forward ? FFTW_FORWARD : FFTW_BACKWARD;
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan p = dim == 1 ? fftw_plan_dft_1d(npts, scratch, scratch, sign, flags)
                         : fftw_plan_dft_2d(npts, npts, scratch, scratch, sign, flags);
  fftw_free(scratch);
  cache.emplace(key, p);
  return p;
}

}  // namespace

void dft(int dim, int npts, const Complex* in, Complex* out, bool forward) {
  fftw_plan p = get_plan(dim, npts, forward);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace semiclassica

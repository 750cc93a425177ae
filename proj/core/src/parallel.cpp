#include "semiclassica/parallel.hpp"

#include <atomic>
#include <thread>

namespace semiclassica {

namespace {
int g_workers = 0;
}

int worker_count() {
  if (g_workers > 0) return g_workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_count(int n) { g_workers = n < 1 ? 1 : n; }

std::int64_t block_count(std::int64_t n, std::int64_t block_size) {
  return (n + block_size - 1) / block_size;
}

void parallel_blocks(std::int64_t n, std::int64_t block_size,
                     const std::function<void(std::size_t, std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  const std::int64_t nblocks = block_count(n, block_size);
  const int nworkers = static_cast<int>(std::min<std::int64_t>(worker_count(), nblocks));
  if (nworkers <= 1) {
    for (std::int64_t b = 0; b < nblocks; ++b)
      fn(static_cast<std::size_t>(b), b * block_size, std::min(n, (b + 1) * block_size));
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto work = [&]() {
    for (;;) {
      std::int64_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      fn(static_cast<std::size_t>(b), b * block_size, std::min(n, (b + 1) * block_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nworkers - 1);
  for (int i = 1; i < nworkers; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

namespace {
template <class T>
T tree_sum_impl(std::vector<T>& parts) {
  if (parts.empty()) return T{};
  std::size_t n = parts.size();
  while (n > 1) {
    std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i + half < n; ++i) parts[i] += parts[i + half];
    n = half;
  }
  return parts[0];
}
}  // namespace

std::complex<double> tree_sum(std::vector<std::complex<double>>& parts) {
  return tree_sum_impl(parts);
}
double tree_sum(std::vector<double>& parts) { return tree_sum_impl(parts); }

}  // namespace semiclassica

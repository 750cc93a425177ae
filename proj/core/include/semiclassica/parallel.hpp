#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace semiclassica {

// Number of worker threads used by parallel_blocks. Defaults to the
// hardware concurrency; the CLI overrides it with --workers.
int worker_count();
void set_worker_count(int n);

// Splits [0, n) into fixed-size blocks (independent of the worker count)
// and runs fn(block_index, begin, end) on the pool. Block boundaries only
// depend on n, so any per-block partial results are reproducible.
void parallel_blocks(std::int64_t n, std::int64_t block_size,
                     const std::function<void(std::size_t, std::int64_t, std::int64_t)>& fn);

std::int64_t block_count(std::int64_t n, std::int64_t block_size);

// Pairwise tree sum in a fixed order; used to combine per-block partials
// so reductions do not depend on thread scheduling.
std::complex<double> tree_sum(std::vector<std::complex<double>>& parts);
double tree_sum(std::vector<double>& parts);

}  // namespace semiclassica

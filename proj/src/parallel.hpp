#pragma once

#include <cstddef>
#include <functional>

namespace temcodec {

// Worker count: min(hardware, TEMCODEC_THREADS) with a floor of 1.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Results must be written to per-index slots;
// indices are distributed over workers, so ordering across calls is not
// defined. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace temcodec

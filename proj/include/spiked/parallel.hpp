#pragma once

#include <cstddef>
#include <functional>

namespace spiked {

// Worker count: hardware concurrency, capped by SPIKED_EIGVEC_THREADS if set.
unsigned worker_count();

// Runs body(i) for i in [0, count) on up to `workers` threads (0 = worker_count()).
// Each index is processed exactly once; callers write results by index, so the
// outcome never depends on the number of workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

}  // namespace spiked

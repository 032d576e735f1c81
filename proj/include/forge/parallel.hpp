#pragma once

#include <cstddef>
#include <functional>

namespace forge {

// Worker count used by parallel_for: FORGE_THREADS if set, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n) on worker_count() threads. Indices are handed
// out in increasing order; callers store per-index results and merge them in
// index order, so output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace forge

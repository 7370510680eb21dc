#pragma once

#include <cstddef>
#include <functional>

namespace mpelab::numerics {

// Worker count from MPE_LAB_THREADS, defaulting to 1.
int worker_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Results must not depend on the
// chunking; callers key all randomness on the item index.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body, int workers = 0);

} // namespace mpelab::numerics

#pragma once

#include <cstddef>
#include <functional>

namespace ym {

// Worker count for engine loops: YM_THREADS when set (1..256), else the
// hardware concurrency.
unsigned engine_threads();

// Runs body(begin, end) over contiguous chunks of [0, n). Results must be
// written per index; callers never accumulate across chunks, so output does
// not depend on the number of workers. After all workers finish, the exception
// of the lowest failing chunk is rethrown.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 4096);

}  // namespace ym

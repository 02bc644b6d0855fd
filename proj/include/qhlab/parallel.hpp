#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace qhlab {

// Thread count from --threads, else QHLAB_THREADS, else hardware concurrency.
unsigned resolve_threads(std::optional<unsigned> requested);

// Calls body(begin, end, worker) on contiguous static chunks of [0, n).
// Chunk boundaries depend on n and threads only; callers that write results
// by index and reduce afterwards get thread-count-independent output.
// The first exception (lowest chunk) is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t, unsigned)>& body);

}  // namespace qhlab

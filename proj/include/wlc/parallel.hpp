#pragma once

#include <cstddef>
#include <functional>

namespace wlc {

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Units must write disjoint outputs; the lowest-index
// exception, if any, is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned resolve_threads(unsigned requested);

} // namespace wlc

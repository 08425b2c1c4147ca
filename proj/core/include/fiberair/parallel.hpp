#pragma once

#include <cstddef>
#include <functional>

namespace fiberair {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must
/// write to disjoint outputs; the first exception thrown is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Hardware concurrency, at least 1.
unsigned default_threads();

}  // namespace fiberair

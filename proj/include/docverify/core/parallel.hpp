#pragma once

#include <cstddef>
#include <functional>

namespace docverify {

// Calls fn(0..n-1) on at most `workers` threads. The first exception thrown
// by any call is rethrown after all workers have stopped; indices not yet
// started are skipped once a call has failed.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace docverify

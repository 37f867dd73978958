#pragma once

#include <cstddef>
#include <functional>

namespace ivuq {

/// Runs `fn(i)` for i in [0, n) on up to `workers` threads. Work items are
/// handed out in index order; callers must make each item self-contained
/// (own RNG, own output slot) so the result is independent of `workers`.
/// The first exception thrown by any item is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace ivuq

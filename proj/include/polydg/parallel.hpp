#pragma once

#include <functional>

namespace polydg {

/// Number of worker threads: POLYDG_NUM_THREADS if set, else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) on worker threads; each index is visited once.
/// The first exception thrown by any call is rethrown after all workers join.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace polydg

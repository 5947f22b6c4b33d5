#pragma once

#include <functional>

namespace iid::parallel {

/// Worker cap: min(hardware_concurrency, IIDLAB_THREADS if set). At least 1.
int thread_count();

/// Runs fn(i) for i in [0, count). Work is split into contiguous chunks, one
/// per worker; fn must only write state owned by index i, so the result is
/// identical for any worker count. Reductions belong to the caller, in index
/// order.
void parallel_for(int count, const std::function<void(int)>& fn);

} // namespace iid::parallel

#pragma once

#include <cstddef>
#include <functional>

namespace hyperflow {

// Parallelism cap: value of HYPERFLOW_THREADS clamped to
// [1, hardware_concurrency], or hardware_concurrency when unset.
int max_threads();

// Runs fn(i) for i in [0, n). Splits across at most max_threads() workers
// once n is large enough to amortize thread startup; otherwise runs serially.
// fn must only write to per-index state, so the result does not depend on
// the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hyperflow

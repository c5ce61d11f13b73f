#pragma once

#include <cstddef>
#include <functional>

namespace madelung {

/// Worker cap for pointwise kernels, resolved once per process from the
/// MADELUNG_THREADS environment variable: unset or "0" means one worker per
/// hardware thread, any other value is taken literally (min 1).
int worker_count();

/// Runs fn(begin, end) over disjoint chunks of [0, n). Chunking only splits
/// the index range; every output element is written by exactly one worker, so
/// results are bit-identical for any worker count. Reductions should stay
/// sequential (summation order matters for reproducibility).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace madelung

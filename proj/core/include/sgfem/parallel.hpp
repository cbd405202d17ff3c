#pragma once

#include <cstddef>
#include <functional>

namespace sgfem {

/// Worker count: SGFEM_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Calls fn(i) for i in [begin, end) on up to worker_count() threads.
/// Indices are split into contiguous chunks; fn must only write to
/// per-index storage.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace sgfem

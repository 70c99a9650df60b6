#pragma once

#include <cstddef>
#include <functional>

namespace dnet {

// 0 means "one per hardware thread".
unsigned resolve_workers(unsigned requested);

// Calls body(k) for every block k in [0, n_blocks) using up to `workers`
// threads. Blocks are independent; callers store per-block results in
// preallocated slots and reduce them in block order, so results do not depend
// on the worker count. The first exception thrown by a block is rethrown.
void parallel_blocks(std::size_t n_blocks, unsigned workers,
                     const std::function<void(std::size_t)>& body);

}  // namespace dnet

#pragma once

#include <cstddef>
#include <functional>

namespace vmatch {

// Runs fn(i) for every i in [0, n), split over `threads` workers in
// contiguous blocks.  fn must confine its writes to data owned by index i
// (typically slot i of a pre-sized vector); under that contract the result
// is identical for every thread count, including 1.
//
// Exceptions thrown by fn are captured and the first one is rethrown on the
// calling thread after all workers join.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

} // namespace vmatch

#pragma once

#include <cstddef>
#include <functional>

namespace skewlab {

/// Number of worker threads used by sample/energy loops. 0 means
/// hardware_concurrency. Results never depend on this value: every loop writes
/// into index-addressed slots and reductions run sequentially afterwards.
void set_worker_count(unsigned workers);
unsigned worker_count();

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace skewlab

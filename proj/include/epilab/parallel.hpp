#pragma once

#include <cstddef>
#include <functional>

namespace epilab {

/// Worker count: hardware concurrency, capped by EPI_LAB_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [begin, end) over contiguous chunks. Each index is
/// written by exactly one worker, so results do not depend on the thread
/// count as long as body does not reduce across indices.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace epilab

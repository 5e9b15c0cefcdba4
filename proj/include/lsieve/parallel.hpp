#pragma once

#include <cstddef>
#include <functional>

namespace lsieve {

/// Worker count: LSL_THREADS if set and positive, otherwise hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Items are claimed dynamically, so body must
/// write only to slot i of any shared output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lsieve
